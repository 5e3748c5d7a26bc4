from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from hcblocks.linalg import (DimensionGuardError, LinalgError, Matrix, Subspace, annihilator,
                             format_rational, guard, inverse, kernel, minimal_polynomial,
                             parse_rational, quotient_basis, rank, rref, solve,
                             subspace_intersect, subspace_sum)

small = st.integers(-4, 4)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c),
                               min_size=r, max_size=r)))


@pytest.mark.parametrize("text,value", [("3", Fraction(3)), ("-2/4", Fraction(-1, 2)),
                                        (" 7 / 3 ", Fraction(7, 3))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "a", "1/-2", "", "1//2"])
def test_parse_rational_rejects(text):
    with pytest.raises(LinalgError):
        parse_rational(text)


@given(st.fractions(max_denominator=50))
def test_rational_round_trip(x):
    assert parse_rational(format_rational(x)) == x


@given(matrices())
def test_rank_matches_sympy(rows):
    assert rank(Matrix(rows)) == sympy.Matrix(rows).rank()


@given(matrices())
def test_rref_matches_sympy(rows):
    ours = rref(Matrix(rows))
    theirs, pivots = sympy.Matrix(rows).rref()
    assert tuple(ours[1]) == tuple(pivots)
    nonzero = [[Fraction(int(a.p), int(a.q)) for a in theirs.row(i)] for i in range(len(pivots))]
    assert [list(r) for r in ours[0].rows[:len(pivots)]] == nonzero


@given(matrices())
def test_kernel_is_kernel_and_rank_nullity(rows):
    m = Matrix(rows)
    ker = kernel(m)
    assert all(not any(m.apply(b)) for b in ker.basis)
    assert ker.dim + rank(m) == m.ncols


@given(matrices(4, 4), st.lists(small, min_size=4, max_size=4))
def test_solve(rows, target):
    m = Matrix(rows)
    b = tuple(Fraction(a) for a in target[:m.nrows])
    x = solve(m, b)
    consistent = rank(Matrix(rows)) == rank(Matrix([list(r) + [t] for r, t in zip(rows, b)]))
    if x is None:
        assert not consistent
    else:
        assert m.apply(x) == b


def test_inverse():
    m = Matrix([[2, 1], [1, 1]])
    assert m @ inverse(m) == Matrix.identity(2)
    with pytest.raises(LinalgError):
        inverse(Matrix([[1, 2], [2, 4]]))


@given(st.lists(st.lists(small, min_size=4, max_size=4), max_size=4),
       st.lists(st.lists(small, min_size=4, max_size=4), max_size=4))
def test_sum_and_intersection_dimensions(us, vs):
    u, v = Subspace.span(us, 4), Subspace.span(vs, 4)
    s, i = subspace_sum(u, v), subspace_intersect(u, v)
    assert s.dim + i.dim == u.dim + v.dim
    assert i <= u and i <= v and u <= s and v <= s


@given(st.lists(st.lists(small, min_size=5, max_size=5), max_size=5))
def test_annihilator_and_quotient(vs):
    u = Subspace.span(vs, 5)
    ann = annihilator(u)
    assert ann.dim == 5 - u.dim
    assert all(sum(a * b for a, b in zip(x, y)) == 0 for x in ann.basis for y in u.basis)
    whole = Subspace.full(5)
    assert len(quotient_basis(whole, u)) == 5 - u.dim


def test_modular_rank():
    # the matrix [[1, 1], [1, -1]] is singular only in characteristic 2
    assert rank(Matrix([[1, 1], [1, -1]])) == 2
    assert rank([[1, 1], [1, -1]], modulus=2) == 1


def test_minimal_polynomial_of_nilpotent_jordan_block():
    n = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    # x^3, lowest degree first
    assert tuple(minimal_polynomial(n)) == (0, 0, 0, 1)


def test_guard(monkeypatch):
    monkeypatch.setenv("HCB_MAX_DIM", "3")
    guard(3)
    with pytest.raises(DimensionGuardError, match="HCB_MAX_DIM=3"):
        guard(4)
