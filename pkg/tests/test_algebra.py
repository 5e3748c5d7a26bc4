import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hcblocks.acceptance import random_module, random_vector, small_algebras
from hcblocks.algebra import (AlgebraError, AxiomError, Module, NonSplitError,
                              algebra_from_matrices, build_algebra, center,
                              composition_factors, factor_counts, full_matrix_algebra,
                              hom_space, ideal_power, ideal_product, product_algebra,
                              quotient_algebra, radical, truncated_polynomial_algebra,
                              upper_triangular_algebra)
from hcblocks.linalg import Matrix

ALGEBRAS = small_algebras()


def test_build_solves_for_unit():
    # k x k with basis e0, e1 orthogonal idempotents
    table = [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    alg = build_algebra(table)
    assert alg.unit == (1, 1)


def test_zero_algebra_rejected():
    with pytest.raises(AlgebraError):
        build_algebra([])


def test_associativity_witness():
    # e0 e1 = e1, everything else from a unit e0; make e1 e1 = e0 + e1 inconsistently
    table = [[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
             [[0, 1, 0], [0, 0, 1], [0, 0, 0]],
             [[0, 0, 1], [0, 1, 0], [0, 0, 0]]]
    with pytest.raises(AxiomError) as err:
        build_algebra(table, [1, 0, 0])
    assert len(err.value.witness) == 3


def test_unit_law_violation():
    table = [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    with pytest.raises(AxiomError, match="unit"):
        build_algebra(table, [1, 0])


@pytest.mark.parametrize("alg,rad_dim", [
    (upper_triangular_algebra(2), 1),
    (upper_triangular_algebra(3), 3),
    (truncated_polynomial_algebra(3), 2),
    (full_matrix_algebra(2), 0),
])
def test_radical_dimension(alg, rad_dim):
    assert radical(alg).dim == rad_dim


@pytest.mark.parametrize("alg,codims", [
    (upper_triangular_algebra(3), [1, 1, 1]),
    (full_matrix_algebra(2), [4]),
    (truncated_polynomial_algebra(4), [1]),
    (product_algebra(full_matrix_algebra(2), truncated_polynomial_algebra(2)), [1, 4]),
])
def test_cfs_codimensions(alg, codims):
    assert sorted(m.codim for m in alg.cfs()) == codims


def test_cfs_simples_are_distinct_and_radical_is_intersection():
    alg = upper_triangular_algebra(3)
    ideals = alg.cfs()
    for a in ideals:
        for b in ideals:
            if a is not b:
                assert hom_space(a.simple, b.simple) == []
    inter = ideals[0].ideal.space
    from hcblocks.linalg import subspace_intersect
    for m in ideals[1:]:
        inter = subspace_intersect(inter, m.ideal.space)
    assert inter == radical(alg).space


def test_non_split_simple_is_reported():
    # Q[x]/(x^2 + 1) is a field that does not split over Q
    table = [[[1, 0], [0, 1]], [[0, 1], [-1, 0]]]
    alg = build_algebra(table, [1, 0])
    with pytest.raises(NonSplitError):
        alg.cfs()


def test_center_of_matrix_algebra_is_scalars():
    assert center(full_matrix_algebra(2)).dim == 1
    assert center(truncated_polynomial_algebra(3)).dim == 3


def test_ideal_powers_in_truncated_polynomial_ring():
    alg = truncated_polynomial_algebra(4)
    rad = radical(alg)
    assert [ideal_power(rad, k).dim for k in (1, 2, 3, 4)] == [3, 2, 1, 0]
    assert ideal_product(rad, rad) == ideal_power(rad, 2)


def test_quotient_algebra():
    alg = truncated_polynomial_algebra(4)
    q = quotient_algebra(alg, ideal_power(radical(alg), 2))
    assert q.algebra.dim == 2
    assert radical(q.algebra).dim == 1


def test_module_law_is_checked():
    alg = upper_triangular_algebra(2)
    zero = Matrix.zeros(1, 1)
    with pytest.raises(AxiomError):
        Module(alg, "left", 1, [zero, zero, zero])


def test_hom_space_between_projectives():
    # for 2x2 upper triangular matrices, Hom(P0, P1) and Hom(P1, P0) have total dim 1
    alg = upper_triangular_algebra(2)
    reg = alg.regular_module("left")
    e00, e11 = alg.basis(0), alg.basis(2)
    p0 = reg.submodule(reg.spin([e00]))
    p1 = reg.submodule(reg.spin([e11]))
    assert len(hom_space(p0, p1)) + len(hom_space(p1, p0)) == 1
    assert len(hom_space(reg, reg)) == alg.dim


def test_algebra_from_matrices_rejects_dependent_input():
    with pytest.raises(AlgebraError):
        algebra_from_matrices([Matrix.identity(2), Matrix.identity(2).scale(2)])


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_composition_factors_additive(name, seed):
    rng = random.Random(seed)
    mod = random_module(ALGEBRAS[name], rng)
    sub = mod.spin([random_vector(mod.dim, rng)])
    whole = factor_counts(composition_factors(mod))
    parts = factor_counts(composition_factors(mod.submodule(sub)))
    for lab, k in factor_counts(composition_factors(mod.quotient(sub))).items():
        parts[lab] = parts.get(lab, 0) + k
    assert whole == parts
    assert sum(m.simple.dim * k for m in mod.algebra.cfs()
               for lab, k in whole.items() if lab == m.label) == mod.dim


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_spin_gives_invariant_subspace(name, seed):
    rng = random.Random(seed)
    mod = random_module(ALGEBRAS[name], rng)
    assert mod.is_invariant(mod.spin([random_vector(mod.dim, rng)]))


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_multiplication_is_associative_on_random_elements(name, seed):
    rng = random.Random(seed)
    alg = ALGEBRAS[name]
    a, b, c = (random_vector(alg.dim, rng) for _ in range(3))
    assert alg.mul(alg.mul(a, b), c) == alg.mul(a, alg.mul(b, c))
    assert alg.mul(alg.unit, a) == tuple(Fraction(x) for x in a)
