from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from hcblocks.blocks import ext_quiver, word_ideal
from hcblocks.gwa import (E, F, HH, ONE_A, ORIGIN, C, GluedGamma, GWAElement, H,
                          PolyLocal, R, WindowError, check_relations, crt_idempotent,
                          finite_glued_model, from_taylor, glued_labels, gwa_double_quotient,
                          gwa_quotient, gwa_window_dims, local_dim, membership_certificate,
                          nonsplit_witness, point_label, sigma, taylor, to_qq, word_triple)
from hcblocks.hc import ConcreteFamily
from hcblocks.linalg import Subspace

coords = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def test_sl2_relations_and_casimir():
    check_relations()


def test_sigma_moves_h_past_x():
    # [h, e] = 2e, so h e = e (h + 2)
    assert HH * E == E * (HH + ONE_A.scale(2))
    assert sigma(H, 1) == H - 2
    assert sigma(sigma(C * H, 3), -3) == C * H


def test_x_powers_compose():
    assert (E * F).terms[0] == (2 * C - H ** 2 + 2 * H) / 4
    assert (F * E).terms[0] == (2 * C - H ** 2 - 2 * H) / 4


@given(coords, coords, st.integers(1, 4))
def test_taylor_round_trip(a, b, order):
    p = (a, b)
    poly = (H - 1) ** 2 * C + 3 * H * C ** 2 - 5
    back = from_taylor(taylor(poly, p, order), p, order)
    assert taylor(back, p, order) == taylor(poly, p, order)


def test_taylor_at_point_matches_sympy_value():
    h, c = sympy.symbols("h c")
    expr = (h - 1) ** 2 * c + 3 * h * c ** 2 - 5
    poly = (H - 1) ** 2 * C + 3 * H * C ** 2 - 5
    value = Fraction(str(expr.subs({h: Fraction(1, 2), c: 3})))
    assert taylor(poly, (Fraction(1, 2), Fraction(3)), 1) == (value,)


def test_crt_idempotent():
    pts = ((Fraction(0), Fraction(0)), (Fraction(2), Fraction(0)), (Fraction(1), Fraction(5)))
    e = crt_idempotent(pts, (2, 2, 2), pts[0])
    assert taylor(e, pts[0], 2) == taylor(R.one, pts[0], 2)
    assert not any(taylor(e, pts[1], 2)) and not any(taylor(e, pts[2], 2))


@pytest.mark.parametrize("order", [1, 2, 3])
def test_local_algebra_dimension(order):
    loc = PolyLocal([ORIGIN, (2, 0)], order)
    assert loc.algebra().dim == 2 * local_dim(order)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("side", ["left", "right"])
def test_window_dims(m, side):
    dims = gwa_window_dims((1, 5), m, 2, side)
    assert len(dims) == 5
    assert set(dims.values()) == {m * (m + 1) // 2}


def test_window_module_relations_and_cyclic_vector():
    mod = gwa_quotient(ORIGIN, 2, 2)
    assert mod.quotient.module.spin([mod.cyclic]).dim <= mod.quotient.dim
    assert set(mod.interior.values()) == {3}
    assert len(mod.boundary) == 2


@pytest.mark.parametrize("i,j", [(1, 1), (1, 3), (2, 2), (3, 2)])
def test_double_quotient_dims(i, j):
    res = gwa_double_quotient(ORIGIN, i, j, 2)
    k = min(i, j)
    assert res.dim == res.expected == k * (k + 1) // 2
    assert res.ok


@pytest.mark.parametrize("point", [ORIGIN, (Fraction(1, 2), Fraction(3))])
@pytest.mark.parametrize("n", [-2, -1, 1, 3])
def test_membership_certificates(point, n):
    cert = membership_certificate(point, 2, 3, n)
    assert cert.verify(point, 2, 3)


def test_membership_certificate_rejects_zero_power():
    with pytest.raises(ValueError):
        membership_certificate(ORIGIN, 1, 1, 0)


def test_glued_quiver_has_a_single_arrow():
    alg = GluedGamma([ORIGIN, (1, 3)], 2).algebra()
    up, lo = glued_labels()
    edges = [(s, t, d) for s, t, d in ext_quiver(alg).edges() if s != t]
    assert edges == [(lo, up, 1)]


def test_nonsplit_witness():
    w = nonsplit_witness()
    assert w.ok
    assert (w.dim, w.invariant_lines, w.ext_dim) == (2, 1, 1)


def _ideal_from_triple(gg, triple):
    """The ideal [[P, eps x], [0, Q]] spanned inside the truncated glued algebra."""
    n = gg.half
    upper = gg.local.power_space(triple.upper_exps)
    lower = gg.local.power_space(triple.lower_exps)
    vecs = [gg.join(u, 0, [0] * n) for u in upper.basis]
    vecs += [gg.join([0] * n, 0, v) for v in lower.basis]
    if triple.eps:
        vecs.append(gg.join([0] * n, 1, [0] * n))
    return Subspace.span(vecs, gg.dim)


@pytest.fixture(scope="module")
def small_glued():
    gg = GluedGamma([ORIGIN, (2, 0)], 3)
    return gg, gg.algebra()


@given(st.lists(st.sampled_from(["U(0,0)", "L(0,0)", "U(2,0)", "L(2,0)"]),
                min_size=1, max_size=3))
def test_word_triple_matches_ideal_product(small_glued, word):
    gg, alg = small_glued
    try:
        triple = word_triple(gg, word)
    except WindowError:
        return
    assert word_ideal(alg, word).space == _ideal_from_triple(gg, triple)


def test_word_triple_rejects_deep_words(small_glued):
    gg, _ = small_glued
    with pytest.raises(WindowError):
        word_triple(gg, ["U(0,0)"] * 4)


@pytest.mark.parametrize("order", [1, 2])
def test_finite_model_is_a_valid_pair(order):
    fm = finite_glued_model(order)
    ConcreteFamily(fm.big, fm.gamma, fm.embedding).check()
    assert fm.big.dim == 2 * fm.base_dim + 1
    assert fm.gamma.dim == 2 * fm.gamma_base_dim + 1


def test_gwa_element_arithmetic():
    g = GWAElement.poly(H * C)
    assert (g + g).scale(Fraction(1, 2)) == g
    assert (g - g).is_zero()
    assert GWAElement.x(2).chi() == 0 and ONE_A.chi() == 1
    assert point_label((Fraction(5, 2), Fraction(7))) == "(5/2,7)"
    assert to_qq(Fraction(3, 4)) * 4 == 3
