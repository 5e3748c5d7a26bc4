import random
from fractions import Fraction

import pytest

from hcblocks.algebra import truncated_polynomial_algebra
from hcblocks.blocks import ext_relation
from hcblocks.gwa import GluedFamily, GluedGamma, ORIGIN, glued_labels, gwa_family_window
from hcblocks.hc import PairPresentation
from hcblocks.stages import (StageError, StageElement, badic_stage_check, block_words,
                             check_associativity, check_gamma_action, check_independence,
                             check_unit, completion_stage, compose, cyclicity_check,
                             double_quotient, gamma_element, quasiregular_check,
                             quasiregular_inverse, radical_stage, random_stage_element,
                             semisimple_stage_check, separating_word, settle_words,
                             unit_element)

UP, LO = glued_labels()


def test_unit_stage_and_stage_maps(glued_small):
    pp, rel = glued_small
    coarse = double_quotient(pp, (UP,), (UP,))
    fine = double_quotient(pp, (UP, LO), (UP, LO))
    assert fine.refines(coarse)
    m = fine.stage_map(coarse)
    assert m.apply(fine.unit_coset) == coarse.unit_coset
    assert fine.annihilation_defects() == []


def test_unit_element_needs_one_block(glued_small):
    pp, rel = glued_small
    with pytest.raises(StageError):
        unit_element(pp, rel, (UP,), ("U(2,0)",))


def test_compose_with_units(glued_small):
    pp, rel = glued_small
    m = (UP,)
    n = separating_word(pp, rel, m, m, rel.class_of(UP)).word
    one = unit_element(pp, rel, m, n)
    alpha = random_stage_element(double_quotient(pp, m, n), random.Random(1))
    assert check_unit(StageElement(one.stage, alpha.vec), m, rel).ok


def test_gamma_elements_compose_like_products(glued_small):
    pp, rel = glued_small
    rng = random.Random(3)
    m = (UP,)
    n = separating_word(pp, rel, m, (LO,), rel.class_of(UP)).word
    alpha = random_stage_element(double_quotient(pp, m, n), rng)
    g = tuple(Fraction(rng.randint(-2, 2)) for _ in range(pp.gamma.dim))
    assert check_gamma_action(alpha, g, (LO,), rel).ok
    ge = gamma_element(pp, m, n, g)
    assert ge.stage.dim == alpha.stage.dim


@pytest.mark.parametrize("seed", range(4))
def test_category_laws(glued_small, seed):
    pp, rel = glued_small
    rng = random.Random(seed)
    m, k = (UP,), (LO, LO)
    cls = rel.class_of(UP)
    n, l = settle_words(pp, rel, m, k, cls, cls)
    alpha = random_stage_element(double_quotient(pp, m, n), rng)
    beta = random_stage_element(double_quotient(pp, n, l), rng)
    delta = random_stage_element(double_quotient(pp, l, k), rng)
    assert check_associativity(delta, beta, alpha, rel).ok
    assert check_independence(beta, alpha, rel, rng).ok


def test_composition_is_bilinear(glued_small):
    pp, rel = glued_small
    rng = random.Random(11)
    m = (UP,)
    cls = rel.class_of(UP)
    n, l = settle_words(pp, rel, m, (LO,), cls, cls)
    a1, a2 = (random_stage_element(double_quotient(pp, m, n), rng) for _ in range(2))
    beta = random_stage_element(double_quotient(pp, n, l), rng)
    lhs = compose(beta, a1 + a2.scale(3), rel)
    rhs = compose(beta, a1, rel) + compose(beta, a2, rel).scale(3)
    assert lhs.vec == rhs.vec


def test_cyclicity_of_glued_and_gwa_stages(glued_small):
    pp, rel = glued_small
    words = block_words(rel, rel.class_of(UP), 2, 3)
    stages = [double_quotient(pp, a, b) for a in words for b in words]
    fam = gwa_family_window(ORIGIN, 3, 1)
    gp = PairPresentation(fam.gamma, fam)
    ws = [("(0,0)",) * i for i in (1, 2, 3)]
    stages += [double_quotient(gp, a, b) for a in ws for b in ws]
    assert all(r.left and r.right for r in cyclicity_check(stages))


def test_gwa_stage_dims():
    fam = gwa_family_window(ORIGIN, 3, 2)
    gp = PairPresentation(fam.gamma, fam)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            k = min(i, j)
            assert double_quotient(gp, ("(0,0)",) * j, ("(0,0)",) * i).dim == k * (k + 1) // 2


def test_block_words():
    rel = ext_relation(GluedGamma([ORIGIN], 1).algebra())
    words = block_words(rel, rel.class_of(UP), 2)
    assert len(words) == 2 + 4
    assert block_words(rel, rel.class_of(UP), 2, max_exp=1) == [w for w in words
                                                                  if len(set(w)) == len(w)]


@pytest.fixture(scope="module")
def origin_gamma():
    alg = GluedGamma([ORIGIN], 4).algebra()
    return alg, ext_relation(alg)


def test_completion_stage_dims(origin_gamma):
    alg, rel = origin_gamma
    st = completion_stage(alg, rel, (UP, LO))
    ss = semisimple_stage_check(st)
    assert (ss.stage_dim, ss.semisimple_dim) == (3, 2)
    assert radical_stage(st).agree


def test_completion_stage_projection(origin_gamma):
    alg, rel = origin_gamma
    fine = completion_stage(alg, rel, (UP, LO, UP))
    coarse = completion_stage(alg, rel, (UP,))
    m = fine.projection_to(coarse)
    assert m.apply(fine.algebra.unit) == coarse.algebra.unit
    with pytest.raises(StageError):
        coarse.projection_to(fine)


def test_radical_of_truncated_polynomial_stage():
    alg = truncated_polynomial_algebra(3)
    rel = ext_relation(alg)
    (m,) = alg.cfs()
    st = completion_stage(alg, rel, (m.label, m.label))
    rad = radical_stage(st)
    assert st.algebra.dim == 2 and rad.trace.dim == 1 and rad.agree
    assert quasiregular_check(st)


def test_quasiregular_inverse():
    alg = truncated_polynomial_algebra(4)
    x = (0, 1, 2, 0)
    inv = quasiregular_inverse(alg, x)
    one_minus = tuple(u - a for u, a in zip(alg.unit, x))
    assert alg.mul(one_minus, inv) == alg.unit
    with pytest.raises(StageError):
        quasiregular_inverse(alg, alg.unit)


@pytest.mark.parametrize("level", [1, 2])
def test_badic_check(origin_gamma, level):
    alg, rel = origin_gamma
    assert badic_stage_check(alg, rel, rel.class_of(UP), level).ok


def test_badic_check_respects_order(origin_gamma):
    alg, rel = origin_gamma
    with pytest.raises(StageError):
        badic_stage_check(alg, rel, rel.class_of(UP), 3, max_order=4)


def test_glued_quotient_is_cyclic():
    fam = GluedFamily([ORIGIN], 2)
    q = fam.quotient((UP,), "left")
    assert q.module.spin([q.cyclic]).dim == q.dim
