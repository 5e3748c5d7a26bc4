import json
import random

import pytest

from hcblocks.acceptance import _product_model, random_module
from hcblocks.algebra import upper_triangular_algebra
from hcblocks.blocks import apply_word, block_space, ext_relation
from hcblocks.gwa import finite_glued_model, glued_labels
from hcblocks.hc import (ConcreteFamily, CorruptedFamily, PairPresentation,
                         PresentationError, build_preorder, decompose_hc_module,
                         irreducible_supports, naturality_defects, quotient_support,
                         containment_witnesses, self_pair, verify_blockspan,
                         verify_hc_subalgebra, x_set)
from hcblocks.linalg import Matrix


@pytest.fixture(scope="module")
def finite_model():
    fm = finite_glued_model(1)
    pp = PairPresentation(fm.gamma, ConcreteFamily(fm.big, fm.gamma, fm.embedding))
    return pp, ext_relation(pp.gamma)


@pytest.fixture(scope="module")
def product_model():
    pp, _ = _product_model()
    return pp, ext_relation(pp.gamma)


def test_glued_pair_is_strong_hc(glued_small):
    pp, rel = glued_small
    words = [(lab,) for cls in rel.classes for lab in cls]
    rep = verify_hc_subalgebra(pp, rel, words)
    assert rep.verdict == "strong_hc"
    assert rep.witness is None
    assert all(c.residual_dim == 0 for c in rep.checks)


def test_corrupted_oracle_fails_with_witness(glued_small):
    pp, rel = glued_small
    bad = PairPresentation(pp.gamma, CorruptedFamily(pp.family))
    up, _ = glued_labels()
    rep = verify_hc_subalgebra(bad, rel, [(up,)])
    assert rep.verdict == "fail"
    assert rep.witness["word"] == [up]
    assert rep.witness["defect"]
    json.dumps(rep.to_json())


def test_quotient_support_of_origin_ideal(glued_small):
    pp, rel = glued_small
    up, lo = glued_labels()
    res = quotient_support(pp, (up,), rel, "left")
    assert (up, lo) in res.support
    assert res.residual.dim == 0


def test_self_pair_verdict():
    alg = upper_triangular_algebra(2)
    pp = PairPresentation(alg, self_pair(alg))
    rel = ext_relation(alg)
    words = [(m.label,) for m in alg.cfs()]
    assert verify_hc_subalgebra(pp, rel, words).verdict == "strong_hc"


def test_embedding_shape_is_checked():
    alg = upper_triangular_algebra(2)
    with pytest.raises(PresentationError):
        ConcreteFamily(alg, alg, Matrix.identity(2))


def test_preorder_components(finite_model):
    pp, rel = finite_model
    pre = build_preorder(pp, rel)
    assert len(pre.delta()) == 1
    nabla = pre.nabla()
    assert sum(len(c) for c in nabla) == len(rel.classes)
    assert pre.to_dot().startswith("digraph preorder {")
    for b in pre.nodes:
        assert b in pre.reachable(b)


def test_product_model_has_two_delta_classes(product_model):
    pp, rel = product_model
    assert len(build_preorder(pp, rel).delta()) == 2


def test_hc_decomposition_of_regular_module(product_model):
    pp, rel = product_model
    big = pp.family.big
    pre = build_preorder(pp, rel)
    reg = big.regular_module("left")
    dec = decompose_hc_module(pp, reg, rel, pre)
    assert len(dec.summands) == 2
    assert sum(sp.dim for _, sp in dec.summands) == big.dim
    for _, sp in dec.summands:
        assert reg.is_invariant(sp)
    assert containment_witnesses(pp, reg, rel, pre) == []


def test_decomposition_of_random_modules(finite_model):
    pp, rel = finite_model
    rng = random.Random(5)
    pre = build_preorder(pp, rel)
    for _ in range(3):
        mod = random_module(pp.family.big, rng, max_dim=pp.family.big.dim)
        if mod.side != "left":
            continue
        dec = decompose_hc_module(pp, mod, rel, pre)
        assert sum(sp.dim for _, sp in dec.summands) == mod.dim
        assert containment_witnesses(pp, mod, rel, pre) == []


def test_identity_is_natural(finite_model):
    pp, rel = finite_model
    reg = pp.family.big.regular_module("left")
    assert naturality_defects(pp, Matrix.identity(reg.dim), reg, reg, rel) == []


def test_x_set_contains_quotient_supports(finite_model):
    pp, rel = finite_model
    for m in pp.gamma.cfs():
        assert x_set(pp, m.label).inclusion


def test_irreducible_supports_sit_in_one_nabla_class(finite_model):
    pp, rel = finite_model
    assert all(ok for _, _, ok in irreducible_supports(pp, rel))


def test_blockspan(finite_model):
    pp, rel = finite_model
    fam = pp.family
    reg = fam.big.regular_module("left")
    restricted = fam.restrict(reg)
    checked = 0
    for cls in rel.classes:
        piece = block_space(restricted, cls, rel)
        members = {m.label: m for m in rel.members(cls)}
        for x in piece.basis:
            for lab in cls:
                word = (lab,) * 2
                if apply_word(restricted, [members[w] for w in word],
                              piece.__class__.span([x], reg.dim)).is_zero():
                    assert verify_blockspan(pp, reg, x, word, rel).contained
                    checked += 1
    assert checked
