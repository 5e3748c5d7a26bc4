import random

import pytest
from hypothesis import given, strategies as st

from hcblocks.acceptance import random_module, random_vector, small_algebras
from hcblocks.algebra import (direct_sum, full_matrix_algebra, product_algebra,
                              truncated_polynomial_algebra, upper_triangular_algebra,
                              algebra_from_matrices)
from hcblocks.blocks import (BlockError, IdealWord, apply_word, block_decompose, block_space,
                             equality_relation, ext1_dim, ext_quiver, ext_relation,
                             fitting_split, is_strong, refines, support, user_relation,
                             word_ideal)
from hcblocks.linalg import Matrix

ALGEBRAS = small_algebras()
RELATIONS = {k: ext_relation(a) for k, a in ALGEBRAS.items()}


def kronecker_algebra():
    """Path algebra of the Kronecker quiver as 3x3 matrices [[a, b, c], [0, d, 0], [0, 0, d]]."""
    def unit(i, j):
        rows = [[0] * 3 for _ in range(3)]
        rows[i][j] = 1
        return Matrix(rows)
    d = unit(1, 1) + unit(2, 2)
    alg, _ = algebra_from_matrices([unit(0, 0), unit(0, 1), unit(0, 2), d])
    return alg


# Ext^1 quiver data: number of arrows of the Gabriel quiver
@pytest.mark.parametrize("alg,loops,arrows", [
    (upper_triangular_algebra(2), 0, 1),
    (upper_triangular_algebra(3), 0, 2),
    (truncated_polynomial_algebra(3), 1, 0),
    (full_matrix_algebra(2), 0, 0),
    (kronecker_algebra(), 0, 2),
])
def test_ext_quiver_counts_arrows(alg, loops, arrows):
    q = ext_quiver(alg)
    assert sum(d for (s, t), d in q.edge_dims.items() if s == t) == loops
    assert sum(d for (s, t), d in q.edge_dims.items() if s != t) == arrows


def test_ext_between_ends_of_a3_vanishes():
    alg = upper_triangular_algebra(3)
    ideals = alg.cfs()
    dims = sorted(ext1_dim(s, t) + ext1_dim(t, s) for s in ideals for t in ideals
                  if s.label < t.label)
    assert dims == [0, 1, 1]


def test_ext_relation_classes():
    prod = product_algebra(upper_triangular_algebra(2), truncated_polynomial_algebra(2))
    rel = ext_relation(prod)
    assert sorted(len(c) for c in rel.classes) == [1, 2]
    assert refines(equality_relation(prod), rel)
    assert not refines(rel, equality_relation(prod))


def test_user_relation_must_partition():
    alg = upper_triangular_algebra(2)
    labels = [m.label for m in alg.cfs()]
    with pytest.raises(BlockError):
        user_relation(alg, [labels[:1]])


def test_regular_module_of_ut2_is_one_block():
    alg = upper_triangular_algebra(2)
    part = block_decompose(alg.regular_module(), ext_relation(alg))
    assert part.is_total()
    assert [len(c) for c in part.support] == [2]
    assert part.residual.dim == 0


def test_equality_relation_can_leave_a_residual():
    # the projective P of UT2 with top S0 and socle S1 is not split by single ideals
    alg = upper_triangular_algebra(2)
    part = block_decompose(alg.regular_module(), equality_relation(alg))
    assert not part.is_total()


def test_word_ideal_and_apply_word():
    alg = truncated_polynomial_algebra(3)
    (m,) = alg.cfs()
    reg = alg.regular_module()
    assert word_ideal(alg, [m.label] * 2).dim == 1
    assert apply_word(reg, [m, m, m]).is_zero()
    word = IdealWord((m.label,), (m.label,))
    assert str(word * word) == f"{m.label}*{m.label}"
    with pytest.raises(BlockError):
        IdealWord((m.label,), ("elsewhere",))


def test_strong_report_words_kill_pieces():
    alg = upper_triangular_algebra(3)
    rel = ext_relation(alg)
    reg = alg.regular_module("right")
    rep = is_strong(reg, rel)
    assert rep.strong
    for cls, word in rep.words.items():
        members = {m.label: m for m in rel.members(cls)}
        piece = block_space(reg, cls, rel)
        assert apply_word(reg, [members[x] for x in word], piece).is_zero()


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_block_decomposition_is_total(name, seed):
    mod = random_module(ALGEBRAS[name], random.Random(seed))
    part = block_decompose(mod, RELATIONS[name])
    assert part.is_total()
    assert sum(p.dim for p in part.pieces.values()) == mod.dim
    for sp in part.pieces.values():
        assert mod.is_invariant(sp)


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_support_of_exact_sequence(name, seed):
    rng = random.Random(seed)
    mod = random_module(ALGEBRAS[name], rng)
    rel = RELATIONS[name]
    sub = mod.spin([random_vector(mod.dim, rng)])
    assert set(support(mod, rel)) == set(support(mod.submodule(sub), rel)) | \
        set(support(mod.quotient(sub), rel))


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_support_of_direct_sum_is_union(name, seed):
    rng = random.Random(seed)
    a, b = random_module(ALGEBRAS[name], rng), random_module(ALGEBRAS[name], rng)
    if a.side != b.side:
        return
    rel = RELATIONS[name]
    assert set(support(direct_sum([a, b]), rel)) == set(support(a, rel)) | set(support(b, rel))


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_fitting_split(name, seed):
    mod = random_module(ALGEBRAS[name], random.Random(seed))
    rel = RELATIONS[name]
    for cls in support(mod, rel):
        fs = fitting_split(mod, cls, rel)
        assert fs.block_space.dim + fs.complement.dim == mod.dim
        for m in rel.members(cls):
            assert mod.image(m.ideal, fs.complement) == fs.complement
        by = {m.label: m for m in rel.members(cls)}
        assert apply_word(mod, [by[x] for x in fs.word], fs.block_space).is_zero()
