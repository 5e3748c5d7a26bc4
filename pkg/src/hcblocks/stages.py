"""Finite stages of the category of blocks and of the block completions of Gamma.

A morphism space ``A(B, C)`` is the inverse limit of ``A/(nA + Am)`` over
words ``m`` of ``B`` and ``n`` of ``C``; a completion ``Gamma_B`` is the limit
of ``Gamma/w`` over words of ``B``.  Only the stages are ever built.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .algebra import (Algebra, Ideal, Module, cfs, direct_sum, ideal_intersect,
                      ideal_power, ideal_product, quotient_algebra, radical)
from .blocks import (NotStrongError, Relation, apply_word, block_decompose,
                     separating_word as _separating_word, word_ideal)
from .hc import PairPresentation, QuotientModule
from .linalg import (ZERO, Matrix, Subspace, rank, solve, subspace_intersect,
                     unit_vector, vadd, vscale)


class StageError(RuntimeError):
    pass


Word = tuple[str, ...]


def _ideal(gamma: Algebra, word: Sequence[str]) -> Ideal:
    return _cached_ideal(gamma, tuple(word))


@lru_cache(maxsize=512)
def _cached_ideal(gamma: Algebra, word: Word) -> Ideal:
    if not word:
        return gamma.whole()
    return word_ideal(gamma, word)


def word_block(rel: Relation, word: Sequence[str]) -> tuple[str, ...]:
    classes = {rel.class_of(x) for x in word}
    if len(classes) != 1:
        raise StageError(f"word {tuple(word)} does not lie in a single block")
    return classes.pop()


# ---------------------------------------------------------------- double quotients

class DoubleQuotient:
    """``A/(nA + Am)`` as the left window ``A/Am`` modulo ``n (A/Am)``.

    ``right_word`` is ``m`` (source block) and ``left_word`` is ``n``
    (target block).  The left and right Gamma-actions are inherited from the
    window; ``window_exact`` is false when a surviving coset lies on a line at
    the edge of the truncation.
    """

    def __init__(self, pp: PairPresentation, right_word: Sequence[str],
                 left_word: Sequence[str]):
        self.pp = pp
        self.right_word = tuple(right_word)
        self.left_word = tuple(left_word)
        self.window: QuotientModule = pp.quotient(self.right_word, "left")
        self.sub = self.window.module.image(_ideal(pp.gamma, self.left_word))
        self.left = self.window.module.quotient(self.sub)
        self.right = self.window.opposite.quotient(self.sub)
        self.unit_coset = self.project(self.window.cyclic)
        self.window_exact = self.window.boundary <= self.sub

    @property
    def dim(self) -> int:
        return self.left.dim

    def project(self, v: Sequence) -> tuple:
        """Image of a vector of the window ``A/Am``."""
        return self.sub.quotient_coordinates(v)

    def coset(self, x) -> tuple:
        return self.project(self.window.coset(x))

    def representative(self, vec: Sequence) -> tuple:
        """A window vector projecting to ``vec``."""
        out = [ZERO] * self.window.dim
        for c, a in zip(self.sub.complement_columns(), vec):
            out[c] = a
        return tuple(out)

    def refines(self, other: "DoubleQuotient") -> bool:
        """Whether ``other`` is a coarser stage, so that a stage map exists."""
        g = self.pp.gamma
        return (_ideal(g, self.right_word) <= _ideal(g, other.right_word)
                and _ideal(g, self.left_word) <= _ideal(g, other.left_word))

    def stage_map(self, other: "DoubleQuotient") -> Matrix:
        """The projection onto the coarser stage ``other``."""
        if not self.refines(other):
            raise StageError("the target stage is not coarser")
        cols = [other.coset(self.window.lift(self.representative(unit_vector(self.dim, k))))
                for k in range(self.dim)]
        return Matrix.from_columns(cols, other.dim)

    def annihilation_defects(self) -> list[str]:
        """Check ``n . space = 0`` on the left and ``space . m = 0`` on the right."""
        g = self.pp.gamma
        out = []
        full = Subspace.full(self.dim)
        left = apply_word(self.left, [_max(g, x) for x in self.left_word], full)
        if self.left_word and not left.is_zero():
            out.append("left word does not annihilate")
        right = apply_word(self.right, [_max(g, x) for x in self.right_word], full)
        if self.right_word and not right.is_zero():
            out.append("right word does not annihilate")
        return out

    def key(self) -> tuple:
        return (self.right_word, self.left_word)


def _max(gamma: Algebra, label: str):
    return gamma.max_ideal(label)


_DQ_CACHE: dict = {}


def double_quotient(pp: PairPresentation, m: Sequence[str], n: Sequence[str]
                    ) -> DoubleQuotient:
    key = (id(pp.family), tuple(m), tuple(n))
    hit = _DQ_CACHE.get(key)
    if hit is None or hit.pp.family is not pp.family:
        hit = _DQ_CACHE[key] = DoubleQuotient(pp, m, n)
    return hit


@dataclass(frozen=True)
class StageElement:
    stage: DoubleQuotient
    vec: tuple

    def __add__(self, other: "StageElement") -> "StageElement":
        if other.stage is not self.stage:
            raise StageError("elements of different stages")
        return StageElement(self.stage, vadd(self.vec, other.vec))

    def scale(self, a) -> "StageElement":
        return StageElement(self.stage, vscale(a, self.vec))


def unit_element(pp: PairPresentation, rel: Relation, m: Sequence[str],
                 n: Sequence[str]) -> StageElement:
    """The identity of ``A(B, B)`` at the stage ``(m, n)``."""
    if word_block(rel, m) != word_block(rel, n):
        raise StageError("the identity exists only for A(B, B)")
    dq = double_quotient(pp, m, n)
    return StageElement(dq, dq.unit_coset)


def gamma_element(pp: PairPresentation, m: Sequence[str], n: Sequence[str],
                  g: Sequence) -> StageElement:
    dq = double_quotient(pp, m, n)
    return StageElement(dq, dq.coset(pp.family.embed(g)))


# ---------------------------------------------------------------- block pieces

def left_piece(pp: PairPresentation, rel: Relation, m: Sequence[str],
               cls: Sequence[str]) -> tuple[QuotientModule, Subspace]:
    """``(A/Am)(C)`` inside the left window."""
    q = pp.quotient(tuple(m), "left")
    return q, _piece(q.module, rel, cls)


def right_piece(pp: PairPresentation, rel: Relation, l: Sequence[str],
                cls: Sequence[str]) -> tuple[QuotientModule, Subspace]:
    """``(A/lA)(C)`` inside the right window."""
    q = pp.quotient(tuple(l), "right")
    return q, _piece(q.module, rel, cls)


_PIECES: dict = {}


def _piece(mod: Module, rel: Relation, cls) -> Subspace:
    key = (id(mod), rel.classes, tuple(cls))
    hit = _PIECES.get(key)
    if hit is None or hit[0] is not mod:
        part = block_decompose(mod, rel)
        if not part.is_total():
            raise NotStrongError("window is not a block module")
        hit = _PIECES[key] = (mod, part.pieces.get(tuple(cls), Subspace.zero(mod.dim)))
    return hit[1]


def joint_separating_word(lefts: Sequence[tuple[Module, Subspace]],
                          rights: Sequence[tuple[Module, Subspace]],
                          members, bound: int | None = None) -> Word:
    """Least shortest word killing every left piece and every right piece."""
    def combine(pairs, side):
        mods = [m for m, _ in pairs]
        total = direct_sum(mods)
        vecs, off = [], 0
        for mod, sp in pairs:
            for b in sp.basis:
                vecs.append((ZERO,) * off + tuple(b) + (ZERO,) * (total.dim - off - mod.dim))
            off += mod.dim
        return total, Subspace.span(vecs, total.dim)
    lm, lp = combine(lefts, "left")
    rm, rp = combine(rights, "right")
    return _separating_word(lm, lp, rm, rp, members, bound)


@dataclass
class SeparationReport:
    word: Word
    left_dim: int
    right_dim: int
    left_iso: bool
    right_iso: bool


def separating_word(pp: PairPresentation, rel: Relation, m: Sequence[str],
                    l: Sequence[str], cls: Sequence[str]) -> SeparationReport:
    """``n`` in the words of ``C`` with ``n (A/Am)(C) = 0`` and ``(A/lA)(C) n = 0``.

    Also checks that ``(A/Am)(C) -> A/(nA + Am)`` and
    ``(A/lA)(C) -> A/(lA + An)`` are bijective.
    """
    cls = tuple(cls)
    lq, lc = left_piece(pp, rel, m, cls)
    rq, rc = right_piece(pp, rel, l, cls)
    word = joint_separating_word([(lq.module, lc)], [(rq.module, rc)],
                                 rel.members(cls))
    left_iso = _left_iso(pp, m, word, lc)
    right_iso = _right_iso(pp, l, word, rq, rc)
    return SeparationReport(word, lc.dim, rc.dim, left_iso, right_iso)


def _left_iso(pp, m, n, lc: Subspace) -> bool:
    dq = double_quotient(pp, m, n)
    if dq.dim != lc.dim:
        return False
    return lc.dim == 0 or rank(Matrix.from_columns(
        [dq.project(b) for b in lc.basis], dq.dim)) == dq.dim


def _right_iso(pp, l, n, rq: QuotientModule, rc: Subspace) -> bool:
    dq = double_quotient(pp, n, l)
    if dq.dim != rc.dim:
        return False
    if rc.dim == 0:
        return True
    images = [dq.coset(rq.lift(b)) for b in rc.basis]
    if rank(Matrix.from_columns(images, dq.dim)) != dq.dim:
        return False
    # bimodule compatibility on the right: (r g) maps to (image) g
    for i in range(pp.gamma.dim):
        act = rq.module.action(i)
        for b, img in zip(rc.basis, images):
            if dq.coset(rq.lift(act.apply(b))) != dq.right.action(i).apply(img):
                return False
    return True


# ---------------------------------------------------------------- composition

def _solve_in(piece: Subspace, images: list, target: Sequence, what: str) -> tuple:
    if piece.dim == 0:
        if any(target):
            raise StageError(f"{what} is nonzero but the block piece is zero")
        return ()
    sol = solve(Matrix.from_columns(images, len(target)), target)
    if sol is None:
        raise StageError(f"{what} is not in the image of its block piece")
    return sol


def compose(beta: StageElement, alpha: StageElement, rel: Relation,
            perturb: Sequence | None = None) -> StageElement:
    """``(beta o alpha)_{m,l} = b0 a0 + lA + Am``.

    ``alpha`` lives at ``(m, n)`` and ``beta`` at ``(n, l)``; ``n`` must kill
    ``(A/Am)(C)`` on the left and ``(A/lA)(C)`` on the right.  ``a0`` and ``b0``
    are lifted from those block pieces.  ``perturb`` is an optional element of
    ``lA`` added to ``b0``.
    """
    pp = alpha.stage.pp
    m, n = alpha.stage.right_word, alpha.stage.left_word
    if beta.stage.right_word != n:
        raise StageError("middle words do not match")
    l = beta.stage.left_word
    cls = word_block(rel, n)
    members = rel.members(cls)
    by = {x.label: x for x in members}
    lq, lc = left_piece(pp, rel, m, cls)
    rq, rc = right_piece(pp, rel, l, cls)
    word = [by[x] for x in n]
    if not apply_word(lq.module, word, lc).is_zero() or \
            not apply_word(rq.module, word, rc).is_zero():
        raise StageError(f"middle word {n} does not separate the outer pair")
    ya = _solve_in(lc, [alpha.stage.project(b) for b in lc.basis], alpha.vec, "alpha")
    y = lc.from_coordinates(ya) if lc.dim else (ZERO,) * lq.dim
    zb = _solve_in(rc, [beta.stage.coset(rq.lift(b)) for b in rc.basis], beta.vec, "beta")
    z = rc.from_coordinates(zb) if rc.dim else (ZERO,) * rq.dim
    fam = pp.family
    b0 = rq.lift(z)
    if perturb is not None:
        b0 = fam.add(b0, perturb)
    target = double_quotient(pp, m, l)
    return StageElement(target, target.project(lq.act(b0, y)))


def preimage(elem: StageElement, finer: DoubleQuotient, rel: Relation) -> StageElement:
    """The unique element of a finer stage over ``elem`` when both are block-stable."""
    if not finer.refines(elem.stage):
        raise StageError("the given stage is not finer")
    smap = finer.stage_map(elem.stage)
    sol = solve(smap, elem.vec)
    if sol is None:
        raise StageError("element has no preimage")
    if rank(smap) != finer.dim:
        raise StageError("stage map is not injective; preimage is not unique")
    return StageElement(finer, sol)


def random_stage_element(dq: DoubleQuotient, rng: random.Random,
                         span: int = 3) -> StageElement:
    from fractions import Fraction
    return StageElement(dq, tuple(Fraction(rng.randint(-span, span))
                                  for _ in range(dq.dim)))


def random_ideal_element(pp: PairPresentation, word: Sequence[str], rng: random.Random,
                         multiplier):
    """An element ``g r`` of ``lA`` for a random ``g`` in the word's ideal."""
    from fractions import Fraction
    fam = pp.family
    basis = _ideal(pp.gamma, word).space.basis
    g = tuple(ZERO for _ in range(pp.gamma.dim))
    for b in basis:
        g = vadd(g, vscale(Fraction(rng.randint(-2, 2)), b))
    return fam.mul(fam.embed(g), multiplier)


# ---------------------------------------------------------------- law checks

@dataclass
class LawResult:
    name: str
    ok: bool
    detail: str = ""


def settle_words(pp: PairPresentation, rel: Relation, m: Sequence[str],
                 k: Sequence[str], mid: Sequence[str], last: Sequence[str],
                 rounds: int = 6) -> tuple[Word, Word]:
    """Middle words ``n`` (class ``mid``) and ``l`` (class ``last``) for a triple.

    ``n`` separates ``(m, l)`` and ``(m, k)``; ``l`` separates ``(m, k)`` and
    ``(n, k)``.  Found by alternating until stable.
    """
    mid, last = tuple(mid), tuple(last)
    n: Word = ()
    l: Word = ()
    for _ in range(rounds):
        lefts_n = [left_piece(pp, rel, m, mid)]
        rights_n = [right_piece(pp, rel, k, mid)]
        if l:
            rights_n.append(right_piece(pp, rel, l, mid))
        n2 = joint_separating_word([(q.module, s) for q, s in lefts_n],
                                   [(q.module, s) for q, s in rights_n],
                                   rel.members(mid))
        lefts_l = [left_piece(pp, rel, m, last)]
        if n2:
            lefts_l.append(left_piece(pp, rel, n2, last))
        rights_l = [right_piece(pp, rel, k, last)]
        l2 = joint_separating_word([(q.module, s) for q, s in lefts_l],
                                   [(q.module, s) for q, s in rights_l],
                                   rel.members(last))
        if (n2, l2) == (n, l):
            return n, l
        n, l = n2, l2
    raise StageError("separating words did not stabilise")


def check_unit(beta: StageElement, m: Sequence[str], rel: Relation) -> LawResult:
    """``beta o 1 = beta`` with ``1`` at ``(m, n)``, compared at the stage ``(m, l)``.

    ``beta`` lives at ``(n, l)`` and ``n`` must refine ``m``.
    """
    pp = beta.stage.pp
    n, l = beta.stage.right_word, beta.stage.left_word
    one = unit_element(pp, rel, m, n)
    try:
        got = compose(beta, one, rel)
        want = beta.stage.stage_map(double_quotient(pp, m, l)).apply(beta.vec)
    except StageError as exc:
        return LawResult("unit", False, str(exc))
    return LawResult("unit", got.vec == want)


def check_gamma_action(alpha: StageElement, g: Sequence, l: Sequence[str],
                       rel: Relation) -> LawResult:
    """``(g) o alpha = g . alpha`` with ``g . alpha`` computed through the Gamma matrices."""
    pp = alpha.stage.pp
    m, n = alpha.stage.right_word, alpha.stage.left_word
    cls = word_block(rel, n)
    beta = gamma_element(pp, n, l, g)
    got = compose(beta, alpha, rel)
    lq, lc = left_piece(pp, rel, m, cls)
    ya = _solve_in(lc, [alpha.stage.project(b) for b in lc.basis], alpha.vec, "alpha")
    y = lc.from_coordinates(ya) if lc.dim else (ZERO,) * lq.dim
    target = double_quotient(pp, m, l)
    want = target.project(lq.module.act(g, y))
    return LawResult("gamma action", got.vec == want)


def check_independence(beta: StageElement, alpha: StageElement, rel: Relation,
                       rng: random.Random) -> LawResult:
    """Recompute with ``b0 + g r`` (``g`` in ``l``) and with the longer middle word ``n m0``."""
    pp = alpha.stage.pp
    base = compose(beta, alpha, rel)
    l = beta.stage.left_word
    fam = pp.family
    r = fam.one()
    rq = pp.quotient(l, "right")
    if rq.dim:
        r = fam.add(r, rq.lift(tuple(rng.randint(-2, 2) for _ in range(rq.dim))))
    bump = random_ideal_element(pp, l, rng, r) if l else None
    again = compose(beta, alpha, rel, perturb=bump)
    if again.vec != base.vec:
        return LawResult("independence", False, "perturbed b0 changed the result")
    m, n = alpha.stage.right_word, alpha.stage.left_word
    if not n:
        return LawResult("independence", True, "empty middle word")
    longer = n + (n[0],)
    try:
        alpha2 = preimage(alpha, double_quotient(pp, m, longer), rel)
        beta2 = preimage(beta, double_quotient(pp, longer, l), rel)
    except StageError as exc:
        return LawResult("independence", False, str(exc))
    third = compose(beta2, alpha2, rel)
    return LawResult("independence", third.vec == base.vec)


def check_associativity(delta: StageElement, beta: StageElement, alpha: StageElement,
                        rel: Relation) -> LawResult:
    lhs = compose(delta, compose(beta, alpha, rel), rel)
    # (delta o beta) lives at (n, k); compose it with alpha through n
    db = compose(delta, beta, rel)
    rhs = compose(db, alpha, rel)
    return LawResult("associativity", lhs.vec == rhs.vec and
                     lhs.stage.key() == rhs.stage.key())


# ---------------------------------------------------------------- cyclicity

@dataclass
class CyclicityResult:
    stage: tuple
    dim: int
    left: bool
    right: bool
    witness: tuple | None = None


def cyclicity_check(stages: Sequence[DoubleQuotient]) -> list[CyclicityResult]:
    out = []
    for dq in stages:
        left = dq.left.spin([dq.unit_coset]).dim == dq.dim if dq.dim else True
        right = dq.right.spin([dq.unit_coset]).dim == dq.dim if dq.dim else True
        witness = None
        if not (left and right):
            span = dq.left.spin([dq.unit_coset]) if not left else \
                dq.right.spin([dq.unit_coset])
            col = next(c for c in range(dq.dim)
                       if not span.contains(unit_vector(dq.dim, c)))
            witness = unit_vector(dq.dim, col)
        out.append(CyclicityResult(dq.key(), dq.dim, left, right, witness))
    return out


def block_words(rel: Relation, cls: Sequence[str], max_len: int,
                max_exp: int | None = None) -> list[Word]:
    """All words of length 1..max_len over ``cls`` with each letter used at most ``max_exp`` times."""
    import itertools
    out = []
    for n in range(1, max_len + 1):
        for w in itertools.product(tuple(cls), repeat=n):
            if max_exp is None or all(w.count(x) <= max_exp for x in cls):
                out.append(w)
    return out


# ---------------------------------------------------------------- completions

class CompletionStage:
    """``Gamma/w`` for a word ``w`` of one block, with its maximal-ideal quotients."""

    def __init__(self, gamma: Algebra, rel: Relation, word: Sequence[str]):
        self.gamma = gamma
        self.word = tuple(word)
        self.block = word_block(rel, word)
        self.ideal = _ideal(gamma, word)
        self.quotient = quotient_algebra(gamma, self.ideal)
        self.members = [m for m in rel.members(self.block)
                        if self.ideal <= m.ideal]

    @property
    def algebra(self) -> Algebra:
        return self.quotient.algebra

    def projection_to(self, coarser: "CompletionStage") -> Matrix:
        if not self.ideal <= coarser.ideal:
            raise StageError("the target stage is not coarser")
        cols = [coarser.quotient.project(self.quotient.lift(unit_vector(self.algebra.dim, k)))
                for k in range(self.algebra.dim)]
        return Matrix.from_columns(cols, coarser.algebra.dim)


def completion_stage(gamma: Algebra, rel: Relation, word: Sequence[str]) -> CompletionStage:
    return CompletionStage(gamma, rel, word)


@dataclass
class RadicalResult:
    kernels: Subspace
    trace: Subspace
    lifted: Subspace

    @property
    def agree(self) -> bool:
        return self.kernels == self.trace == self.lifted


def radical_stage(stage: CompletionStage) -> RadicalResult:
    """The stage radical three ways: kernels of ``Gamma/w -> Gamma/m``, trace form,
    and the image of ``Rad Gamma``."""
    q = stage.quotient
    dim = q.algebra.dim
    ker = Subspace.full(dim)
    for m in stage.members:
        img = Subspace.span((q.project(b) for b in m.ideal.space.basis), dim)
        ker = subspace_intersect(ker, img)
    trace = radical(q.algebra).space
    lifted = Subspace.span((q.project(b) for b in radical(stage.gamma).space.basis), dim)
    return RadicalResult(ker, trace, lifted)


def quasiregular_inverse(alg: Algebra, x: Sequence) -> tuple:
    """``p_k(x) = 1 + x + ... + x^(k-1)`` for nilpotent ``x``; then ``(1 - x) p_k(x) = 1``."""
    total = alg.unit
    power = alg.unit
    for _ in range(alg.dim + 1):
        power = alg.mul(power, x)
        if not any(power):
            return total
        total = vadd(total, power)
    raise StageError("element is not nilpotent")


def quasiregular_check(stage: CompletionStage) -> bool:
    alg = stage.algebra
    rad = radical_stage(stage).trace
    for x in rad.basis:
        inv = quasiregular_inverse(alg, x)
        one_minus = tuple(u - a for u, a in zip(alg.unit, x))
        if alg.mul(one_minus, inv) != alg.unit or alg.mul(inv, one_minus) != alg.unit:
            return False
    return True


@dataclass
class SemisimpleResult:
    stage_dim: int
    semisimple_dim: int
    expected_dim: int
    simple_count: int
    ok: bool


def semisimple_stage_check(stage: CompletionStage) -> SemisimpleResult:
    alg = stage.algebra
    rad = radical(alg)
    top = quotient_algebra(alg, rad).algebra
    expected = sum(m.codim for m in stage.members)
    count = len(cfs(top))
    ok = top.dim == expected and count == len(stage.members) and \
        radical(top).dim == 0
    return SemisimpleResult(alg.dim, top.dim, expected, count, ok)


@dataclass
class BadicResult:
    level: int
    block: tuple
    product_dim: int
    intersection_dim: int
    deep_dim: int
    forward_contained: bool
    backward_contained: bool
    composites_ok: bool

    @property
    def ok(self) -> bool:
        return self.forward_contained and self.backward_contained and self.composites_ok


def badic_stage_check(gamma: Algebra, rel: Relation, cls: Sequence[str], level: int,
                      max_order: int | None = None) -> BadicResult:
    """Compare ``(m1...mk)^n`` with ``b^n`` and ``b^(nk)`` for ``b`` the intersection.

    ``Gamma/(m1...mk)^n -> Gamma/b^n`` and ``Gamma/b^(nk) -> Gamma/(m1...mk)^n``
    are the canonical projections; both composites must be canonical too.
    """
    cls = tuple(cls)
    members = rel.members(cls)
    k = len(members)
    if max_order is not None and level * k > max_order:
        raise StageError(f"level {level} needs order {level * k} > {max_order}")
    prod = members[0].ideal
    inter = members[0].ideal
    for m in members[1:]:
        prod = ideal_product(prod, m.ideal)
        inter = ideal_intersect(inter, m.ideal)
    pn = ideal_power(prod, level)
    bn = ideal_power(inter, level)
    bnk = ideal_power(inter, level * k)
    forward = pn <= bn
    backward = bnk <= pn
    composites = False
    if forward and backward:
        q_p = quotient_algebra(gamma, pn)
        q_b = quotient_algebra(gamma, bn)
        q_d = quotient_algebra(gamma, bnk)

        def canonical(src, dst) -> Matrix:
            return Matrix.from_columns(
                [dst.project(src.lift(unit_vector(src.algebra.dim, j)))
                 for j in range(src.algebra.dim)], dst.algebra.dim)
        phi = canonical(q_p, q_b)
        psi = canonical(q_d, q_p)
        composites = phi @ psi == canonical(q_d, q_b)
    return BadicResult(level, cls, pn.dim, bn.dim, bnk.dim, forward, backward, composites)
