"""Ext quivers, block relations, block spaces and block decompositions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from .algebra import (Algebra, AlgebraError, Ideal, MaxIdeal, Module,
                      ideal_product)
from .linalg import (ZERO, Matrix, Subspace, _Echelon, guard, subspace_sum)


class BlockError(ValueError):
    pass


class NotStrongError(BlockError):
    """No annihilating word exists within the search bound."""


# ---------------------------------------------------------------- Ext

def ext1_dim(s: MaxIdeal, t: MaxIdeal) -> int:
    """Dimension of Ext^1(S_s, S_t): extensions with quotient S_s and sub S_t.

    Cocycles are maps ``f`` from the algebra to ``Hom(S_s, S_t)`` with
    ``f(ab) = t(a) f(b) + f(a) s(b)``; coboundaries are ``t(a) h - h s(a)``.
    """
    if s.algebra is not t.algebra:
        raise AlgebraError("ideals belong to different algebras")
    alg = s.algebra
    u, w = s.simple, t.simple
    du, dw = u.dim, w.dim
    block = du * dw
    n = alg.dim
    nvars = n * block
    guard(nvars, "cocycle system")

    def var(i, a, b):
        return i * block + a * du + b

    uact = [u.action(i).rows for i in range(n)]
    wact = [w.action(i).rows for i in range(n)]
    ech = _Echelon(nvars)
    for i in range(n):
        for j in range(n):
            pij = alg.products[i][j]
            for a in range(dw):
                for b in range(du):
                    row = [ZERO] * nvars
                    for k, c in pij:
                        row[var(k, a, b)] += c
                    wi = wact[i][a]
                    for k in range(dw):
                        if wi[k]:
                            row[var(j, k, b)] -= wi[k]
                    uj = uact[j]
                    for k in range(du):
                        if uj[k][b]:
                            row[var(i, a, k)] -= uj[k][b]
                    if any(row):
                        ech.add(row)
    basis, _ = ech.basis()
    cocycles = nvars - len(basis)
    cob = []
    for a in range(dw):
        for b in range(du):
            vec = [ZERO] * nvars
            for i in range(n):
                wi, ui = wact[i], uact[i]
                for r in range(dw):
                    for c in range(du):
                        val = ZERO
                        if c == b:
                            val += wi[r][a]
                        if r == a:
                            val -= ui[b][c]
                        if val:
                            vec[var(i, r, c)] = val
            cob.append(vec)
    boundaries = Subspace.span(cob, nvars).dim
    return cocycles - boundaries


@dataclass(frozen=True)
class ExtQuiver:
    vertices: tuple[str, ...]
    edge_dims: dict

    def edges(self) -> list[tuple[str, str, int]]:
        return [(a, b, d) for (a, b), d in sorted(self.edge_dims.items()) if d]


def ext_quiver(alg: Algebra) -> ExtQuiver:
    ideals = alg.cfs()
    dims = {(s.label, t.label): ext1_dim(s, t) for s in ideals for t in ideals}
    return ExtQuiver(tuple(m.label for m in ideals), dims)


# ---------------------------------------------------------------- relations

@dataclass(frozen=True)
class Relation:
    """An equivalence relation on the maximal ideals, stored as its classes."""

    kind: str
    vertices: tuple[MaxIdeal, ...]
    classes: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        labels = [m.label for m in self.vertices]
        flat = [x for c in self.classes for x in c]
        if sorted(flat) != sorted(labels) or len(set(flat)) != len(flat):
            raise BlockError("relation classes do not partition the maximal ideals")

    def class_of(self, label: str) -> tuple[str, ...]:
        for c in self.classes:
            if label in c:
                return c
        raise KeyError(label)

    def members(self, cls: Sequence[str]) -> list[MaxIdeal]:
        if tuple(cls) not in self.classes:
            raise BlockError(f"{tuple(cls)} is not a class of the relation")
        by = {m.label: m for m in self.vertices}
        return [by[x] for x in cls]

    def ideal(self, label: str) -> MaxIdeal:
        for m in self.vertices:
            if m.label == label:
                return m
        raise KeyError(label)

    @property
    def algebra(self) -> Algebra:
        return self.vertices[0].algebra


def _canonical_classes(vertices: Sequence[MaxIdeal], groups: Iterable[Iterable[str]]):
    order = {m.label: k for k, m in enumerate(vertices)}
    classes = [tuple(sorted(g, key=order.__getitem__)) for g in groups]
    classes.sort(key=lambda c: order[c[0]])
    return tuple(classes)


def equality_relation(alg: Algebra) -> Relation:
    vs = tuple(alg.cfs())
    return Relation("equality", vs, tuple((m.label,) for m in vs))


def ext_relation(alg: Algebra, quiver: ExtQuiver | None = None) -> Relation:
    quiver = quiver or ext_quiver(alg)
    g = nx.Graph()
    g.add_nodes_from(quiver.vertices)
    g.add_edges_from((a, b) for (a, b), d in quiver.edge_dims.items() if d and a != b)
    vs = tuple(alg.cfs())
    return Relation("ext", vs, _canonical_classes(vs, nx.connected_components(g)))


def user_relation(alg: Algebra, classes: Iterable[Iterable[str]]) -> Relation:
    vs = tuple(alg.cfs())
    return Relation("user", vs, _canonical_classes(vs, classes))


def refines(fine: Relation, coarse: Relation) -> bool:
    return all(any(set(c) <= set(d) for d in coarse.classes) for c in fine.classes)


# ---------------------------------------------------------------- words

@dataclass(frozen=True)
class IdealWord:
    """A product of maximal ideals, all from one block."""

    block: tuple[str, ...]
    factors: tuple[str, ...]

    def __post_init__(self):
        bad = [f for f in self.factors if f not in self.block]
        if bad:
            raise BlockError(f"factors {bad} lie outside the block {self.block}")

    def __str__(self) -> str:
        return "*".join(self.factors) or "1"

    def __len__(self) -> int:
        return len(self.factors)

    def __mul__(self, other: "IdealWord") -> "IdealWord":
        return IdealWord(self.block, self.factors + other.factors)


def word_ideal(alg: Algebra, word: IdealWord | Sequence[str]) -> Ideal:
    factors = word.factors if isinstance(word, IdealWord) else tuple(word)
    out = alg.whole()
    for f in factors:
        out = ideal_product(out, alg.max_ideal(f).ideal)
    return out


def apply_word(v: Module, factors: Sequence[MaxIdeal], u: Subspace | None = None
               ) -> Subspace:
    """``w U`` for a left module or ``U w`` for a right module."""
    u = Subspace.full(v.dim) if u is None else u
    seq = reversed(factors) if v.side == "left" else factors
    for m in seq:
        if u.is_zero():
            break
        u = v.image(m.ideal, u)
    return u


def block_space(v: Module, cls: Sequence[str], rel: Relation) -> Subspace:
    """Vectors killed by some word of the block (left or right action)."""
    members = rel.members(cls)
    cur = Subspace.zero(v.dim)
    stable = 0
    while stable < len(members):
        for m in members:
            nxt = v.preimage(m.ideal, cur)
            if nxt == cur:
                stable += 1
            else:
                stable = 0
                cur = nxt
            if stable >= len(members):
                break
    return cur


def stable_image(v: Module, cls: Sequence[str], rel: Relation) -> Subspace:
    """Limit of the descending chain of images under the block's ideals."""
    members = rel.members(cls)
    cur = Subspace.full(v.dim)
    stable = 0
    while stable < len(members):
        for m in members:
            nxt = v.image(m.ideal, cur)
            if nxt == cur:
                stable += 1
            else:
                stable = 0
                cur = nxt
            if stable >= len(members):
                break
    return cur


@dataclass
class BlockPartition:
    module: Module
    relation: Relation
    pieces: dict  # class -> Subspace (nonzero only)
    residual: Subspace
    independent: bool = True

    @property
    def support(self) -> list[tuple[str, ...]]:
        return list(self.pieces)

    def is_total(self) -> bool:
        return self.independent and self.residual.is_zero()

    def projections(self) -> dict:
        """Coordinates of a vector in each piece; requires a total partition."""
        if not self.is_total():
            raise BlockError("block projections need a total decomposition")
        cols = [b for sp in self.pieces.values() for b in sp.basis]
        m = Matrix.from_columns(cols, self.module.dim) if cols else None
        return _Projector(self.pieces, m)


class _Projector:
    def __init__(self, pieces: dict, m: Matrix | None):
        from .linalg import inverse
        self.pieces = pieces
        self.inv = inverse(m) if m is not None else None

    def split(self, v: Sequence) -> dict:
        """Component of ``v`` in each piece, as ambient vectors."""
        if self.inv is None:
            return {}
        coords = self.inv.apply(v)
        out = {}
        k = 0
        for cls, sp in self.pieces.items():
            c = coords[k:k + sp.dim]
            k += sp.dim
            out[cls] = sp.from_coordinates(c)
        return out


def block_decompose(v: Module, rel: Relation) -> BlockPartition:
    pieces = {}
    for cls in rel.classes:
        sp = block_space(v, cls, rel)
        if not sp.is_zero():
            pieces[cls] = sp
    total = Subspace.span((b for sp in pieces.values() for b in sp.basis), v.dim)
    independent = total.dim == sum(sp.dim for sp in pieces.values())
    residual = Subspace.span((tuple(1 if i == j else 0 for i in range(v.dim))
                              for j in total.complement_columns()), v.dim)
    return BlockPartition(v, rel, pieces, residual, independent)


def support(v: Module, rel: Relation) -> list[tuple[str, ...]]:
    return block_decompose(v, rel).support


def _kills(v: Module, members: Sequence[MaxIdeal], word: Sequence[int],
           u: Subspace) -> bool:
    return apply_word(v, [members[k] for k in word], u).is_zero()


def shortest_annihilating_word(v: Module, u: Subspace, members: Sequence[MaxIdeal],
                               bound: int | None = None) -> tuple[str, ...]:
    """Lexicographically least among the shortest words ``w`` with ``w U = 0``.

    Letters are the block's ideals in the given order.  For left modules the
    rightmost letter acts first; the search keeps one word per reached
    subspace.
    """
    bound = v.dim + 1 if bound is None else bound
    if u.is_zero():
        return ()
    states = {u: ()}
    seen = {u}
    for _ in range(bound):
        nxt: dict[Subspace, tuple] = {}
        for state, word in sorted(states.items(), key=lambda kv: kv[1]):
            for k, m in enumerate(members):
                img = v.image(m.ideal, state)
                w = (k,) + word if v.side == "left" else word + (k,)
                if img.is_zero():
                    best = nxt.get(img)
                    if best is None or w < best:
                        nxt[img] = w
                    continue
                if img in seen:
                    continue
                best = nxt.get(img)
                if best is None or w < best:
                    nxt[img] = w
        zero = Subspace.zero(v.dim)
        if zero in nxt:
            return tuple(members[k].label for k in nxt[zero])
        seen.update(nxt)
        states = nxt
        if not states:
            break
    raise NotStrongError(f"no annihilating word of length <= {bound}")


@dataclass
class StrongReport:
    strong: bool
    words: dict  # class -> tuple of labels
    partition: BlockPartition


def is_strong(v: Module, rel: Relation, partition: BlockPartition | None = None
              ) -> StrongReport:
    part = partition or block_decompose(v, rel)
    words = {}
    ok = part.is_total()
    for cls, sp in part.pieces.items():
        try:
            words[cls] = shortest_annihilating_word(v, sp, rel.members(cls))
        except NotStrongError:
            ok = False
    return StrongReport(ok, words, part)


@dataclass
class FittingSplit:
    block: tuple[str, ...]
    block_space: Subspace
    complement: Subspace
    word: tuple[str, ...]


def fitting_split(v: Module, cls: Sequence[str], rel: Relation) -> FittingSplit:
    """``V = V(B) + V'`` with every ideal of the block acting onto ``V'``."""
    cls = tuple(cls)
    members = rel.members(cls)
    vb = block_space(v, cls, rel)
    vp = stable_image(v, cls, rel)
    if subspace_sum(vb, vp).dim != v.dim or vb.dim + vp.dim != v.dim:
        raise BlockError("block space and stable image do not split the module")
    for m in members:
        if v.image(m.ideal, vp) != vp:
            raise BlockError(f"{m.label} does not act onto the complement")
    word = shortest_annihilating_word(v, vb, members) if vb.dim else ()
    by = {m.label: m for m in members}
    if not apply_word(v, [by[x] for x in word], vb).is_zero():
        raise BlockError("annihilating word does not kill the block space")
    return FittingSplit(cls, vb, vp, word)


def separating_word(left: Module, left_piece: Subspace, right: Module,
                    right_piece: Subspace, members: Sequence[MaxIdeal],
                    bound: int | None = None) -> tuple[str, ...]:
    """Least shortest word ``n`` with ``n L = 0`` (left) and ``R n = 0`` (right).

    Words are enumerated lexicographically by length; left images are cached
    by suffix and right images by prefix.
    """
    if left.side != "left" or right.side != "right":
        raise BlockError("separating_word needs a left and a right module")
    bound = left_piece.dim + right_piece.dim + 1 if bound is None else bound
    lcache = {(): left_piece}
    rcache = {(): right_piece}

    def lstate(w):
        s = lcache.get(w)
        if s is None:
            inner = lstate(w[1:])
            s = inner if inner.is_zero() else left.image(members[w[0]].ideal, inner)
            lcache[w] = s
        return s

    def rstate(w):
        s = rcache.get(w)
        if s is None:
            inner = rstate(w[:-1])
            s = inner if inner.is_zero() else right.image(members[w[-1]].ideal, inner)
            rcache[w] = s
        return s

    for length in range(bound + 1):
        for w in itertools.product(range(len(members)), repeat=length):
            if lstate(w).is_zero() and rstate(w).is_zero():
                return tuple(members[k].label for k in w)
    raise NotStrongError(f"no separating word of length <= {bound}")
