"""Harish-Chandra analysis of a pair Gamma <= A.

``A`` is either a concrete finite-dimensional algebra with an embedding of
``Gamma`` or a family of truncated quotient windows.  Both present the same
interface: for an ideal word ``w`` they produce ``A/Aw`` as a left
Gamma-module and ``A/wA`` as a right Gamma-module, each with the coset of 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import networkx as nx

from .algebra import (Algebra, Module, composition_factors,
                      module_defect)
from .blocks import (BlockPartition, Relation, apply_word, block_decompose,
                     is_strong, word_ideal)
from .linalg import (ZERO, Matrix, Subspace, subspace_intersect)


class PresentationError(ValueError):
    pass


class InvarianceError(RuntimeError):
    """A decomposition summand is not invariant; carries a witness vector."""

    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------- presentations

class QuotientModule:
    """``A/Aw`` (side ``left``) or ``A/wA`` (side ``right``) with its Gamma actions.

    ``module`` is the Gamma-action on the quotient's own side and
    ``opposite`` the commuting Gamma-action on the other side.
    """

    side: str
    module: Module
    opposite: Module
    cyclic: tuple
    boundary: Subspace

    @property
    def dim(self) -> int:
        return self.module.dim

    def coset(self, x) -> tuple:
        raise NotImplementedError

    def lift(self, v: Sequence):
        raise NotImplementedError

    def act(self, x, v: Sequence) -> tuple:
        """``x v`` on a left quotient, ``v x`` on a right one."""
        raise NotImplementedError


class QuotientFamily:
    """Source of quotient modules of a (possibly infinite-dimensional) ``A``."""

    gamma: Algebra
    window_exact = False

    def quotient(self, factors: tuple[str, ...], side: str) -> QuotientModule:
        raise NotImplementedError

    def embed(self, g: Sequence):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def scale(self, a, x):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError


class _ConcreteQuotient(QuotientModule):
    def __init__(self, fam: "ConcreteFamily", factors: tuple[str, ...], side: str):
        big, gamma = fam.big, fam.gamma
        ideal = word_ideal(gamma, factors)
        gens = [fam.embed(g) for g in (ideal.left_generators() if side == "left"
                                       else ideal.right_generators())]
        if side == "left":
            vecs = (big.mul(big.basis(k), g) for k in range(big.dim) for g in gens)
        else:
            vecs = (big.mul(g, big.basis(k)) for k in range(big.dim) for g in gens)
        self.fam = fam
        self.side = side
        self.factors = factors
        self.sub = Subspace.span(vecs, big.dim)
        self.cols = self.sub.complement_columns()
        n = len(self.cols)
        own = big.left_matrix if side == "left" else big.right_matrix
        other = big.right_matrix if side == "left" else big.left_matrix

        def make(mult):
            def fn(i):
                m = _mult_matrix(big, mult, fam.embed(gamma.basis(i)))
                return Matrix.from_columns(
                    [self.sub.quotient_coordinates(m.column(c)) for c in self.cols], n)
            return fn
        self.module = Module(gamma, side, n, make(own), check=False)
        oside = "right" if side == "left" else "left"
        self.opposite = Module(gamma, oside, n, make(other), check=False)
        self.cyclic = self.coset(big.unit)
        self.boundary = Subspace.zero(n)

    def coset(self, x) -> tuple:
        return self.sub.quotient_coordinates(x)

    def lift(self, v) -> tuple:
        out = [ZERO] * self.fam.big.dim
        for c, a in zip(self.cols, v):
            out[c] = a
        return tuple(out)

    def act(self, x, v) -> tuple:
        big = self.fam.big
        y = big.mul(x, self.lift(v)) if self.side == "left" else big.mul(self.lift(v), x)
        return self.coset(y)


def _mult_matrix(big: Algebra, mult, x) -> Matrix:
    from .linalg import matrix_sum
    return matrix_sum(((a, mult(i)) for i, a in enumerate(x)), big.dim, big.dim)


class ConcreteFamily(QuotientFamily):
    """``Gamma`` embedded in a finite-dimensional algebra ``big``."""

    window_exact = True

    def __init__(self, big: Algebra, gamma: Algebra, embedding: Matrix,
                 check: bool = True):
        if embedding.shape != (big.dim, gamma.dim):
            raise PresentationError("embedding has the wrong shape")
        self.big = big
        self.gamma = gamma
        self.embedding = embedding
        self._cache: dict = {}
        if check:
            self.check()

    def check(self) -> None:
        from .linalg import rank
        if self.embed(self.gamma.unit) != self.big.unit:
            raise PresentationError("embedding does not preserve the unit")
        if rank(self.embedding) != self.gamma.dim:
            raise PresentationError("embedding has a nonzero kernel")
        g = self.gamma
        for i in range(g.dim):
            for j in range(g.dim):
                lhs = self.embed(g.basis_product(i, j))
                rhs = self.big.mul(self.embed(g.basis(i)), self.embed(g.basis(j)))
                if lhs != rhs:
                    raise PresentationError(
                        f"embedding is not multiplicative at ({i},{j})")

    def embed(self, g) -> tuple:
        return self.embedding.apply(g)

    def quotient(self, factors, side) -> QuotientModule:
        key = (tuple(factors), side)
        q = self._cache.get(key)
        if q is None:
            q = self._cache[key] = _ConcreteQuotient(self, tuple(factors), side)
        return q

    def mul(self, x, y):
        return self.big.mul(x, y)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def scale(self, a, x):
        return tuple(a * b for b in x)

    def one(self):
        return self.big.unit

    def restrict(self, v: Module) -> Module:
        """A module of ``big`` viewed as a Gamma-module."""
        return Module(self.gamma, v.side, v.dim,
                      lambda i: v.matrix(self.embed(self.gamma.basis(i))), check=False)


def self_pair(gamma: Algebra) -> ConcreteFamily:
    from .linalg import Matrix as M
    return ConcreteFamily(gamma, gamma, M.identity(gamma.dim))


@dataclass
class PairPresentation:
    gamma: Algebra
    family: QuotientFamily

    @property
    def concrete(self) -> bool:
        return isinstance(self.family, ConcreteFamily)

    def quotient(self, factors: Sequence[str], side: str = "left") -> QuotientModule:
        return self.family.quotient(tuple(factors), side)


# ---------------------------------------------------------------- supports

@dataclass
class SupportResult:
    word: tuple[str, ...]
    side: str
    support: list
    partition: BlockPartition
    boundary_blocks: list

    @property
    def residual(self) -> Subspace:
        return self.partition.residual


def quotient_support(pp: PairPresentation, factors: Sequence[str], rel: Relation,
                     side: str = "left") -> SupportResult:
    q = pp.quotient(factors, side)
    part = block_decompose(q.module, rel)
    touched = [cls for cls, sp in part.pieces.items()
               if not subspace_intersect(sp, q.boundary).is_zero()]
    return SupportResult(tuple(factors), side, part.support, part, touched)


@dataclass
class WordCheck:
    word: tuple[str, ...]
    side: str
    support: list
    residual_dim: int
    strong: bool
    annihilators: dict
    boundary_blocks: list
    defect: str | None = None


@dataclass
class HCReport:
    verdict: str  # "strong_hc", "hc" or "fail"
    checks: list
    witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": self.witness,
            "checks": [{
                "word": list(c.word), "side": c.side,
                "support": [list(s) for s in c.support],
                "residual_dim": c.residual_dim, "strong": c.strong,
                "annihilators": {"|".join(k): list(v) for k, v in c.annihilators.items()},
                "boundary_blocks": [list(b) for b in c.boundary_blocks],
                "defect": c.defect,
            } for c in self.checks],
        }


def defect_space(part: BlockPartition) -> Subspace:
    """Residual of a partition, or the overlap of its pieces when they are dependent."""
    if not part.residual.is_zero():
        return part.residual
    n = part.module.dim
    pieces = list(part.pieces.values())
    for k, sp in enumerate(pieces):
        others = Subspace.span((b for j, o in enumerate(pieces) if j != k
                                for b in o.basis), n)
        meet = subspace_intersect(sp, others)
        if not meet.is_zero():
            return meet
    return Subspace.zero(n)


def _witness(word, side, reason, part: BlockPartition | None) -> dict:
    basis = defect_space(part).basis if part is not None else ()
    return {"word": list(word), "side": side, "reason": reason,
            "defect": [[str(a) for a in b] for b in basis]}


def verify_hc_subalgebra(pp: PairPresentation, rel: Relation,
                         words: Sequence[Sequence[str]]) -> HCReport:
    """Verdict ``strong_hc``, ``hc`` or ``fail`` over the given words.

    ``hc`` needs every left quotient to be a block module; ``strong_hc`` also
    needs the right quotients and an annihilating word for every piece.  A
    failure carries the first offending word and a defect subspace.
    """
    checks = []
    witness = None
    left_ok = right_ok = strong_ok = True
    for w in words:
        for side in ("left", "right"):
            q = pp.quotient(w, side)
            defect = module_defect(q.module)
            part = block_decompose(q.module, rel)
            total = defect is None and part.is_total()
            if defect is None:
                st = is_strong(q.module, rel, part)
                strong, annihilators = st.strong, st.words
            else:
                strong, annihilators = False, {}
            touched = [cls for cls, sp in part.pieces.items()
                       if not subspace_intersect(sp, q.boundary).is_zero()]
            c = WordCheck(tuple(w), side, part.support, part.residual.dim, strong,
                          annihilators, touched)
            if not total:
                if defect is not None:
                    c.defect = defect[0]
                else:
                    c.defect = "residual" if part.independent else "overlapping blocks"
                if witness is None:
                    witness = _witness(w, side, c.defect, part)
            checks.append(c)
            if side == "left":
                left_ok = left_ok and total
            else:
                right_ok = right_ok and total
            strong_ok = strong_ok and strong
    if not left_ok:
        verdict = "fail"
    elif right_ok and strong_ok:
        verdict = "strong_hc"
    else:
        verdict = "hc"
    return HCReport(verdict, checks, witness)


# ---------------------------------------------------------------- preorder

@dataclass
class BlockPreorder:
    nodes: tuple
    edges: dict  # (B, C) -> word that produced the edge

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    def reachable(self, b) -> set:
        """Classes ``C`` with ``b`` preceding ``C`` (reflexive and transitive)."""
        return nx.descendants(self.graph(), b) | {b}

    def delta(self) -> list[tuple]:
        return _sorted_components(nx.weakly_connected_components(self.graph()), self.nodes)

    def nabla(self) -> list[tuple]:
        return _sorted_components(nx.strongly_connected_components(self.graph()), self.nodes)

    def to_dot(self) -> str:
        def name(b):
            return '"' + "|".join(b) + '"'
        lines = ["digraph preorder {"]
        lines += [f"  {name(b)};" for b in self.nodes]
        for (b, c), w in sorted(self.edges.items()):
            lines.append(f'  {name(b)} -> {name(c)} [label="{"*".join(w)}"];')
        lines.append("}")
        return "\n".join(lines)


def _sorted_components(comps, nodes) -> list[tuple]:
    order = {b: k for k, b in enumerate(nodes)}
    out = [tuple(sorted(c, key=order.__getitem__)) for c in comps]
    out.sort(key=lambda c: order[c[0]])
    return out


def build_preorder(pp: PairPresentation, rel: Relation,
                   generators: Sequence[str] | None = None) -> BlockPreorder:
    gens = list(generators) if generators is not None else \
        [m.label for m in rel.vertices]
    edges = {}
    for g in gens:
        b = rel.class_of(g)
        for c in quotient_support(pp, (g,), rel, "left").support:
            edges.setdefault((b, c), (g,))
    return BlockPreorder(tuple(rel.classes), edges)


def delta_components(p: BlockPreorder) -> list[tuple]:
    return p.delta()


def nabla_components(p: BlockPreorder) -> list[tuple]:
    return p.nabla()


def partition_classes(parts: Sequence[tuple]) -> dict:
    return {b: k for k, part in enumerate(parts) for b in part}


# ---------------------------------------------------------------- concrete checks

def _require_concrete(pp: PairPresentation) -> ConcreteFamily:
    if not isinstance(pp.family, ConcreteFamily):
        raise PresentationError("this check needs a concrete finite-dimensional A")
    return pp.family


@dataclass
class HCDecomposition:
    summands: list  # (delta class, Subspace)
    partition: BlockPartition


def decompose_hc_module(pp: PairPresentation, v: Module, rel: Relation,
                        preorder: BlockPreorder | None = None) -> HCDecomposition:
    """Group the block pieces of ``v`` by Delta-class and check A-invariance."""
    fam = _require_concrete(pp)
    part = block_decompose(fam.restrict(v), rel)
    if not part.is_total():
        raise InvarianceError("module is not a block module",
                              [list(map(str, b)) for b in part.residual.basis])
    preorder = preorder or build_preorder(pp, rel)
    where = partition_classes(preorder.delta())
    groups: dict[int, list] = {}
    for cls, sp in part.pieces.items():
        groups.setdefault(where[cls], []).append(sp)
    summands = []
    deltas = preorder.delta()
    for k in sorted(groups):
        sp = Subspace.span((b for s in groups[k] for b in s.basis), v.dim)
        for i in range(fam.big.dim):
            m = v.action(i)
            for b in sp.basis:
                if not sp.contains(m.apply(b)):
                    raise InvarianceError(
                        f"summand for {deltas[k]} is not invariant under "
                        f"{fam.big.names[i]}", [str(a) for a in b])
        summands.append((deltas[k], sp))
    return HCDecomposition(summands, part)


def containment_witnesses(pp: PairPresentation, v: Module, rel: Relation,
                               preorder: BlockPreorder | None = None) -> list:
    """Triples ``(B, a, C)`` where ``a V(B)`` has a component in ``C`` not above ``B``."""
    fam = _require_concrete(pp)
    part = block_decompose(fam.restrict(v), rel)
    preorder = preorder or build_preorder(pp, rel)
    proj = part.projections()
    bad = []
    for b, sp in part.pieces.items():
        allowed = preorder.reachable(b)
        for i in range(fam.big.dim):
            m = v.action(i)
            for vec in sp.basis:
                for c, comp in proj.split(m.apply(vec)).items():
                    if c not in allowed and any(comp):
                        bad.append((b, fam.big.names[i], c))
    return bad


def naturality_defects(pp: PairPresentation, f: Matrix, u: Module, v: Module,
                       rel: Relation) -> list:
    """Check ``pi_C(a f(x)) = f(pi_C(a x))`` for x in each block piece of ``u``."""
    fam = _require_concrete(pp)
    pu = block_decompose(fam.restrict(u), rel)
    pv = block_decompose(fam.restrict(v), rel)
    su, sv = pu.projections(), pv.projections()
    bad = []
    for b, sp in pu.pieces.items():
        for i in range(fam.big.dim):
            for x in sp.basis:
                left = sv.split(v.action(i).apply(f.apply(x)))
                right = su.split(u.action(i).apply(x))
                for c in set(left) | set(right):
                    lhs = left.get(c, (ZERO,) * v.dim)
                    rhs = f.apply(right[c]) if c in right else (ZERO,) * v.dim
                    if tuple(lhs) != tuple(rhs):
                        bad.append((b, fam.big.names[i], c))
    return bad


@dataclass
class BlockspanResult:
    contained: bool
    generated_dim: int
    support: list
    allowed: list


def verify_blockspan(pp: PairPresentation, v: Module, x: Sequence, factors: Sequence[str],
                     rel: Relation) -> BlockspanResult:
    fam = _require_concrete(pp)
    gv = fam.restrict(v)
    gamma = fam.gamma
    span = Subspace.span([x], v.dim)
    if not apply_word(gv, [gamma.max_ideal(f) for f in factors], span).is_zero():
        raise PresentationError("the word does not annihilate the vector")
    gen = v.spin([x]) if any(x) else Subspace.zero(v.dim)
    sub = gv.submodule(gen)
    supp = block_decompose(sub, rel).support
    allowed = []
    for f in factors:
        for c in quotient_support(pp, (f,), rel, "left").support:
            if c not in allowed:
                allowed.append(c)
    return BlockspanResult(all(c in allowed for c in supp), gen.dim, supp, allowed)


@dataclass
class XSetResult:
    label: str
    xset: list
    supports: dict  # k -> labels in Supp(A/A m^k) under equality
    inclusion: bool


def x_set(pp: PairPresentation, label: str, powers: int = 2) -> XSetResult:
    """Union over basis elements ``a`` of the factors of ``Gamma a Gamma / Gamma a m``."""
    fam = _require_concrete(pp)
    big, gamma = fam.big, fam.gamma
    m = gamma.max_ideal(label)
    gbasis = [fam.embed(gamma.basis(i)) for i in range(gamma.dim)]
    mbasis = [fam.embed(b) for b in m.ideal.space.basis]
    found: list[str] = []
    regular = big.regular_module("left")
    restricted = fam.restrict(regular)
    for k in range(big.dim):
        a = big.basis(k)
        left = [big.mul(g, a) for g in gbasis]
        whole = Subspace.span((big.mul(y, g) for y in left for g in gbasis), big.dim)
        part = Subspace.span((big.mul(y, g) for y in left for g in mbasis), big.dim)
        if whole == part:
            continue
        quot = restricted.submodule(whole).quotient(
            Subspace.span((whole.coordinates(b) for b in part.basis), whole.dim))
        for f in composition_factors(quot):
            if f.label not in found:
                found.append(f.label)
    order = {mm.label: i for i, mm in enumerate(gamma.cfs())}
    found.sort(key=order.__getitem__)
    from .blocks import equality_relation
    eq = equality_relation(gamma)
    supports = {}
    ok = True
    for p in range(1, powers + 1):
        supp = quotient_support(pp, (label,) * p, eq, "left").support
        labels = [c[0] for c in supp]
        supports[p] = labels
        ok = ok and all(s in found for s in labels)
    return XSetResult(label, found, supports, ok)


def irreducible_supports(pp: PairPresentation, rel: Relation,
                         preorder: BlockPreorder | None = None) -> list[tuple]:
    """For each simple ``A``-module: its Gamma-support and whether it sits in one nabla-class."""
    fam = _require_concrete(pp)
    preorder = preorder or build_preorder(pp, rel)
    where = partition_classes(preorder.nabla())
    out = []
    for m in fam.big.cfs():
        supp = block_decompose(fam.restrict(m.simple), rel).support
        out.append((m.label, supp, len({where[c] for c in supp}) <= 1))
    return out


class CorruptedFamily(QuotientFamily):
    """Wraps a family and drops the line of the cyclic vector from every Gamma-action.

    The resulting "modules" violate the unit law; used to exercise failure
    verdicts.
    """

    def __init__(self, base: QuotientFamily):
        self.base = base
        self.gamma = base.gamma

    def quotient(self, factors, side) -> QuotientModule:
        q = self.base.quotient(factors, side)
        return _CorruptedQuotient(q)

    def embed(self, g):
        return self.base.embed(g)

    def mul(self, x, y):
        return self.base.mul(x, y)

    def add(self, x, y):
        return self.base.add(x, y)

    def scale(self, a, x):
        return self.base.scale(a, x)

    def one(self):
        return self.base.one()


class _CorruptedQuotient(QuotientModule):
    def __init__(self, q: QuotientModule):
        self.inner = q
        self.side = q.side
        self.cyclic = q.cyclic
        self.boundary = q.boundary
        drop = {k for k, a in enumerate(q.cyclic) if a}

        def fn(i):
            m = q.module.action(i)
            rows = [[ZERO if j in drop else a for j, a in enumerate(r)] for r in m.rows]
            return Matrix(rows, m.ncols)
        self.module = Module(q.module.algebra, q.side, q.dim, fn, check=False)
        self.opposite = q.opposite

    def coset(self, x):
        return self.inner.coset(x)

    def lift(self, v):
        return self.inner.lift(v)

    def act(self, x, v):
        return self.inner.act(x, v)
