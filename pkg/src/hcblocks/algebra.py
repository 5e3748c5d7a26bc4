"""Finite-dimensional associative unital algebras over the rationals.

An algebra is stored by sparse structure constants.  Modules carry one action
matrix per basis element; for right modules the action of ``a`` is the matrix
of ``v -> v.a`` so that ``rho(ab) = rho(b) rho(a)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import sympy

from .linalg import (ONE, ZERO, Matrix, Subspace, _Echelon,
                     format_rational, guard, kernel, kernel_of_rows, matrix_sum, minimal_polynomial, scalar, subspace_intersect,
                     subspace_sum, unit_vector, zero_vector)


class AlgebraError(ValueError):
    pass


class AxiomError(AlgebraError):
    """An algebra or module axiom fails; ``witness`` names the basis indices."""

    def __init__(self, message: str, witness: tuple):
        super().__init__(message)
        self.witness = witness


class NonSplitError(AlgebraError):
    """A simple quotient is not split over the rationals."""


DEGREE_CAP = 8


def _sparse(v: Sequence) -> tuple:
    return tuple((k, a) for k, a in enumerate(v) if a)


class Algebra:
    """Associative unital algebra given by ``products[i][j] = e_i e_j``."""

    def __init__(self, products, unit: Sequence, names: Sequence[str] | None = None,
                 labels: dict | None = None):
        self.dim = len(products)
        self.products = products
        self.unit = tuple(unit)
        self.names = tuple(names) if names is not None else tuple(
            f"e{i}" for i in range(self.dim))
        # label -> Subspace, used to name maximal ideals found by ``cfs``
        self.labels = dict(labels or {})
        self._left: dict[int, Matrix] = {}
        self._right: dict[int, Matrix] = {}
        self._gens = None
        self._cfs = None
        self._radical = None

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim})"

    # -- arithmetic
    def basis(self, i: int) -> tuple:
        return unit_vector(self.dim, i)

    def basis_product(self, i: int, j: int) -> tuple:
        out = [ZERO] * self.dim
        for k, c in self.products[i][j]:
            out[k] = c
        return tuple(out)

    def mul(self, u: Sequence, v: Sequence) -> tuple:
        out = [ZERO] * self.dim
        vnz = _sparse(v)
        for i, a in enumerate(u):
            if not a:
                continue
            row = self.products[i]
            for j, b in vnz:
                ab = a * b
                for k, c in row[j]:
                    out[k] += ab * c
        return tuple(out)

    def left_matrix(self, i: int) -> Matrix:
        """Matrix of ``v -> e_i v``."""
        m = self._left.get(i)
        if m is None:
            cols = [self.basis_product(i, j) for j in range(self.dim)]
            m = self._left[i] = Matrix.from_columns(cols, self.dim)
        return m

    def right_matrix(self, i: int) -> Matrix:
        """Matrix of ``v -> v e_i``."""
        m = self._right.get(i)
        if m is None:
            cols = [self.basis_product(j, i) for j in range(self.dim)]
            m = self._right[i] = Matrix.from_columns(cols, self.dim)
        return m

    def left_mult(self, u: Sequence) -> Matrix:
        return matrix_sum(((a, self.left_matrix(i)) for i, a in enumerate(u)),
                          self.dim, self.dim)

    def right_mult(self, u: Sequence) -> Matrix:
        return matrix_sum(((a, self.right_matrix(i)) for i, a in enumerate(u)),
                          self.dim, self.dim)

    def power(self, u: Sequence, n: int) -> tuple:
        out = self.unit
        for _ in range(n):
            out = self.mul(out, u)
        return out

    def generators(self) -> tuple[int, ...]:
        """Indices of basis elements that generate the algebra, chosen greedily."""
        if self._gens is None:
            gens: list[int] = []
            span = _Closure(self.dim)
            span.add(self.unit)
            for i in range(self.dim):
                if span.contains(self.basis(i)):
                    continue
                gens.append(i)
                span.grow(self, [self.basis(i)], gens, side="left", new_mult=i)
            self._gens = tuple(gens)
        return self._gens

    def is_commutative(self) -> bool:
        return all(self.products[i][j] == self.products[j][i]
                   for i in range(self.dim) for j in range(i))

    # -- structure
    def radical(self) -> "Ideal":
        if self._radical is None:
            self._radical = radical(self)
        return self._radical

    def cfs(self) -> list["MaxIdeal"]:
        if self._cfs is None:
            self._cfs = cfs(self)
        return self._cfs

    def max_ideal(self, label: str) -> "MaxIdeal":
        for m in self.cfs():
            if m.label == label:
                return m
        raise KeyError(label)

    def whole(self) -> "Ideal":
        return Ideal(self, Subspace.full(self.dim))

    def zero_ideal(self) -> "Ideal":
        return Ideal(self, Subspace.zero(self.dim))

    def regular_module(self, side: str = "left") -> "Module":
        if side == "left":
            return Module(self, "left", self.dim, self.left_matrix, check=False)
        return Module(self, "right", self.dim, self.right_matrix, check=False)


class _Closure:
    """Growing span closed under multiplication by chosen basis elements."""

    def __init__(self, n: int):
        self.ech = _Echelon(n)
        self.vectors: list[tuple] = []

    def contains(self, v) -> bool:
        return not any(self.ech.reduce(v))

    def add(self, v) -> bool:
        if self.ech.add(v):
            self.vectors.append(tuple(v))
            return True
        return False

    def grow(self, alg: Algebra, seeds, mults: Sequence[int], side: str,
             new_mult: int | None = None) -> None:
        todo = []
        if new_mult is not None:
            todo.extend((new_mult, v) for v in self.vectors)
        for s in seeds:
            if self.add(s):
                todo.extend((g, tuple(s)) for g in mults)
        n = alg.dim
        while todo:
            g, v = todo.pop()
            w = alg.mul(alg.basis(g), v) if side == "left" else alg.mul(v, alg.basis(g))
            if self.add(w):
                todo.extend((h, w) for h in mults)
            if len(self.vectors) == n:
                return

    def subspace(self) -> Subspace:
        basis, pivots = self.ech.basis()
        return Subspace(self.ech.n, basis, pivots)


def build_algebra(mult, unit=None, names=None, check: bool = True,
                  labels: dict | None = None) -> Algebra:
    """Validate a structure-constant table and return the algebra.

    ``mult[i][j]`` is the coordinate vector of ``e_i e_j``.  When ``unit`` is
    omitted it is solved for.  Raises :class:`AxiomError` with the first
    failing basis triple (or index) on violation.
    """
    n = len(mult)
    if n == 0:
        raise AlgebraError("the zero algebra is not allowed")
    guard(n, "algebra")
    table = []
    for i, row in enumerate(mult):
        if len(row) != n:
            raise AlgebraError(f"mult[{i}] has {len(row)} entries, expected {n}")
        trow = []
        for j, vec in enumerate(row):
            if len(vec) != n:
                raise AlgebraError(
                    f"mult[{i}][{j}] has length {len(vec)}, expected {n}")
            trow.append(_sparse([scalar(a) for a in vec]))
        table.append(tuple(trow))
    table = tuple(table)
    if names is not None and len(names) != n:
        raise AlgebraError("names length does not match dimension")
    if unit is None:
        unit = _solve_unit(table, n)
    else:
        if len(unit) != n:
            raise AlgebraError("unit length does not match dimension")
        unit = tuple(scalar(a) for a in unit)
    alg = Algebra(table, unit, names, labels)
    if check:
        check_algebra(alg)
    return alg


def _solve_unit(table, n) -> tuple:
    rows, rhs = [], []
    for j in range(n):
        for k in range(n):
            # sum_i u_i c_ij^k = delta_jk and sum_i u_i c_ji^k = delta_jk
            rows.append([dict(table[i][j]).get(k, ZERO) for i in range(n)])
            rhs.append(ONE if j == k else ZERO)
            rows.append([dict(table[j][i]).get(k, ZERO) for i in range(n)])
            rhs.append(ONE if j == k else ZERO)
    from .linalg import solve
    sol = solve(Matrix(rows, n), rhs)
    if sol is None:
        raise AxiomError("no two-sided unit exists", ())
    return sol


def check_algebra(alg: Algebra) -> None:
    n = alg.dim
    prods = alg.products
    for i in range(n):
        for j in range(n):
            pij = prods[i][j]
            for k in range(n):
                lhs: dict[int, Fraction] = {}
                for l, c in pij:
                    for t, d in prods[l][k]:
                        lhs[t] = lhs.get(t, ZERO) + c * d
                rhs: dict[int, Fraction] = {}
                for l, c in prods[j][k]:
                    for t, d in prods[i][l]:
                        rhs[t] = rhs.get(t, ZERO) + c * d
                if {a: b for a, b in lhs.items() if b} != {a: b for a, b in rhs.items() if b}:
                    raise AxiomError(
                        f"associativity fails at basis triple ({i},{j},{k})", (i, j, k))
    for i in range(n):
        e = alg.basis(i)
        if alg.mul(alg.unit, e) != e:
            raise AxiomError(f"left unit law fails at basis element {i}", (i,))
        if alg.mul(e, alg.unit) != e:
            raise AxiomError(f"right unit law fails at basis element {i}", (i,))


def algebra_from_matrices(mats: Sequence[Matrix], names=None,
                          labels: dict | None = None) -> tuple[Algebra, "Callable"]:
    """Algebra spanned by the given square matrices, assumed closed under products.

    Returns the algebra and a function taking a matrix in the span to its
    coordinates.
    """
    n = mats[0].nrows
    flat = Subspace.span((m.entries for m in mats), n * n)
    if flat.dim != len(mats):
        raise AlgebraError("matrices are linearly dependent")
    cols = [m.entries for m in mats]
    coords_space = Matrix.from_columns(cols, n * n)
    from .linalg import solve

    def coords(m: Matrix) -> tuple:
        sol = solve(coords_space, m.entries)
        if sol is None:
            raise AlgebraError("matrix is outside the span")
        return sol

    table = [[coords(a @ b) for b in mats] for a in mats]
    unit = coords(Matrix.identity(n))
    return build_algebra(table, unit, names, check=False, labels=labels), coords


def subalgebra_generated(mats: Sequence[Matrix]) -> list[Matrix]:
    """A basis (as matrices) of the unital matrix algebra generated by ``mats``."""
    n = mats[0].nrows if mats else 0
    ech = _Echelon(n * n)
    basis: list[Matrix] = []
    todo = [Matrix.identity(n)]
    while todo:
        m = todo.pop()
        if ech.add(m.entries):
            basis.append(m)
            guard(len(basis), "generated matrix algebra")
            todo.extend(g @ m for g in mats)
    return basis


# ---------------------------------------------------------------- ideals

class Ideal:
    """Two-sided ideal stored as a canonical subspace of the algebra."""

    def __init__(self, algebra: Algebra, space: Subspace):
        self.algebra = algebra
        self.space = space
        self._lgens = None
        self._rgens = None

    def __eq__(self, other) -> bool:
        return (isinstance(other, Ideal) and self.algebra is other.algebra
                and self.space == other.space)

    def __hash__(self) -> int:
        return hash(self.space)

    def __repr__(self) -> str:
        return f"Ideal(dim={self.dim}, codim={self.codim})"

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def codim(self) -> int:
        return self.algebra.dim - self.space.dim

    def __le__(self, other: "Ideal") -> bool:
        return self.space <= other.space

    def contains(self, v) -> bool:
        return self.space.contains(v)

    def _generators(self, side: str) -> tuple[tuple, ...]:
        alg = self.algebra
        mults = alg.generators()
        span = _Closure(alg.dim)
        gens = []
        for b in self.space.basis:
            if span.contains(b):
                continue
            gens.append(b)
            span.grow(alg, [b], mults, side=side)
            if len(span.vectors) == self.dim:
                break
        return tuple(gens)

    def left_generators(self) -> tuple[tuple, ...]:
        """Elements generating the ideal as a left ideal."""
        if self._lgens is None:
            self._lgens = self._generators("left")
        return self._lgens

    def right_generators(self) -> tuple[tuple, ...]:
        """Elements generating the ideal as a right ideal."""
        if self._rgens is None:
            self._rgens = self._generators("right")
        return self._rgens


def _same_algebra(i: Ideal, j: Ideal) -> None:
    if i.algebra is not j.algebra:
        raise AlgebraError("ideals belong to different algebras")


def ideal_closure(alg: Algebra, gens: Iterable[Sequence]) -> Ideal:
    """Smallest two-sided ideal containing ``gens``."""
    mults = alg.generators()
    span = _Closure(alg.dim)
    seeds = [tuple(g) for g in gens]
    todo = []
    for s in seeds:
        if span.add(s):
            todo.append(s)
    while todo:
        v = todo.pop()
        for g in mults:
            for w in (alg.mul(alg.basis(g), v), alg.mul(v, alg.basis(g))):
                if span.add(w):
                    todo.append(w)
    return Ideal(alg, span.subspace())


def ideal_product(i: Ideal, j: Ideal) -> Ideal:
    """The product ``IJ``; spanned by ``a g`` with ``g`` left generators of ``J``."""
    _same_algebra(i, j)
    alg = i.algebra
    gens = j.left_generators()
    vecs = (alg.mul(a, g) for a in i.space.basis for g in gens)
    return Ideal(alg, Subspace.span(vecs, alg.dim))


def ideal_sum(i: Ideal, j: Ideal) -> Ideal:
    _same_algebra(i, j)
    return Ideal(i.algebra, subspace_sum(i.space, j.space))


def ideal_intersect(i: Ideal, j: Ideal) -> Ideal:
    _same_algebra(i, j)
    return Ideal(i.algebra, subspace_intersect(i.space, j.space))


def ideal_power(i: Ideal, n: int) -> Ideal:
    out = i.algebra.whole()
    for _ in range(n):
        out = ideal_product(out, i)
    return out


def is_two_sided(alg: Algebra, space: Subspace) -> bool:
    gens = alg.generators()
    for b in space.basis:
        for g in gens:
            if not space.contains(alg.mul(alg.basis(g), b)):
                return False
            if not space.contains(alg.mul(b, alg.basis(g))):
                return False
    return True


def radical(alg: Algebra) -> Ideal:
    """Jacobson radical via the trace form ``(a, b) -> tr(L_ab)``."""
    n = alg.dim
    # tr[i] is the trace of left multiplication by e_i
    tr = [sum((dict(alg.products[i][j]).get(j, ZERO) for j in range(n)), ZERO)
          for i in range(n)]
    rows = [[sum((c * tr[k] for k, c in alg.products[i][j]), ZERO)
             for j in range(n)] for i in range(n)]
    return Ideal(alg, kernel(Matrix(rows, n)))


# ---------------------------------------------------------------- quotients

@dataclass(eq=False)
class QuotientAlgebra:
    algebra: Algebra
    parent: Algebra
    kernel: Subspace
    columns: tuple[int, ...]

    def project(self, v: Sequence) -> tuple:
        return self.kernel.quotient_coordinates(v)

    def lift(self, w: Sequence) -> tuple:
        out = [ZERO] * self.parent.dim
        for c, a in zip(self.columns, w):
            out[c] = a
        return tuple(out)


def quotient_algebra(alg: Algebra, ideal: Ideal | Subspace) -> QuotientAlgebra:
    space = ideal.space if isinstance(ideal, Ideal) else ideal
    cols = space.complement_columns()
    if not cols:
        raise AlgebraError("quotient by the whole algebra is the zero algebra")
    table = [[space.quotient_coordinates(alg.basis_product(i, j)) for j in cols]
             for i in cols]
    unit = space.quotient_coordinates(alg.unit)
    names = [alg.names[c] for c in cols]
    q = build_algebra(table, unit, names, check=False)
    return QuotientAlgebra(q, alg, space, cols)


def center(alg: Algebra) -> Subspace:
    rows = []
    for g in alg.generators():
        diff = alg.left_matrix(g) - alg.right_matrix(g)
        rows.extend(diff.rows)
    return kernel_of_rows(rows, alg.dim)


# ---------------------------------------------------------------- modules

class Module:
    """Finite-dimensional left or right module given by action matrices."""

    def __init__(self, algebra: Algebra, side: str, dim: int,
                 action: Sequence[Matrix] | Callable[[int], Matrix],
                 check: bool = True):
        if side not in ("left", "right"):
            raise AlgebraError(f"unknown side {side!r}")
        self.algebra = algebra
        self.side = side
        self.dim = dim
        guard(dim, "module")
        if callable(action):
            self._fn = action
            self._mats: dict[int, Matrix] = {}
        else:
            if len(action) != algebra.dim:
                raise AlgebraError(
                    f"expected {algebra.dim} action matrices, got {len(action)}")
            for m in action:
                if m.shape != (dim, dim):
                    raise AlgebraError(f"action matrix has shape {m.shape}, "
                                       f"expected {(dim, dim)}")
            self._fn = None
            self._mats = dict(enumerate(action))
        if check:
            w = module_defect(self)
            if w is not None:
                raise AxiomError(w[0], w[1])

    def __repr__(self) -> str:
        return f"Module({self.side}, dim={self.dim})"

    def action(self, i: int) -> Matrix:
        m = self._mats.get(i)
        if m is None:
            m = self._mats[i] = self._fn(i)
        return m

    def matrices(self) -> list[Matrix]:
        return [self.action(i) for i in range(self.algebra.dim)]

    def matrix(self, x: Sequence) -> Matrix:
        return matrix_sum(((a, self.action(i)) for i, a in enumerate(x)),
                          self.dim, self.dim)

    def act(self, x: Sequence, v: Sequence) -> tuple:
        out = [ZERO] * self.dim
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(self.action(i).apply(v)):
                    if b:
                        out[j] += a * b
        return tuple(out)

    def spin(self, vectors: Iterable[Sequence]) -> Subspace:
        """Smallest submodule containing ``vectors``."""
        gens = [self.action(g) for g in self.algebra.generators()]
        ech = _Echelon(self.dim)
        todo = []
        for v in vectors:
            if ech.add(v):
                todo.append(tuple(v))
        while todo and len(ech) < self.dim:
            v = todo.pop()
            for g in gens:
                w = g.apply(v)
                if ech.add(w):
                    todo.append(w)
        basis, pivots = ech.basis()
        return Subspace(self.dim, basis, pivots)

    def is_invariant(self, u: Subspace) -> bool:
        for g in self.algebra.generators():
            m = self.action(g)
            for b in u.basis:
                if not u.contains(m.apply(b)):
                    return False
        return True

    def submodule(self, u: Subspace) -> "Module":
        def fn(i, u=u):
            m = self.action(i)
            cols = [u.coordinates(m.apply(b)) for b in u.basis]
            return Matrix.from_columns(cols, u.dim)
        return Module(self.algebra, self.side, u.dim, fn, check=False)

    def quotient(self, u: Subspace) -> "Module":
        cols = u.complement_columns()

        def fn(i, u=u, cols=cols):
            m = self.action(i)
            images = [u.quotient_coordinates(m.column(c)) for c in cols]
            return Matrix.from_columns(images, len(cols))
        return Module(self.algebra, self.side, len(cols), fn, check=False)

    def image(self, ideal: Ideal, u: Subspace | None = None) -> Subspace:
        """``I U`` for left modules, ``U I`` for right modules (``U`` a submodule)."""
        if u is None:
            u = Subspace.full(self.dim)
        gens = ideal.right_generators() if self.side == "left" else \
            ideal.left_generators()
        mats = [self.matrix(g) for g in gens]
        return Subspace.span((m.apply(b) for m in mats for b in u.basis), self.dim)

    def preimage(self, ideal: Ideal, u: Subspace) -> Subspace:
        """Vectors ``v`` with ``I v`` inside the submodule ``u`` (``v I`` for right)."""
        gens = ideal.left_generators() if self.side == "left" else \
            ideal.right_generators()
        from .linalg import annihilator
        perp = annihilator(u)
        rows = []
        for g in gens:
            m = self.matrix(g)
            for y in perp.basis:
                rows.append(tuple(sum((y[k] * m.rows[k][j] for k in range(self.dim)
                                       if y[k]), ZERO) for j in range(self.dim)))
        return kernel_of_rows(rows, self.dim)

    def annihilated(self, ideal: Ideal) -> Subspace:
        return self.preimage(ideal, Subspace.zero(self.dim))


def module_defect(mod: Module):
    """First violated representation law as ``(message, witness)`` or ``None``."""
    alg = mod.algebra
    n = mod.dim
    if mod.matrix(alg.unit) != Matrix.identity(n):
        return ("the unit does not act as the identity", ("unit",))
    for g in alg.generators():
        rg = mod.action(g)
        for j in range(alg.dim):
            rj = mod.action(j)
            if mod.side == "left":
                lhs = mod.matrix(alg.basis_product(g, j))
                rhs = rg @ rj
            else:
                lhs = mod.matrix(alg.basis_product(j, g))
                rhs = rg @ rj
            if lhs != rhs:
                return (f"representation law fails at basis pair ({g},{j})", (g, j))
    return None


def pullback_module(q: QuotientAlgebra, mod: Module) -> Module:
    """A module of ``q.algebra`` viewed as a module of the parent algebra."""
    parent = q.parent

    def fn(i):
        return mod.matrix(q.project(parent.basis(i)))
    return Module(parent, mod.side, mod.dim, fn, check=False)


def direct_sum(mods: Sequence[Module]) -> Module:
    from .linalg import block_diagonal
    alg = mods[0].algebra

    def fn(i):
        return block_diagonal([m.action(i) for m in mods])
    return Module(alg, mods[0].side, sum(m.dim for m in mods), fn, check=False)


def hom_space(u: Module, v: Module) -> list[Matrix]:
    """Basis of intertwiners ``F`` (``dim v x dim u``) with ``F u(g) = v(g) F``."""
    if u.algebra is not v.algebra:
        raise AlgebraError("modules over different algebras")
    if u.side != v.side:
        raise AlgebraError("modules on different sides")
    du, dv = u.dim, v.dim
    nvars = du * dv
    guard(nvars, "hom space system")
    ech = _Echelon(nvars)
    for g in u.algebra.generators():
        mu, mv = u.action(g), v.action(g)
        munz = mu.nonzeros()
        mvnz = mv.nonzeros()
        mucols = [[] for _ in range(du)]
        for k, row in enumerate(munz):
            for b, a in row:
                mucols[b].append((k, a))
        for a in range(dv):
            for b in range(du):
                row = [ZERO] * nvars
                for k, c in mucols[b]:
                    row[a * du + k] += c
                for k, c in mvnz[a]:
                    row[k * du + b] -= c
                if any(row):
                    ech.add(row)
        if len(ech) == nvars:
            break
    basis, pivots = ech.basis()
    sol = kernel(Matrix._raw(basis, nvars)) if basis else Subspace.full(nvars)
    return [Matrix.from_entries(dv, du, s) for s in sol.basis]


# ---------------------------------------------------------------- cfs

@dataclass(eq=False)
class MaxIdeal:
    """A cofinite maximal two-sided ideal with the simple module it annihilates."""

    label: str
    ideal: Ideal
    simple: Module
    codim: int

    def __repr__(self) -> str:
        return f"MaxIdeal({self.label}, codim={self.codim})"

    @property
    def algebra(self) -> Algebra:
        return self.ideal.algebra

    def sort_key(self):
        return (self.codim, self.ideal.space.basis)


def _to_sympy_poly(coeffs: Sequence[Fraction], t):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator)
                       for c in reversed(coeffs)], t, domain="QQ")


def rational_roots(coeffs: Sequence[Fraction], degree_cap: int = DEGREE_CAP
                   ) -> tuple[list[Fraction], list[int]]:
    """Rational roots of a polynomial and the degrees of its other factors."""
    t = sympy.Symbol("t")
    poly = _to_sympy_poly(coeffs, t)
    _, factors = poly.factor_list()
    roots, others = [], []
    for f, _mult in factors:
        if f.degree() == 1:
            a, b = f.all_coeffs()
            r = -sympy.Rational(b) / sympy.Rational(a)
            roots.append(Fraction(int(r.p), int(r.q)))
        else:
            others.append(f.degree())
    return sorted(set(roots)), others


def _split_commutative(q: Algebra, zbasis: Sequence[tuple],
                       degree_cap: int) -> list[tuple]:
    """Primitive idempotents of the split commutative semisimple span ``zbasis``."""
    idems = [q.unit]
    target = len(zbasis)
    for z in zbasis:
        if len(idems) == target:
            break
        new = []
        for e in idems:
            y = q.mul(z, e)
            piece = Subspace.span((q.mul(e, b) for b in zbasis), q.dim)
            cols = [piece.coordinates(q.mul(y, b)) for b in piece.basis]
            mp = minimal_polynomial(Matrix.from_columns(cols, piece.dim))
            roots, others = rational_roots(mp, degree_cap)
            if others:
                big = [d for d in others if d > degree_cap]
                if big:
                    raise NonSplitError(
                        f"irreducible factor of degree {max(big)} exceeds the "
                        f"degree cap {degree_cap}")
                raise NonSplitError(
                    "non-split simple; supply splitting data "
                    f"(irreducible factor of degree {others[0]})")
            if len(roots) == 1:
                new.append(e)
                continue
            for r in roots:
                f = e
                for s in roots:
                    if s != r:
                        num = tuple(a - s * b for a, b in zip(y, e))
                        f = tuple(a / (r - s) for a in q.mul(f, num))
                new.append(f)
        idems = new
    return idems


def _find_simple(mod: Module) -> Module:
    """A simple submodule of a semisimple isotypic module."""
    cur = mod
    while True:
        ends = hom_space(cur, cur)
        if len(ends) == 1:
            return cur
        found = None
        for phi in ends:
            mp = minimal_polynomial(phi)
            if len(mp) == 2:
                continue
            roots, _ = rational_roots(mp)
            for r in roots:
                sub = kernel(phi - Matrix.identity(cur.dim).scale(r))
                if 0 < sub.dim < cur.dim:
                    found = sub
                    break
            if found is not None:
                break
        if found is None:
            raise NonSplitError("non-split simple; supply splitting data "
                                "(endomorphism ring is a division algebra)")
        cur = cur.submodule(found)


def cfs(alg: Algebra, degree_cap: int = DEGREE_CAP) -> list[MaxIdeal]:
    """Maximal two-sided ideals with their simple modules, in canonical order."""
    rad = alg.radical()
    q = quotient_algebra(alg, rad)
    qa = q.algebra
    z = center(qa)
    idems = _split_commutative(qa, z.basis, degree_cap)
    found = []
    for eps in idems:
        comp = tuple(a - b for a, b in zip(qa.unit, eps))
        other = Subspace.span((qa.mul(comp, qa.basis(i)) for i in range(qa.dim)),
                              qa.dim)
        space = Subspace.span(list(rad.space.basis) +
                              [q.lift(b) for b in other.basis], alg.dim)
        block = Subspace.span((qa.mul(eps, qa.basis(i)) for i in range(qa.dim)),
                              qa.dim)
        left_ideal = pullback_module(q, qa.regular_module("left")).submodule(block)
        simple = _find_simple(left_ideal)
        codim = alg.dim - space.dim
        if simple.dim ** 2 != codim:
            raise NonSplitError("non-split simple; supply splitting data "
                                f"(simple of dim {simple.dim} in codim {codim})")
        simple = Module(alg, "left", simple.dim, simple.matrices(), check=False)
        found.append((Ideal(alg, space), simple, codim))
    found.sort(key=lambda t: (t[2], t[0].space.basis))
    out = []
    for k, (ideal, simple, codim) in enumerate(found):
        label = next((name for name, sp in alg.labels.items() if sp == ideal.space),
                     f"m{k}")
        out.append(MaxIdeal(label, ideal, simple, codim))
    return out


def simple_right(m: MaxIdeal) -> Module:
    """The simple right module of ``Gamma/m``: the dual of the left simple."""
    s = m.simple
    return Module(m.algebra, "right", s.dim, lambda i: s.action(i).T, check=False)


def composition_factors(v: Module) -> list[MaxIdeal]:
    """Composition factors of ``v`` in extraction order (with repetition)."""
    alg = v.algebra
    ideals = alg.cfs()
    out: list[MaxIdeal] = []
    cur = v
    while cur.dim:
        for m in ideals:
            k = cur.annihilated(m.ideal)
            if k.dim:
                break
        else:
            raise AlgebraError("module has no annihilated subspace; not finite?")
        w = cur.spin([k.basis[0]])
        if w.dim != m.simple.dim:
            s = m.simple if cur.side == "left" else simple_right(m)
            sub = cur.submodule(w)
            homs = hom_space(s, sub)
            img = Subspace.span((h.column(j) for h in homs[:1] for j in range(s.dim)),
                                w.dim)
            w = Subspace.span((w.from_coordinates(b) for b in img.basis), cur.dim)
        out.append(m)
        cur = cur.quotient(w)
    return out


def factor_counts(factors: Iterable[MaxIdeal]) -> dict[str, int]:
    return dict(Counter(m.label for m in factors))


def describe_vector(alg: Algebra, v: Sequence) -> str:
    terms = [f"{format_rational(a)}*{alg.names[i]}" for i, a in enumerate(v) if a]
    return " + ".join(terms) or "0"


# ---------------------------------------------------------------- small algebras

def _from_matrix_units(units: Sequence[tuple[int, int]], n: int, names) -> Algebra:
    mats = []
    for i, j in units:
        rows = [[ZERO] * n for _ in range(n)]
        rows[i][j] = ONE
        mats.append(Matrix(rows, n))
    alg, _ = algebra_from_matrices(mats, names)
    return alg


def full_matrix_algebra(n: int) -> Algebra:
    units = [(i, j) for i in range(n) for j in range(n)]
    return _from_matrix_units(units, n, [f"E{i}{j}" for i, j in units])


def upper_triangular_algebra(n: int) -> Algebra:
    units = [(i, j) for i in range(n) for j in range(i, n)]
    return _from_matrix_units(units, n, [f"E{i}{j}" for i, j in units])


def diagonal_algebra(n: int) -> Algebra:
    """The product of ``n`` copies of the field."""
    units = [(i, i) for i in range(n)]
    return _from_matrix_units(units, n, [f"E{i}{i}" for i, _ in units])


def truncated_polynomial_algebra(n: int) -> Algebra:
    """``Q[x]/(x^n)`` with basis ``1, x, ..., x^(n-1)``."""
    table = [[unit_vector(n, i + j) if i + j < n else zero_vector(n)
              for j in range(n)] for i in range(n)]
    return build_algebra(table, unit_vector(n, 0),
                         ["1"] + [f"x^{i}" for i in range(1, n)])


def cyclic_group_algebra(n: int) -> Algebra:
    table = [[unit_vector(n, (i + j) % n) for j in range(n)] for i in range(n)]
    return build_algebra(table, unit_vector(n, 0), [f"g^{i}" for i in range(n)])


def product_algebra(a: Algebra, b: Algebra) -> Algebra:
    """The direct product ``a x b`` of two algebras."""
    n, m = a.dim, b.dim
    table = []
    for i in range(n + m):
        row = []
        for j in range(n + m):
            v = [ZERO] * (n + m)
            if i < n and j < n:
                for k, c in a.products[i][j]:
                    v[k] = c
            elif i >= n and j >= n:
                for k, c in b.products[i - n][j - n]:
                    v[n + k] = c
            row.append(tuple(v))
        table.append(row)
    unit = tuple(a.unit) + tuple(b.unit)
    return build_algebra(table, unit, list(a.names) + list(b.names), check=False)
