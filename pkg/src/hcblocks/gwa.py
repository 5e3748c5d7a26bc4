"""The sl2 example: local data for Q[h,c], the generalized Weyl algebra model
of U(sl2), truncated quotient windows, and the glued upper-triangular pair.

Conventions.  ``X^n`` is ``e^n`` for ``n > 0`` and ``f^-n`` for ``n < 0``;
``sigma`` fixes ``c`` and sends ``h`` to ``h - 2``; ``g X^n = X^n sigma^-n(g)``.
The Casimir is ``c = ef + fe + h^2/2``, so ``ef = (2c - h^2 + 2h)/4`` and
``fe = (2c - h^2 - 2h)/4``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import sympy
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .algebra import Algebra, Module, build_algebra
from .hc import QuotientFamily, QuotientModule
from .linalg import (ONE, ZERO, Matrix, Subspace, format_rational, guard,
                     solve, unit_vector)

R, H, C = ring("h,c", QQ)
EF = (2 * C - H ** 2 + 2 * H) / 4
FE = (2 * C - H ** 2 - 2 * H) / 4

Point = tuple[Fraction, Fraction]
ORIGIN: Point = (Fraction(0), Fraction(0))


class WindowError(RuntimeError):
    """A computation left the truncation window or exceeded its order."""


def to_fraction(a) -> Fraction:
    return Fraction(int(a.numerator), int(a.denominator))


def to_qq(a):
    a = Fraction(a)
    return QQ(a.numerator, a.denominator)


def point_label(p: Point) -> str:
    return f"({format_rational(p[0])},{format_rational(p[1])})"


def as_point(p) -> Point:
    return (Fraction(p[0]), Fraction(p[1]))


# ---------------------------------------------------------------- Q[h,c]

def sigma(g, k: int = 1):
    """``sigma^k(g)(h, c) = g(h - 2k, c)``."""
    if k == 0 or g == 0:
        return g
    return g.compose(H, H - 2 * k)


@functools.lru_cache(maxsize=None)
def xprod(n: int, m: int):
    """The polynomial ``p`` with ``X^n X^m = X^(n+m) p``."""
    if n == 0 or m == 0 or (n > 0) == (m > 0):
        return R.one
    if n > 0:
        return xprod(n - 1, m + 1) * sigma(EF, -(m + 1))
    return xprod(n + 1, m - 1) * sigma(FE, -(m - 1))


@functools.lru_cache(maxsize=None)
def monomials(order: int) -> tuple[tuple[int, int], ...]:
    """Exponents ``(i, j)`` with ``i + j < order``, by total degree then ``j``."""
    return tuple(sorted(((i, j) for i in range(order) for j in range(order - i)),
                        key=lambda e: (e[0] + e[1], e[1])))


def local_dim(order: int) -> int:
    return order * (order + 1) // 2


def taylor(poly, point: Point, order: int) -> tuple:
    """Coefficients of ``poly`` in ``(h - a)^i (c - b)^j`` with ``i + j < order``."""
    return _taylor(poly, point, order)


@functools.lru_cache(maxsize=65536)
def _taylor(poly, point, order):
    a, b = point
    shifted = poly.compose([(H, H + to_qq(a)), (C, C + to_qq(b))]) if (a or b) else poly
    idx = {e: k for k, e in enumerate(monomials(order))}
    out = [ZERO] * len(idx)
    for (i, j), coeff in shifted.terms():
        k = idx.get((i, j))
        if k is not None:
            out[k] = to_fraction(coeff)
    return tuple(out)


def from_taylor(vec: Sequence, point: Point, order: int):
    a, b = point
    s, t = H - to_qq(a), C - to_qq(b)
    out = R.zero
    for (i, j), coeff in zip(monomials(order), vec):
        if coeff:
            out += to_qq(coeff) * s ** i * t ** j
    return out


@functools.lru_cache(maxsize=None)
def _local_table(order: int):
    mons = monomials(order)
    idx = {e: k for k, e in enumerate(mons)}
    table = {}
    for (i, j), (k, l) in itertools.product(mons, mons):
        table[idx[(i, j)], idx[(k, l)]] = idx.get((i + k, j + l))
    return table


def local_mul(u: Sequence, v: Sequence, order: int) -> tuple:
    table = _local_table(order)
    out = [ZERO] * local_dim(order)
    for a, x in enumerate(u):
        if not x:
            continue
        for b, y in enumerate(v):
            if y:
                k = table[a, b]
                if k is not None:
                    out[k] += x * y
    return tuple(out)


@functools.lru_cache(maxsize=None)
def monomial_matrix(order: int, k: int) -> Matrix:
    """Matrix of multiplication by the ``k``-th monomial in ``Q[s,t]/(s,t)^order``."""
    d = local_dim(order)
    table = _local_table(order)
    rows = [[ZERO] * d for _ in range(d)]
    for b in range(d):
        r = table[k, b]
        if r is not None:
            rows[r][b] = ONE
    return Matrix(rows, d)


def local_matrix(vec: Sequence, order: int) -> Matrix:
    d = local_dim(order)
    rows = [[ZERO] * d for _ in range(d)]
    table = _local_table(order)
    for k, x in enumerate(vec):
        if x:
            for b in range(d):
                r = table[k, b]
                if r is not None:
                    rows[r][b] += x
    return Matrix(rows, d)


def truncate_jet(vec: Sequence, order: int, target: int) -> tuple:
    if target > order:
        raise WindowError(f"order {target} exceeds the available order {order}")
    return tuple(vec[:local_dim(target)])


# ---------------------------------------------------------------- PolyLocal

class PolyLocal:
    """``prod_q Q[h,c]/m_q^K`` for finitely many points, as a finite algebra."""

    def __init__(self, points: Sequence, order: int | Sequence[int], prefix: str = ""):
        pts = [as_point(p) for p in points]
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate points")
        if not pts:
            raise ValueError("at least one point is required")
        orders = [order] * len(pts) if isinstance(order, int) else list(order)
        if len(orders) != len(pts) or min(orders) < 1:
            raise ValueError("orders must be positive, one per point")
        self.points = tuple(pts)
        self.orders = dict(zip(pts, orders))
        self.prefix = prefix
        self.offsets = {}
        off = 0
        for p in pts:
            self.offsets[p] = off
            off += local_dim(self.orders[p])
        self.dim = off
        guard(self.dim, "local algebra")

    def basis_names(self) -> list[str]:
        return [f"{self.prefix}{point_label(p)}[{i},{j}]" for p in self.points
                for i, j in monomials(self.orders[p])]

    def index(self, p: Point, k: int = 0) -> int:
        return self.offsets[p] + k

    def component(self, vec: Sequence, p: Point) -> tuple:
        off = self.offsets[p]
        return tuple(vec[off:off + local_dim(self.orders[p])])

    def locate(self, i: int) -> tuple[Point, int]:
        for p in self.points:
            off = self.offsets[p]
            if off <= i < off + local_dim(self.orders[p]):
                return p, i - off
        raise IndexError(i)

    def mul(self, u: Sequence, v: Sequence) -> tuple:
        out = []
        for p in self.points:
            out.extend(local_mul(self.component(u, p), self.component(v, p),
                                 self.orders[p]))
        return tuple(out)

    def unit(self) -> tuple:
        out = [ZERO] * self.dim
        for p in self.points:
            out[self.offsets[p]] = ONE
        return tuple(out)

    def jet(self, poly) -> tuple:
        out = []
        for p in self.points:
            out.extend(taylor(poly, p, self.orders[p]))
        return tuple(out)

    def max_ideal_space(self, p: Point) -> Subspace:
        keep = self.offsets[p]
        return Subspace.span((unit_vector(self.dim, i) for i in range(self.dim)
                              if i != keep), self.dim)

    def power_space(self, exps: dict) -> Subspace:
        """``prod_q m_q^(e_q)`` inside the truncation."""
        vecs = []
        for p in self.points:
            e = exps.get(p, 0)
            for k, (i, j) in enumerate(monomials(self.orders[p])):
                if i + j >= e:
                    vecs.append(unit_vector(self.dim, self.offsets[p] + k))
        return Subspace.span(vecs, self.dim)

    def table(self) -> list[list[tuple]]:
        n = self.dim
        rows = []
        for a in range(n):
            pa, ka = self.locate(a)
            row = []
            for b in range(n):
                pb, kb = self.locate(b)
                v = [ZERO] * n
                if pa == pb:
                    r = _local_table(self.orders[pa])[ka, kb]
                    if r is not None:
                        v[self.offsets[pa] + r] = ONE
                row.append(tuple(v))
            rows.append(row)
        return rows

    def algebra(self) -> Algebra:
        labels = {point_label(p): self.max_ideal_space(p) for p in self.points}
        return build_algebra(self.table(), self.unit(), self.basis_names(),
                             check=False, labels=labels)

    def lift(self, vec: Sequence):
        """A polynomial whose jets at every point agree with ``vec``."""
        out = R.zero
        for p in self.points:
            comp = self.component(vec, p)
            if any(comp):
                out += crt_idempotent(self.points, self.orders_key(), p) * \
                    from_taylor(comp, p, self.orders[p])
        return out

    def orders_key(self) -> tuple:
        return tuple(self.orders[p] for p in self.points)


@functools.lru_cache(maxsize=None)
def crt_idempotent(points: tuple, orders: tuple, target: Point):
    """Polynomial congruent to 1 mod ``m_target^K`` and 0 mod the others."""
    omap = dict(zip(points, orders))
    t = 0
    while len({p[0] + t * p[1] for p in points}) < len(points):
        t += 1
    y = sympy.Symbol("y")
    vals = {p: sympy.Rational(p[0].numerator, p[0].denominator)
            + t * sympy.Rational(p[1].numerator, p[1].denominator) for p in points}
    k = omap[target]
    others = sympy.Integer(1)
    for p in points:
        if p != target:
            others *= (y - vals[p]) ** omap[p]
    mod = (y - vals[target]) ** k
    inv = sympy.invert(sympy.expand(others), sympy.expand(mod), y)
    e = sympy.Poly(sympy.expand(others * inv), y, domain="QQ")
    # substitute the separating linear form h + t c
    lin = H + t * C
    out = R.zero
    for (deg,), coeff in e.terms():
        out += QQ(int(coeff.p), int(coeff.q)) * lin ** deg
    return out


def gamma0_quotient(points: Sequence, orders: int | Sequence[int]) -> Algebra:
    """``prod Q[h,c]/m^k`` with maximal ideals labelled by their points."""
    return PolyLocal(points, orders).algebra()


# ---------------------------------------------------------------- the GWA

class GWAElement:
    """A finite sum ``sum_n X^n g_n`` with ``g_n`` in ``Q[h,c]``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {n: g for n, g in (terms or {}).items() if g != 0}

    @classmethod
    def scalar(cls, a) -> "GWAElement":
        return cls({0: R(to_qq(a))})

    @classmethod
    def poly(cls, g) -> "GWAElement":
        return cls({0: R(g)})

    @classmethod
    def x(cls, n: int, g=None) -> "GWAElement":
        return cls({n: R.one if g is None else R(g)})

    def __add__(self, other: "GWAElement") -> "GWAElement":
        out = dict(self.terms)
        for n, g in other.terms.items():
            out[n] = out.get(n, R.zero) + g
        return GWAElement(out)

    def __sub__(self, other: "GWAElement") -> "GWAElement":
        return self + other.scale(-1)

    def scale(self, a) -> "GWAElement":
        q = to_qq(a)
        return GWAElement({n: g * q for n, g in self.terms.items()})

    def __mul__(self, other: "GWAElement") -> "GWAElement":
        out: dict[int, object] = {}
        for n, g in self.terms.items():
            for m, g2 in other.terms.items():
                term = xprod(n, m) * sigma(g, -m) * g2
                out[n + m] = out.get(n + m, R.zero) + term
        return GWAElement(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, GWAElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        parts = [f"X^{n}*({g})" for n, g in sorted(self.terms.items())]
        return " + ".join(parts) or "0"

    def is_zero(self) -> bool:
        return not self.terms

    def chi(self) -> Fraction:
        """Value of the trivial character: ``e, f, h, c`` all act by zero."""
        g = self.terms.get(0)
        return ZERO if g is None else to_fraction(g(0, 0))


E = GWAElement.x(1)
F = GWAElement.x(-1)
HH = GWAElement.poly(H)
CC = GWAElement.poly(C)
ONE_A = GWAElement.scalar(1)


def check_relations() -> None:
    """Assert the sl2 relations and the centrality of the Casimir."""
    assert E * F - F * E == HH
    assert HH * E - E * HH == E.scale(2)
    assert HH * F - F * HH == F.scale(-2)
    cas = E * F + F * E + (HH * HH).scale(Fraction(1, 2))
    assert cas == CC
    for g in (E, F, HH):
        assert cas * g == g * cas


# ---------------------------------------------------------------- windows

class Window:
    """``A0/A0 m^k`` (side ``left``) or ``A0/m^k A0`` (side ``right``) at one point.

    Only the grading lines whose weights lie in ``allowed`` are kept; the
    others are zero for the truncated ``Gamma0`` and are projected away.  Line
    ``n`` of a left window has weight ``(a + 2n, b)`` and coefficients
    expanded at ``(a, b)``; line ``n`` of a right window has weight
    ``(a - 2n, b)`` and coefficients expanded there.
    """

    def __init__(self, point, order: int, side: str, allowed: Iterable,
                 gamma_order: int | None = None):
        self.point = as_point(point)
        self.order = order
        self.side = side
        if gamma_order is not None and order > gamma_order:
            raise WindowError(f"exponent {order} exceeds the truncation order "
                              f"{gamma_order}")
        allowed = {as_point(p) for p in allowed}
        sign = 2 if side == "left" else -2
        a, b = self.point
        lines = []
        for p in allowed:
            if p[1] == b and (p[0] - a) % 2 == 0:
                n = (p[0] - a) / sign
                if n.denominator == 1:
                    lines.append(int(n))
        self.lines = tuple(sorted(lines)) if order > 0 else ()
        self.d = local_dim(order)
        self.dim = len(self.lines) * self.d
        self.offset = {n: k * self.d for k, n in enumerate(self.lines)}
        self.boundary = tuple(n for n in self.lines
                              if n - 1 not in self.offset or n + 1 not in self.offset)

    def weight(self, n: int) -> Point:
        a, b = self.point
        return (a + 2 * n, b) if self.side == "left" else (a - 2 * n, b)

    def coeff_point(self, n: int) -> Point:
        return self.point if self.side == "left" else self.weight(n)

    def line(self, vec: Sequence, n: int) -> tuple:
        off = self.offset[n]
        return tuple(vec[off:off + self.d])

    def line_space(self, n: int) -> Subspace:
        off = self.offset[n]
        return Subspace.span((unit_vector(self.dim, off + k) for k in range(self.d)),
                             self.dim)

    def coset(self, x: GWAElement) -> tuple:
        out = [ZERO] * self.dim
        for n, g in x.terms.items():
            jet = taylor(g, self.coeff_point(n), self.order)
            if n not in self.offset:
                continue
            off = self.offset[n]
            for k, a in enumerate(jet):
                out[off + k] = a
        return tuple(out)

    def lift(self, vec: Sequence) -> GWAElement:
        terms = {}
        for n in self.lines:
            comp = self.line(vec, n)
            if any(comp):
                terms[n] = from_taylor(comp, self.coeff_point(n), self.order)
        return GWAElement(terms)

    def unit(self) -> tuple:
        return self.coset(ONE_A)

    def act(self, x: GWAElement, vec: Sequence) -> tuple:
        """``x . v`` for left windows, ``v . x`` for right windows."""
        out = [ZERO] * self.dim
        for n in self.lines:
            comp = self.line(vec, n)
            if not any(comp):
                continue
            for k, g in x.terms.items():
                if self.side == "left":
                    target = k + n
                    poly = xprod(k, n) * sigma(g, -n)
                else:
                    target = n + k
                    poly = xprod(n, k) * g
                jet = taylor(poly, self.coeff_point(target), self.order)
                res = local_mul(jet, comp, self.order)
                if target not in self.offset or not any(res):
                    continue
                off = self.offset[target]
                for i, a in enumerate(res):
                    out[off + i] += a
        return tuple(out)

    def gamma_matrix(self, point: Point, mono: int, near: bool) -> Matrix:
        """Action of one local basis element of the truncated Gamma_0.

        ``near`` selects the action expanded at each line's own weight (left
        action on a left window, right action on a right window); otherwise
        every line sees the jet at the window's point.
        """
        rows = [[ZERO] * self.dim for _ in range(self.dim)]
        if mono >= self.d:
            return Matrix(rows, self.dim)
        block = monomial_matrix(self.order, mono)
        for n in self.lines:
            where = self.weight(n) if near else self.point
            if where != point:
                continue
            off = self.offset[n]
            for i, r in enumerate(block.rows):
                for j, a in enumerate(r):
                    if a:
                        rows[off + i][off + j] = a
        return Matrix(rows, self.dim)

    def gamma_act(self, local: PolyLocal, vec_gamma: Sequence, v: Sequence,
                  near: bool) -> tuple:
        out = [ZERO] * self.dim
        for n in self.lines:
            where = self.weight(n) if near else self.point
            if where not in local.offsets:
                continue
            jet = truncate_jet(local.component(vec_gamma, where),
                               local.orders[where], self.order)
            res = local_mul(jet, self.line(v, n), self.order)
            off = self.offset[n]
            for i, a in enumerate(res):
                out[off + i] = a
        return tuple(out)

    def chi(self, vec: Sequence) -> Fraction:
        """Trivial character of the coset; defined when the point is the origin."""
        if self.dim == 0:
            return ZERO
        if self.point != ORIGIN:
            raise WindowError("the trivial character is undefined off the origin")
        if 0 not in self.offset:
            return ZERO
        return vec[self.offset[0]]


class WindowSum:
    """Direct sum of single-point windows: ``A0/A0 P`` for ``P = prod m_q^e``."""

    def __init__(self, exps: dict, side: str, allowed: Iterable,
                 gamma_order: int | None = None):
        allowed = tuple(allowed)
        self.exps = {as_point(p): e for p, e in exps.items() if e > 0}
        self.side = side
        self.windows = [Window(p, e, side, allowed, gamma_order)
                        for p, e in sorted(self.exps.items())]
        self.offsets = []
        off = 0
        for w in self.windows:
            self.offsets.append(off)
            off += w.dim
        self.dim = off

    def _split(self, vec):
        return [tuple(vec[o:o + w.dim]) for o, w in zip(self.offsets, self.windows)]

    def coset(self, x: GWAElement) -> tuple:
        return tuple(a for w in self.windows for a in w.coset(x))

    def lift(self, vec) -> GWAElement:
        """An element whose coset is ``vec``; lines are glued by the remainder theorem."""
        if len(self.windows) == 1:
            return self.windows[0].lift(vec)
        parts = self._split(vec)
        jets: dict[int, list] = {}
        for n in sorted({n for w in self.windows for n in w.lines}):
            jets[n] = [(w.coeff_point(n), w.order,
                        w.line(part, n) if n in w.offset else (ZERO,) * w.d)
                       for w, part in zip(self.windows, parts)]
        terms = {}
        for n, data in jets.items():
            if not any(any(j) for _, _, j in data):
                continue
            pts = tuple(p for p, _, _ in data)
            orders = tuple(k for _, k, _ in data)
            poly = R.zero
            for p, k, jet in data:
                if any(jet):
                    poly += crt_idempotent(pts, orders, p) * from_taylor(jet, p, k)
            terms[n] = poly
        return GWAElement(terms)

    def act(self, x: GWAElement, vec) -> tuple:
        return tuple(a for w, part in zip(self.windows, self._split(vec))
                     for a in w.act(x, part))

    def gamma_matrices(self, point: Point, mono: int, near: bool) -> list[Matrix]:
        return [w.gamma_matrix(point, mono, near) for w in self.windows]

    def gamma_act(self, local, g, vec, near) -> tuple:
        return tuple(a for w, part in zip(self.windows, self._split(vec))
                     for a in w.gamma_act(local, g, part, near))

    def chi(self, vec) -> Fraction:
        for w, part in zip(self.windows, self._split(vec)):
            if w.point == ORIGIN:
                return w.chi(part)
        if self.dim == 0:
            return ZERO
        raise WindowError("the trivial character is undefined off the origin")

    def boundary_space(self) -> Subspace:
        vecs = []
        for o, w in zip(self.offsets, self.windows):
            for n in w.boundary:
                off = o + w.offset[n]
                vecs.extend(unit_vector(self.dim, off + k) for k in range(w.d))
        return Subspace.span(vecs, self.dim)


def gwa_window_dims(point, m: int, window: int, side: str = "left") -> dict:
    """Weight -> dimension for the window of ``A0/A0 m^m`` with ``|n| <= window``."""
    point = as_point(point)
    sign = 2 if side == "left" else -2
    allowed = [(point[0] + sign * n, point[1]) for n in range(-window, window + 1)]
    w = Window(point, m, side, allowed)
    return {w.weight(n): w.d for n in w.lines}


# ---------------------------------------------------------------- gluing

def glue_algebra(base: Algebra, chi: Sequence, with_labels: bool = True) -> Algebra:
    """``[[base, Qx], [0, base]]`` with ``a x b = chi(a) chi(b) x``.

    Elements are ``(a, xi, b)`` and multiply as
    ``(a a', chi(a) xi' + xi chi(b'), b b')``.  Maximal ideals of the base
    labelled ``l`` give ``U l`` (upper copy) and ``L l`` (lower copy).
    """
    n = base.dim
    dim = 2 * n + 1
    chi = tuple(chi)
    table = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(n):
        for j in range(n):
            for k, c in base.products[i][j]:
                table[i][j][k] = c
                table[n + 1 + i][n + 1 + j][n + 1 + k] = c
        table[i][n][n] = chi[i]
        table[n][n + 1 + i][n] = chi[i]
    unit = tuple(base.unit) + (ZERO,) + tuple(base.unit)
    names = [f"U:{s}" for s in base.names] + ["x"] + [f"L:{s}" for s in base.names]
    labels = None
    if with_labels:
        labels = {}
        for lab, sp in base.labels.items():
            up = [tuple(b) + (ZERO,) * (n + 1) for b in sp.basis]
            lo = [(ZERO,) * (n + 1) + tuple(b) for b in sp.basis]
            rest_lo = [unit_vector(dim, k) for k in range(n, dim)]
            rest_up = [unit_vector(dim, k) for k in range(n + 1)]
            labels[f"U{lab}"] = Subspace.span(up + rest_lo, dim)
            labels[f"L{lab}"] = Subspace.span(rest_up + lo, dim)
    return build_algebra([[tuple(v) for v in row] for row in table], unit, names,
                         check=False, labels=labels)


class GluedGamma:
    """The truncated ``Gamma = [[Gamma0, Qx], [0, Gamma0]]`` over finitely many points."""

    def __init__(self, points: Sequence, order: int):
        pts = [as_point(p) for p in points]
        if ORIGIN not in pts:
            raise ValueError("the glued pair needs the origin among its points")
        self.local = PolyLocal(pts, order)
        self.points = self.local.points
        self.order = order
        self.half = self.local.dim
        self.dim = 2 * self.half + 1
        self.chi_index = self.local.index(ORIGIN)
        self._algebra = None

    def algebra(self) -> Algebra:
        if self._algebra is None:
            chi = unit_vector(self.half, self.chi_index)
            self._algebra = glue_algebra(self.local.algebra(), chi)
        return self._algebra

    def split(self, vec: Sequence) -> tuple[tuple, Fraction, tuple]:
        n = self.half
        return tuple(vec[:n]), vec[n], tuple(vec[n + 1:])

    def join(self, upper: Sequence, xi, lower: Sequence) -> tuple:
        return tuple(upper) + (Fraction(xi),) + tuple(lower)

    def locate_label(self, label: str) -> tuple[str, Point]:
        copy, rest = label[0], label[1:]
        for p in self.points:
            if point_label(p) == rest and copy in "UL":
                return copy, p
        raise KeyError(label)


@dataclass(frozen=True)
class WordTriple:
    """Shape of a glued ideal word: ``[[P, eps x], [0, Q]]``.

    ``upper`` and ``lower`` map points to exponents of the products ``P`` and
    ``Q``; ``eps`` records whether the word contains ``x``.
    """

    upper: tuple
    eps: bool
    lower: tuple

    @property
    def upper_exps(self) -> dict:
        return dict(self.upper)

    @property
    def lower_exps(self) -> dict:
        return dict(self.lower)

    def has_x(self, side: str) -> bool:
        """Whether ``x`` survives in ``A/Aw`` (left) or ``A/wA`` (right)."""
        other = self.lower_exps if side == "left" else self.upper_exps
        return not (self.eps or other.get(ORIGIN, 0) == 0)


def _merge(a: dict, b: dict) -> tuple:
    out = dict(a)
    for p, e in b.items():
        out[p] = out.get(p, 0) + e
    return tuple(sorted(out.items()))


def word_triple(gg: GluedGamma, factors: Sequence[str]) -> WordTriple:
    """Symbolic product of the maximal ideals named by ``factors``."""
    cur = WordTriple((), True, ())
    first = True
    for lab in factors:
        copy, p = gg.locate_label(lab)
        one = WordTriple(((p, 1),), True, ()) if copy == "U" else \
            WordTriple((), True, ((p, 1),))
        if first:
            cur, first = one, False
            continue
        p1, q2 = cur.upper_exps, one.lower_exps
        eps = (one.eps and p1.get(ORIGIN, 0) == 0) or \
            (cur.eps and q2.get(ORIGIN, 0) == 0)
        cur = WordTriple(_merge(p1, one.upper_exps), eps,
                         _merge(cur.lower_exps, q2))
    for _, e in cur.upper + cur.lower:
        if e > gg.order:
            raise WindowError(f"exponent {e} exceeds the truncation order {gg.order}")
    return cur


# ---------------------------------------------------------------- quotient families

def _block_sum(mats: Sequence[Matrix], dim: int, offsets: Sequence[int]) -> list[list]:
    rows = [[ZERO] * dim for _ in range(dim)]
    for m, off in zip(mats, offsets):
        for i, r in enumerate(m.rows):
            for j, a in enumerate(r):
                if a:
                    rows[off + i][off + j] = a
    return rows


def _chi_index(ws: WindowSum) -> int | None:
    for off, w in zip(ws.offsets, ws.windows):
        if w.point == ORIGIN and 0 in w.offset:
            return off + w.offset[0]
    return None


def _word_exps(local: PolyLocal, factors: Sequence[str], order: int) -> dict:
    by = {point_label(p): p for p in local.points}
    exps: dict = {}
    for lab in factors:
        if lab not in by:
            raise KeyError(lab)
        exps[by[lab]] = exps.get(by[lab], 0) + 1
    for e in exps.values():
        if e > order:
            raise WindowError(f"exponent {e} exceeds the truncation order {order}")
    return exps


class GWAQuotientModule(QuotientModule):
    """``A0/A0 P`` or ``A0/P A0`` restricted to the truncated ``Gamma0``."""

    def __init__(self, fam: "GWAFamily", factors: Sequence[str], side: str):
        local = fam.local
        self.side = side
        self.factors = tuple(factors)
        self.sum = WindowSum(_word_exps(local, factors, fam.order), side,
                             local.points, fam.order)
        self.module = Module(fam.gamma, side, self.sum.dim, self._gamma(local, True),
                             check=False)
        oside = "right" if side == "left" else "left"
        self.opposite = Module(fam.gamma, oside, self.sum.dim,
                               self._gamma(local, False), check=False)
        self.cyclic = self.sum.coset(ONE_A)
        self.boundary = self.sum.boundary_space()

    def _gamma(self, local: PolyLocal, near: bool):
        def fn(i):
            p, k = local.locate(i)
            mats = self.sum.gamma_matrices(p, k, near)
            return Matrix(_block_sum(mats, self.sum.dim, self.sum.offsets), self.sum.dim)
        return fn

    def coset(self, x: GWAElement) -> tuple:
        return self.sum.coset(x)

    def lift(self, v) -> GWAElement:
        return self.sum.lift(v)

    def act(self, x: GWAElement, v) -> tuple:
        return self.sum.act(x, v)


@dataclass(frozen=True)
class GluedElement:
    """``(a, xi, b)`` in ``[[A0, Qx], [0, A0]]``."""

    upper: GWAElement
    xi: Fraction
    lower: GWAElement

    def __add__(self, other: "GluedElement") -> "GluedElement":
        return GluedElement(self.upper + other.upper, self.xi + other.xi,
                            self.lower + other.lower)

    def scale(self, a) -> "GluedElement":
        return GluedElement(self.upper.scale(a), Fraction(a) * self.xi,
                            self.lower.scale(a))

    def __mul__(self, other: "GluedElement") -> "GluedElement":
        xi = self.upper.chi() * other.xi + self.xi * other.lower.chi()
        return GluedElement(self.upper * other.upper, xi, self.lower * other.lower)

    def is_zero(self) -> bool:
        return self.upper.is_zero() and self.xi == 0 and self.lower.is_zero()


GLUED_ONE = GluedElement(ONE_A, ZERO, ONE_A)


class GluedQuotient(QuotientModule):
    """``A/Aw`` or ``A/wA`` for the glued pair, as ``(upper, x line, lower)``.

    Both quotients carry the same two actions of ``(a, xi, b)`` on
    ``(u, t, v)``: on the left ``(a u, chi(a) t + xi chi(v), b v)`` and on the
    right ``(u a, chi(u) xi + t chi(b), v b)``.
    """

    def __init__(self, fam: "GluedFamily", factors: Sequence[str], side: str):
        gg = fam.glued
        self.fam = fam
        self.side = side
        self.factors = tuple(factors)
        self.triple = word_triple(gg, factors)
        pts = gg.points
        self.upper = WindowSum(self.triple.upper_exps, side, pts, gg.order)
        self.lower = WindowSum(self.triple.lower_exps, side, pts, gg.order)
        self.has_x = self.triple.has_x(side)
        nu = self.upper.dim
        self.t_index = nu if self.has_x else None
        self.lower_offset = nu + (1 if self.has_x else 0)
        dim = self.lower_offset + self.lower.dim
        self.upper_chi = _chi_index(self.upper)
        self.lower_chi = _chi_index(self.lower)
        own = side == "left"
        self.module = Module(fam.gamma, side, dim, self._gamma(own, True), check=False)
        oside = "right" if side == "left" else "left"
        self.opposite = Module(fam.gamma, oside, dim, self._gamma(not own, False),
                               check=False)
        self.cyclic = self.coset(GLUED_ONE)
        vecs = [tuple(b) + (ZERO,) * (dim - nu)
                for b in self.upper.boundary_space().basis]
        vecs += [(ZERO,) * self.lower_offset + tuple(b)
                 for b in self.lower.boundary_space().basis]
        self.boundary = Subspace.span(vecs, dim)

    @property
    def dim(self) -> int:
        return self.module.dim

    def _gamma(self, left_formula: bool, near: bool):
        gg = self.fam.glued
        local = gg.local
        dim = self.lower_offset + self.lower.dim
        t = self.t_index

        def fn(i):
            if i == gg.half:
                rows = [[ZERO] * dim for _ in range(dim)]
                if t is not None:
                    src = (self.lower_offset + self.lower_chi) if left_formula \
                        else self.upper_chi
                    rows[t][src] = ONE
                return Matrix(rows, dim)
            upper_copy = i < gg.half
            p, k = local.locate(i if upper_copy else i - gg.half - 1)
            if upper_copy:
                mats = self.upper.gamma_matrices(p, k, near)
                rows = _block_sum(mats, dim, self.upper.offsets)
            else:
                mats = self.lower.gamma_matrices(p, k, near)
                rows = _block_sum(mats, dim,
                                  [self.lower_offset + o for o in self.lower.offsets])
            if t is not None and p == ORIGIN and k == 0 and upper_copy == left_formula:
                rows[t][t] = ONE
            return Matrix(rows, dim)
        return fn

    def _parts(self, v):
        nu = self.upper.dim
        u = tuple(v[:nu])
        t = v[self.t_index] if self.has_x else ZERO
        return u, t, tuple(v[self.lower_offset:])

    def _join(self, u, t, low) -> tuple:
        return tuple(u) + ((Fraction(t),) if self.has_x else ()) + tuple(low)

    def coset(self, x: GluedElement) -> tuple:
        return self._join(self.upper.coset(x.upper), x.xi, self.lower.coset(x.lower))

    def lift(self, v) -> GluedElement:
        u, t, low = self._parts(v)
        return GluedElement(self.upper.lift(u), Fraction(t), self.lower.lift(low))

    def act(self, x: GluedElement, v) -> tuple:
        u, t, low = self._parts(v)
        if self.side == "left":
            nt = x.upper.chi() * t + x.xi * self.lower.chi(low) if self.has_x else 0
        else:
            nt = self.upper.chi(u) * x.xi + t * x.lower.chi() if self.has_x else 0
        return self._join(self.upper.act(x.upper, u), nt, self.lower.act(x.lower, low))


class GWAFamily(QuotientFamily):
    """``Gamma0 <= A0`` with ``Gamma0`` truncated to finitely many points."""

    def __init__(self, points: Sequence, order: int):
        self.local = PolyLocal(points, order)
        self.order = order
        self.gamma = self.local.algebra()
        self._cache: dict = {}

    def quotient(self, factors, side) -> GWAQuotientModule:
        key = (tuple(factors), side)
        if key not in self._cache:
            self._cache[key] = GWAQuotientModule(self, factors, side)
        return self._cache[key]

    def embed(self, g) -> GWAElement:
        return GWAElement.poly(self.local.lift(g))

    def mul(self, x, y):
        return x * y

    def add(self, x, y):
        return x + y

    def scale(self, a, x):
        return x.scale(a)

    def one(self):
        return ONE_A


class GluedFamily(QuotientFamily):
    def __init__(self, points: Sequence, order: int):
        self.glued = GluedGamma(points, order)
        self.order = order
        self.gamma = self.glued.algebra()
        self._cache: dict = {}

    def quotient(self, factors, side) -> GluedQuotient:
        key = (tuple(factors), side)
        if key not in self._cache:
            self._cache[key] = GluedQuotient(self, factors, side)
        return self._cache[key]

    def embed(self, g) -> GluedElement:
        u, xi, low = self.glued.split(g)
        lift = self.glued.local.lift
        return GluedElement(GWAElement.poly(lift(u)), Fraction(xi),
                            GWAElement.poly(lift(low)))

    def mul(self, x, y):
        return x * y

    def add(self, x, y):
        return x + y

    def scale(self, a, x):
        return x.scale(a)

    def one(self):
        return GLUED_ONE


# ---------------------------------------------------------------- GWA double quotients

@dataclass
class MembershipCertificate:
    """``X^n = u X^n + X^n v`` with ``u`` in ``m^i`` and ``v`` in ``m^j``."""

    n: int
    u: object
    v: object
    degree: int

    def verify(self, point, i: int, j: int) -> bool:
        point = as_point(point)
        xn = GWAElement.x(self.n)
        lhs = GWAElement.poly(self.u) * xn + xn * GWAElement.poly(self.v)
        return lhs == xn and _vanishes(self.u, point, i) and _vanishes(self.v, point, j)


def _vanishes(poly, point: Point, order: int) -> bool:
    return not any(taylor(poly, point, order))


def _shifted_monomials(point: Point, low: int, degree: int) -> list:
    a, b = to_qq(point[0]), to_qq(point[1])
    return [(H - a) ** i * (C - b) ** j for i, j in monomials(degree + 1)
            if i + j >= low]


def membership_certificate(point, i: int, j: int, n: int,
                           max_degree: int = 12) -> MembershipCertificate:
    """Solve ``sigma^-n(u) + v = 1`` for ``u`` in ``m^i``, ``v`` in ``m^j``.

    Then ``u X^n + X^n v = X^n (sigma^-n(u) + v) = X^n``, so ``X^n`` lies in
    ``m^i A0 + A0 m^j``.
    """
    if n == 0:
        raise ValueError("X^0 is not in the ideal")
    point = as_point(point)
    for degree in range(i + j - 1, max_degree + 1):
        us = _shifted_monomials(point, i, degree)
        vs = _shifted_monomials(point, j, degree)
        cols = [sigma(g, -n) for g in us] + list(vs)
        keys = sorted({m for g in cols for m in g.keys()} | {(0, 0)})
        mat = Matrix.from_columns(
            [[to_fraction(g.coeff(H ** e[0] * C ** e[1])) for e in keys] for g in cols],
            len(keys))
        rhs = [ONE if e == (0, 0) else ZERO for e in keys]
        sol = solve(mat, rhs)
        if sol is not None:
            u = sum((to_qq(c) * g for c, g in zip(sol, us)), R.zero)
            v = sum((to_qq(c) * g for c, g in zip(sol[len(us):], vs)), R.zero)
            return MembershipCertificate(n, u, v, degree)
    raise WindowError(f"no certificate of degree <= {max_degree}")


@dataclass
class GWADoubleQuotient:
    """``A0/(m^i A0 + A0 m^j)`` with its comparison to ``Gamma0/(m^i + m^j)``."""

    stage: object
    dim: int
    expected: int
    bijective: bool
    bimodule: bool
    certificates: list

    @property
    def ok(self) -> bool:
        return (self.dim == self.expected and self.bijective and self.bimodule
                and all(c.ok for c in self.certificates))


@dataclass
class CertifiedMember:
    n: int
    certificate: MembershipCertificate
    ok: bool


def gwa_double_quotient(point, i: int, j: int, window: int) -> GWADoubleQuotient:
    """The stage at ``(m^j, m^i)`` and the map ``g -> g X^0`` from ``Gamma0/m^min(i,j)``.

    Every ``X^n`` with ``0 < |n| <= window`` is certified to lie in
    ``m^i A0 + A0 m^j``.
    """
    from .hc import PairPresentation
    from .linalg import rank
    from .stages import double_quotient
    point = as_point(point)
    fam = gwa_family_window(point, max(i, j), window)
    pp = PairPresentation(fam.gamma, fam)
    lab = point_label(point)
    dq = double_quotient(pp, (lab,) * j, (lab,) * i)
    k = min(i, j)
    small = PolyLocal([point], k)
    images = [dq.coset(GWAElement.poly(small.lift(unit_vector(small.dim, s))))
              for s in range(small.dim)]
    bijective = dq.dim == small.dim and rank(
        Matrix.from_columns(images, dq.dim)) == dq.dim
    bimodule = True
    big = fam.local
    for g in range(big.dim):
        q, kk = big.locate(g)
        if q != point or kk >= small.dim:
            continue
        gvec = fam.gamma.basis(g)
        for s in range(small.dim):
            prod = small.mul(unit_vector(small.dim, kk), unit_vector(small.dim, s))
            want = dq.coset(GWAElement.poly(small.lift(prod)))
            if dq.left.act(gvec, images[s]) != want or \
                    dq.right.act(gvec, images[s]) != want:
                bimodule = False
    certs = []
    for n in [n for n in range(-window, window + 1) if n]:
        cert = membership_certificate(point, i, j, n)
        certs.append(CertifiedMember(n, cert, cert.verify(point, i, j)))
    return GWADoubleQuotient(dq, dq.dim, k * (k + 1) // 2, bijective, bimodule, certs)


def gwa_family_window(point, order: int, window: int) -> GWAFamily:
    """Truncated ``Gamma0`` at the weights ``sigma^n(point)``, ``|n| <= window``."""
    point = as_point(point)
    pts = [(point[0] + 2 * k, point[1]) for k in range(-window, window + 1)]
    return GWAFamily(pts, order)


# ---------------------------------------------------------------- the nonsplit module

@dataclass
class NonsplitWitness:
    dim: int
    invariant_lines: int
    ext_dim: int
    sub_label: str
    quotient_label: str

    @property
    def ok(self) -> bool:
        return self.dim == 2 and self.invariant_lines == 1 and self.ext_dim >= 1


def nonsplit_witness(order: int = 2) -> NonsplitWitness:
    """``[Qx; Gamma0/z]``: ``(a, xi, b)`` acts by ``[[chi(a), xi], [0, chi(b)]]``."""
    from .algebra import hom_space
    from .blocks import ext1_dim
    gg = GluedGamma([ORIGIN], order)
    alg = gg.algebra()

    def action(i):
        u, xi, low = gg.split(alg.basis(i))
        return Matrix([[u[gg.chi_index], xi], [ZERO, low[gg.chi_index]]], 2)
    mod = Module(alg, "left", 2, action)
    up = alg.max_ideal("U" + point_label(ORIGIN))
    lo = alg.max_ideal("L" + point_label(ORIGIN))
    lines = 0
    for m in (up, lo):
        homs = hom_space(m.simple, mod)
        lines += len(homs)
    return NonsplitWitness(mod.dim, lines, ext1_dim(lo, up), up.label, lo.label)


# ---------------------------------------------------------------- a fully finite model

@dataclass
class FiniteModel:
    """A finite-dimensional glued pair built from a truncated GWA window."""

    big: Algebra
    gamma: Algebra
    embedding: Matrix
    base_dim: int
    gamma_base_dim: int


def finite_glued_model(order: int = 1, window: int = 1) -> FiniteModel:
    """Glue the matrix algebra generated by ``e, f, h, c`` on a window of ``A0/A0 z^order``.

    The window keeps lines ``|n| <= window``; actions leaving it are dropped,
    so the generated matrix algebra is an honest finite-dimensional algebra.
    Its subalgebra generated by ``h, c`` plays ``Gamma0``.  The character is
    the action on the top of line 0, which is a quotient module.
    """
    from .algebra import algebra_from_matrices, subalgebra_generated
    allowed = [(2 * n, 0) for n in range(-window, window + 1)]
    win = Window(ORIGIN, order, "left", allowed)
    d = win.dim

    def op(x: GWAElement) -> Matrix:
        return Matrix.from_columns([win.act(x, unit_vector(d, k)) for k in range(d)], d)
    gens = [op(E), op(F), op(HH), op(CC)]
    base_mats = subalgebra_generated(gens)
    gamma_mats = subalgebra_generated(gens[2:])
    base, coords = algebra_from_matrices(base_mats)
    top = win.offset[0]
    chi = []
    for mat in base_mats:
        chi.append(mat.rows[top][top])
    # the top of line 0 must be a quotient: nothing maps into it from elsewhere
    kernel = [k for k in range(d) if k != top]
    for mat in base_mats:
        for k in kernel:
            if mat.rows[top][k]:
                raise ValueError("line-0 top is not a quotient module")
    big = glue_algebra(base, chi, with_labels=False)
    gbase, gcoords = algebra_from_matrices(gamma_mats)
    gchi = [m.rows[top][top] for m in gamma_mats]
    gamma = glue_algebra(gbase, gchi, with_labels=False)
    n, gn = base.dim, gbase.dim
    cols = []
    for s in range(gamma.dim):
        col = [ZERO] * big.dim
        if s < gn:
            for t, a in enumerate(coords(gamma_mats[s])):
                col[t] = a
        elif s == gn:
            col[n] = ONE
        else:
            for t, a in enumerate(coords(gamma_mats[s - gn - 1])):
                col[n + 1 + t] = a
        cols.append(col)
    return FiniteModel(big, gamma, Matrix.from_columns(cols, big.dim), n, gn)


# ---------------------------------------------------------------- generators

@dataclass
class GWAWindowModule:
    """``A0/A0 m^m`` (or ``A0/m^m A0``) on the lines ``|n| <= window``."""

    point: Point
    order: int
    window: int
    side: str
    family: GWAFamily
    quotient: GWAQuotientModule
    operators: dict  # name -> Matrix, with actions leaving the window dropped
    weight_dims: dict  # weight -> dim
    boundary: tuple  # weights on the edge lines

    @property
    def cyclic(self) -> tuple:
        return self.quotient.cyclic

    @property
    def interior(self) -> dict:
        return {w: d for w, d in self.weight_dims.items() if w not in self.boundary}


def gwa_quotient(point, m: int, window: int, side: str = "left") -> GWAWindowModule:
    if m < 1 or window < 1:
        raise ValueError("order and window must be positive")
    point = as_point(point)
    sign = 2 if side == "left" else -2
    pts = [(point[0] + sign * n, point[1]) for n in range(-window, window + 1)]
    fam = GWAFamily(pts, m)
    q = fam.quotient((point_label(point),) * m, side)
    win = q.sum.windows[0]
    ops = {}
    for name, x in (("e", E), ("f", F), ("h", HH), ("c", CC)):
        ops[name] = Matrix.from_columns(
            [win.act(x, unit_vector(win.dim, k)) for k in range(win.dim)], win.dim)
    dims = {win.weight(n): win.d for n in win.lines}
    edge = tuple(win.weight(n) for n in win.boundary)
    _check_window_relations(win, ops)
    return GWAWindowModule(point, m, window, side, fam, q, ops, dims, edge)


def _check_window_relations(win: Window, ops: dict) -> None:
    """``[e,f] = h``, ``[h,e] = 2e``, ``[h,f] = -2f`` on columns away from the edge."""
    e, f, h = ops["e"], ops["f"], ops["h"]
    if win.side == "right":
        # right actions compose in the opposite order
        e, f, h = e.T, f.T, h.T
    checks = ((e @ f - f @ e, h), (h @ e - e @ h, e.scale(2)), (h @ f - f @ h, f.scale(-2)))
    for n in win.lines:
        if n in win.boundary:
            continue
        for k in range(win.d):
            col = win.offset[n] + k
            for lhs, rhs in checks:
                if lhs.column(col) != rhs.column(col):
                    raise RuntimeError(f"sl2 relation fails on line {n}")


def glued_pair(window: int = 2, order: int = 3, extra: Sequence = ()):
    """The glued pair truncated to the points ``(2j, 0)``, ``|j| <= window``."""
    from .hc import PairPresentation
    pts = [(2 * j, 0) for j in range(-window, window + 1)]
    pts += [as_point(p) for p in extra if as_point(p) not in pts]
    fam = GluedFamily(pts, order)
    return PairPresentation(fam.gamma, fam)


def glued_labels() -> tuple[str, str]:
    """Labels of the two origin ideals: the upper one and the lower one."""
    return "U" + point_label(ORIGIN), "L" + point_label(ORIGIN)
