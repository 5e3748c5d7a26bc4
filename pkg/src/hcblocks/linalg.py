"""Exact linear algebra over the rationals, with an optional prime-field mode.

Vectors are tuples of :class:`fractions.Fraction` (or of ints reduced modulo
``p`` when a modulus is given).  Every routine returns canonical data: row
reduced echelon forms are unique, so two subspaces are equal exactly when
their stored bases are equal.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class LinalgError(ValueError):
    """Raised on shape mismatches and violated preconditions."""


class DimensionGuardError(RuntimeError):
    """Raised when a space would exceed the ``HCB_MAX_DIM`` cap."""


def max_dim() -> int:
    return int(os.environ.get("HCB_MAX_DIM", "512"))


def guard(n: int, what: str = "space") -> None:
    cap = max_dim()
    if n > cap:
        raise DimensionGuardError(
            f"{what} has dimension {n}, above HCB_MAX_DIM={cap}")


# ---------------------------------------------------------------- scalars

def scalar(x, modulus: int | None = None):
    """Coerce ``x`` (int, Fraction or ``"p/q"`` string) to a field element."""
    if isinstance(x, str):
        x = parse_rational(x)
    if modulus is None:
        return x if isinstance(x, Fraction) else Fraction(x)
    x = Fraction(x)
    if x.denominator % modulus == 0:
        raise LinalgError(f"{x} has no image modulo {modulus}")
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` with q > 0."""
    s = text.strip()
    num, slash, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if slash else 1
    except ValueError:
        raise LinalgError(f"malformed rational {text!r}") from None
    if q == 0:
        raise LinalgError(f"zero denominator in {text!r}")
    if q < 0:
        raise LinalgError(f"negative denominator in {text!r}")
    return Fraction(p, q)


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _inv(x, modulus):
    if modulus is None:
        return 1 / x
    return pow(x, -1, modulus)


def _norm(x, modulus):
    return x if modulus is None else x % modulus


# ---------------------------------------------------------------- vectors

def zero_vector(n: int) -> tuple:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> tuple:
    v = [ZERO] * n
    v[i] = ONE
    return tuple(v)


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def is_zero(v: Sequence) -> bool:
    return not any(v)


def lincomb(coeffs: Sequence, vectors: Sequence[Sequence], n: int) -> tuple:
    out = [ZERO] * n
    for c, vec in zip(coeffs, vectors):
        if c:
            for j, a in enumerate(vec):
                if a:
                    out[j] += c * a
    return tuple(out)


# ---------------------------------------------------------------- matrices

class Matrix:
    """Immutable dense matrix stored row-major."""

    __slots__ = ("rows", "nrows", "ncols", "_nz")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(Fraction(a) if not isinstance(a, Fraction) else a
                           for a in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise LinalgError("ragged matrix rows")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self._nz = None

    @classmethod
    def _raw(cls, rows: tuple, ncols: int) -> "Matrix":
        m = cls.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m._nz = None
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(tuple(unit_vector(n, i) for i in range(n)), n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "Matrix":
        return cls._raw(tuple(zero_vector(c) for _ in range(r)), c)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        return cls._raw(tuple(tuple(col[i] for col in cols)
                              for i in range(nrows)), len(cols))

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Sequence) -> "Matrix":
        if len(entries) != nrows * ncols:
            raise LinalgError("entries length does not match shape")
        return cls((entries[i * ncols:(i + 1) * ncols] for i in range(nrows)),
                   ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def entries(self) -> tuple:
        return tuple(a for r in self.rows for a in r)

    def nonzeros(self):
        if self._nz is None:
            self._nz = tuple(tuple((j, a) for j, a in enumerate(r) if a)
                             for r in self.rows)
        return self._nz

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(tuple(zip(*self.rows)) if self.nrows else
                           tuple(() for _ in range(self.ncols)), self.nrows)

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum((a * v[j] for j, a in row), ZERO)
                     for row in self.nonzeros())

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise LinalgError(f"shape mismatch {self.shape} @ {other.shape}")
            onz = other.nonzeros()
            n = other.ncols
            out = []
            for row in self.nonzeros():
                acc = [ZERO] * n
                for k, a in row:
                    for j, b in onz[k]:
                        acc[j] += a * b
                out.append(tuple(acc))
            return Matrix._raw(tuple(out), n)
        return self.apply(other)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise LinalgError("shape mismatch in addition")
        return Matrix._raw(tuple(vadd(a, b) for a, b in zip(self.rows, other.rows)),
                           self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise LinalgError("shape mismatch in subtraction")
        return Matrix._raw(tuple(vsub(a, b) for a, b in zip(self.rows, other.rows)),
                           self.ncols)

    def __neg__(self) -> "Matrix":
        return self.scale(-ONE)

    def scale(self, c) -> "Matrix":
        return Matrix._raw(tuple(vscale(c, r) for r in self.rows), self.ncols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.shape == other.shape
                and self.rows == other.rows)

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(a) for a in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    def tolist(self) -> list[list[str]]:
        return [[format_rational(a) for a in r] for r in self.rows]


def matrix_sum(terms: Iterable[tuple], nrows: int, ncols: int) -> Matrix:
    """Return sum(c * M) over ``(c, M)`` pairs, skipping zero coefficients."""
    acc = [[ZERO] * ncols for _ in range(nrows)]
    for c, m in terms:
        if not c:
            continue
        for i, row in enumerate(m.nonzeros()):
            ai = acc[i]
            for j, a in row:
                ai[j] += c * a
    return Matrix._raw(tuple(tuple(r) for r in acc), ncols)


def block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    m = sum(b.ncols for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for r in b.rows:
            rows.append((ZERO,) * off + r + (ZERO,) * (m - off - b.ncols))
        off += b.ncols
    return Matrix._raw(tuple(rows), m)


# ---------------------------------------------------------------- elimination

class _Echelon:
    """Incrementally maintained reduced echelon basis."""

    __slots__ = ("n", "modulus", "rows")

    def __init__(self, n: int, modulus: int | None = None):
        self.n = n
        self.modulus = modulus
        self.rows: dict[int, list] = {}

    def reduce(self, v) -> list:
        p = self.modulus
        v = [a if p is not None or isinstance(a, Fraction) else Fraction(a) for a in v]
        for piv, row in self.rows.items():
            c = v[piv]
            if c:
                for j in range(piv, self.n):
                    if row[j]:
                        v[j] = _norm(v[j] - c * row[j], p)
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        piv = next((j for j, a in enumerate(v) if a), None)
        if piv is None:
            return False
        p = self.modulus
        inv = _inv(v[piv], p)
        v = [_norm(a * inv, p) for a in v]
        nz = [j for j in range(piv, self.n) if v[j]]
        for row in self.rows.values():
            c = row[piv]
            if c:
                for j in nz:
                    row[j] = _norm(row[j] - c * v[j], p)
        self.rows[piv] = v
        return True

    def __len__(self) -> int:
        return len(self.rows)

    def basis(self) -> tuple[tuple, tuple[int, ...]]:
        pivs = tuple(sorted(self.rows))
        return tuple(tuple(self.rows[k]) for k in pivs), pivs


def rref(m: Matrix | Sequence[Sequence], modulus: int | None = None
         ) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns.

    Pivots are taken in column order, the pivot row being the first row with a
    nonzero entry in that column.  The result is padded with zero rows to the
    original shape.
    """
    if not isinstance(m, Matrix):
        m = Matrix(m)
    p = modulus
    rows = [[_norm(scalar(a, p), p) if p is not None else a for a in r]
            for r in m.rows]
    nrows, ncols = m.nrows, m.ncols
    pivots = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        k = next((i for i in range(r, nrows) if rows[i][col]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = _inv(rows[r][col], p)
        prow = [_norm(a * inv, p) for a in rows[r]]
        rows[r] = prow
        nz = [j for j in range(col, ncols) if prow[j]]
        for i in range(nrows):
            if i != r:
                c = rows[i][col]
                if c:
                    ri = rows[i]
                    for j in nz:
                        ri[j] = _norm(ri[j] - c * prow[j], p)
        pivots.append(col)
        r += 1
    zero = 0 if p is not None else ZERO
    out = Matrix._raw(tuple(tuple(row) for row in rows), ncols) if p is None else \
        _IntMatrix(rows, ncols, zero)
    return out, tuple(pivots)


def _IntMatrix(rows, ncols, zero):
    m = Matrix.__new__(Matrix)
    m.rows = tuple(tuple(r) for r in rows)
    m.nrows = len(rows)
    m.ncols = ncols
    m._nz = None
    return m


def rank(m: Matrix | Sequence[Sequence], modulus: int | None = None) -> int:
    if not isinstance(m, Matrix):
        m = Matrix(m)
    e = _Echelon(m.ncols, modulus)
    for r in m.rows:
        e.add(r if modulus is None else [scalar(a, modulus) for a in r])
        if len(e) == m.ncols:
            break
    return len(e)


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``ambient_dim``-space with its canonical RREF basis."""

    ambient_dim: int
    basis: tuple[tuple, ...]
    pivots: tuple[int, ...]
    modulus: int | None = None

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int,
             modulus: int | None = None) -> "Subspace":
        e = _Echelon(ambient_dim, modulus)
        for v in vectors:
            if len(v) != ambient_dim:
                raise LinalgError("vector length does not match ambient dimension")
            if modulus is not None:
                v = [scalar(a, modulus) for a in v]
            e.add(v)
            if len(e) == ambient_dim:
                break
        basis, pivots = e.basis()
        return cls(ambient_dim, basis, pivots, modulus)

    @classmethod
    def zero(cls, ambient_dim: int, modulus: int | None = None) -> "Subspace":
        return cls(ambient_dim, (), (), modulus)

    @classmethod
    def full(cls, ambient_dim: int, modulus: int | None = None) -> "Subspace":
        one = 1 if modulus is not None else ONE
        zero = 0 if modulus is not None else ZERO
        basis = tuple(tuple(one if j == i else zero for j in range(ambient_dim))
                      for i in range(ambient_dim))
        return cls(ambient_dim, basis, tuple(range(ambient_dim)), modulus)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    def _echelon(self) -> _Echelon:
        e = _Echelon(self.ambient_dim, self.modulus)
        e.rows = {p: list(r) for p, r in zip(self.pivots, self.basis)}
        return e

    def reduce(self, v: Sequence) -> tuple:
        """Canonical remainder of ``v``: zero in every pivot column."""
        v = list(v)
        p = self.modulus
        for piv, row in zip(self.pivots, self.basis):
            c = v[piv]
            if c:
                for j in range(piv, self.ambient_dim):
                    if row[j]:
                        v[j] = _norm(v[j] - c * row[j], p)
        return tuple(v)

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` in the stored basis (``v`` must lie in the span)."""
        return tuple(v[p] for p in self.pivots)

    def from_coordinates(self, coords: Sequence) -> tuple:
        return lincomb(coords, self.basis, self.ambient_dim)

    def __le__(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(other.contains(b) for b in self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def complement_columns(self) -> tuple[int, ...]:
        """Non-pivot columns; the unit vectors there span a complement."""
        piv = set(self.pivots)
        return tuple(j for j in range(self.ambient_dim) if j not in piv)

    def quotient_coordinates(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` modulo this subspace, on the complement columns."""
        r = self.reduce(v)
        return tuple(r[j] for j in self.complement_columns())


def _check_ambient(u: Subspace, v: Subspace) -> None:
    if u.ambient_dim != v.ambient_dim:
        raise LinalgError(
            f"ambient dimension mismatch: {u.ambient_dim} vs {v.ambient_dim}")
    if u.modulus != v.modulus:
        raise LinalgError("subspaces live over different fields")


def kernel(m: Matrix, modulus: int | None = None) -> Subspace:
    """Right kernel ``{v : m v = 0}``."""
    if not isinstance(m, Matrix):
        m = Matrix(m)
    red, pivots = rref(m, modulus)
    n = m.ncols
    pset = set(pivots)
    one = 1 if modulus is not None else ONE
    zero = 0 if modulus is not None else ZERO
    vecs = []
    for f in range(n):
        if f in pset:
            continue
        v = [zero] * n
        v[f] = one
        for i, pc in enumerate(pivots):
            a = red.rows[i][f]
            if a:
                v[pc] = _norm(-a, modulus)
        vecs.append(v)
    return Subspace.span(vecs, n, modulus)


def kernel_of_rows(rows: Iterable[Sequence], n: int,
                   modulus: int | None = None) -> Subspace:
    """Kernel of the matrix whose rows are ``rows`` (a row space is formed first)."""
    rs = Subspace.span(rows, n, modulus)
    if rs.is_zero():
        return Subspace.full(n, modulus)
    return kernel(Matrix._raw(rs.basis, n) if modulus is None
                  else _IntMatrix(rs.basis, n, 0), modulus)


def annihilator(u: Subspace) -> Subspace:
    """Vectors ``y`` with ``y . b = 0`` for every basis vector ``b`` of ``u``."""
    return kernel_of_rows(u.basis, u.ambient_dim, u.modulus)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    _check_ambient(u, v)
    return Subspace.span(u.basis + v.basis, u.ambient_dim, u.modulus)


def subspace_intersect(u: Subspace, v: Subspace) -> Subspace:
    """Intersection by the Zassenhaus scheme on doubled vectors."""
    _check_ambient(u, v)
    n = u.ambient_dim
    p = u.modulus
    zero = 0 if p is not None else ZERO
    e = _Echelon(2 * n, p)
    for b in u.basis:
        e.add(tuple(b) + tuple(b))
    for b in v.basis:
        e.add(tuple(b) + (zero,) * n)
    basis, pivots = e.basis()
    out = [r[n:] for r, piv in zip(basis, pivots) if piv >= n]
    return Subspace.span(out, n, p)


def quotient_basis(w: Subspace, u: Subspace) -> tuple[tuple, ...]:
    """Coset representatives for ``w / u``, drawn from the basis of ``w``.

    Working in the coordinates of ``w``, the basis vectors of ``w`` sitting at
    the non-pivot positions of ``u`` complete ``u`` to ``w``.
    """
    _check_ambient(u, w)
    if not u <= w:
        raise LinalgError("quotient_basis requires u to be contained in w")
    uc = Subspace.span((w.coordinates(b) for b in u.basis), w.dim, w.modulus)
    return tuple(w.basis[j] for j in uc.complement_columns())


def solve(m: Matrix, b: Sequence, modulus: int | None = None):
    """One solution ``x`` of ``m x = b`` (free variables zero) or ``None``."""
    aug = Matrix._raw(tuple(tuple(r) + (b[i],) for i, r in enumerate(m.rows)),
                      m.ncols + 1)
    red, pivots = rref(aug, modulus)
    if pivots and pivots[-1] == m.ncols:
        return None
    zero = 0 if modulus is not None else ZERO
    x = [zero] * m.ncols
    for i, pc in enumerate(pivots):
        x[pc] = red.rows[i][m.ncols]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    n = m.nrows
    if m.ncols != n:
        raise LinalgError("inverse of a non-square matrix")
    aug = Matrix._raw(tuple(r + unit_vector(n, i) for i, r in enumerate(m.rows)),
                      2 * n)
    red, pivots = rref(aug)
    if pivots[:n] != tuple(range(n)) or len(pivots) < n:
        raise LinalgError("matrix is singular")
    return Matrix._raw(tuple(r[n:] for r in red.rows), n)


def image(m: Matrix, modulus: int | None = None) -> Subspace:
    return Subspace.span((m.column(j) for j in range(m.ncols)), m.nrows, modulus)


def minimal_polynomial(m: Matrix) -> tuple:
    """Coefficients (constant term first) of the monic minimal polynomial."""
    n = m.nrows
    powers = [Matrix.identity(n)]
    e = _Echelon(n * n)
    flat = [powers[0].entries]
    e.add(flat[0])
    while True:
        nxt = powers[-1] @ m
        v = nxt.entries
        cols = flat + [v]
        mat = Matrix.from_columns(cols[:-1], n * n)
        sol = solve(mat, v)
        if sol is not None:
            return tuple(-a for a in sol) + (ONE,)
        powers.append(nxt)
        flat.append(v)
