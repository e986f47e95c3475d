"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`. Vectors are tuples of Fractions,
matrices are :class:`RatMatrix`. Nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from carnotcert import _backend

Rat = Fraction
Vector = tuple  # tuple[Fraction, ...]


class DimensionError(ValueError):
    pass


def to_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals: %r" % (x,))
    return Fraction(x)


def vec(xs: Iterable) -> Vector:
    return tuple(to_rat(x) for x in xs)


def zero_vec(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vec(n: int, i: int) -> Vector:
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return tuple(v)


def vadd(a: Sequence, b: Sequence) -> Vector:
    if len(a) != len(b):
        raise DimensionError("vector lengths %d and %d differ" % (len(a), len(b)))
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> Vector:
    if len(a) != len(b):
        raise DimensionError("vector lengths %d and %d differ" % (len(a), len(b)))
    return tuple(x - y for x, y in zip(a, b))


def vscale(r, a: Sequence) -> Vector:
    r = to_rat(r)
    return tuple(r * x for x in a)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def format_rat(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def format_vec(v: Sequence) -> list:
    return [format_rat(x) for x in v]


def parse_vec(items: Sequence) -> Vector:
    return tuple(to_rat(x) for x in items)


def integer_row(row: Sequence[Fraction]) -> list:
    """Scale a rational row by the lcm of its denominators."""
    d = 1
    for x in row:
        d = lcm(d, x.denominator)
    return [int(x * d) for x in row]


@dataclass(frozen=True)
class RatMatrix:
    rows: tuple  # tuple of row tuples
    ncols: int = field(default=-1)

    def __post_init__(self):
        rows = tuple(vec(r) for r in self.rows)
        ncols = self.ncols
        if rows:
            widths = {len(r) for r in rows}
            if len(widths) != 1:
                raise DimensionError("ragged matrix rows")
            (w,) = widths
            if ncols >= 0 and ncols != w:
                raise DimensionError("declared %d columns, rows have %d" % (ncols, w))
            ncols = w
        elif ncols < 0:
            ncols = 0
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RatMatrix":
        return cls(tuple(zero_vec(ncols) for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(tuple(unit_vec(n, i) for i in range(n)), n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "RatMatrix":
        if not cols:
            return cls.zeros(nrows, 0)
        return cls(tuple(zip(*cols)), len(cols))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(tuple(zip(*self.rows)) if self.rows else (), self.nrows)

    T = property(transpose)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch %s vs %s" % (self.shape, other.shape))
        return RatMatrix(tuple(vadd(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(tuple(tuple(-x for x in r) for r in self.rows), self.ncols)

    def scale(self, r) -> "RatMatrix":
        return RatMatrix(tuple(vscale(r, row) for row in self.rows), self.ncols)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise DimensionError("matrix has %d columns, vector has %d entries" % (self.ncols, len(v)))
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.rows)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise DimensionError("cannot multiply %s by %s" % (self.shape, other.shape))
        cols = [other.column(j) for j in range(other.ncols)]
        return RatMatrix(
            tuple(tuple(sum((a * b for a, b in zip(row, c)), Fraction(0)) for c in cols) for row in self.rows),
            other.ncols,
        )

    def is_antisymmetric(self) -> bool:
        n = self.nrows
        if n != self.ncols:
            return False
        return all(self.rows[i][j] == -self.rows[j][i] for i in range(n) for j in range(i, n))

    def to_json(self) -> list:
        return [format_vec(r) for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "RatMatrix":
        return cls(tuple(parse_vec(r) for r in data))


def outer(u: Sequence, w: Sequence) -> RatMatrix:
    return RatMatrix(tuple(tuple(a * b for b in w) for a in u), len(w))


def wedge(u: Sequence, w: Sequence) -> RatMatrix:
    """The antisymmetric matrix u w^T - w u^T."""
    n = len(u)
    return RatMatrix(tuple(tuple(u[i] * w[j] - w[i] * u[j] for j in range(n)) for i in range(n)), n)


def rank(M) -> int:
    """Exact rank of a rational matrix (rows may be any rational-coercible values)."""
    rows = M.rows if isinstance(M, RatMatrix) else [vec(r) for r in M]
    if not rows:
        return 0
    return _backend.rank_int([integer_row(r) for r in rows])


def rref(rows: Sequence[Sequence], ncols: int) -> tuple:
    """Reduced row-echelon form by Gauss-Jordan over Q.

    Returns ``(basis_rows, pivot_columns)`` with zero rows dropped. Pivots are
    leftmost nonzero entries normalized to 1.
    """
    a = [list(vec(r)) for r in rows]
    for r in a:
        if len(r) != ncols:
            raise DimensionError("row of length %d in ambient dimension %d" % (len(r), ncols))
    pivots = []
    lead = 0
    for col in range(ncols):
        piv = next((r for r in range(lead, len(a)) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[lead], a[piv] = a[piv], a[lead]
        p = a[lead][col]
        if p != 1:
            a[lead] = [x / p for x in a[lead]]
        prow = a[lead]
        for r in range(len(a)):
            if r != lead and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], prow)]
        pivots.append(col)
        lead += 1
        if lead == len(a):
            break
    return tuple(tuple(r) for r in a[:lead]), tuple(pivots)


def nullspace(M: RatMatrix) -> tuple:
    """Basis of {x : M x = 0}, one vector per free column."""
    n = M.ncols
    basis_rows, pivots = rref(M.rows, n)
    free = [c for c in range(n) if c not in pivots]
    out = []
    for fcol in free:
        x = [Fraction(0)] * n
        x[fcol] = Fraction(1)
        for row, pcol in zip(basis_rows, pivots):
            x[pcol] = -row[fcol]
        out.append(tuple(x))
    return tuple(out)


def solve(M: RatMatrix, b: Sequence):
    """One exact solution of M x = b, or None when inconsistent."""
    n = M.ncols
    aug = [tuple(r) + (bi,) for r, bi in zip(M.rows, vec(b))]
    basis_rows, pivots = rref(aug, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [Fraction(0)] * n
    for row, pcol in zip(basis_rows, pivots):
        x[pcol] = row[n]
    return tuple(x)


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n stored by its canonical reduced echelon basis."""

    ambient_dim: int
    basis: tuple = ()
    pivots: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        rows, pivots = rref(self.basis, self.ambient_dim)
        object.__setattr__(self, "basis", rows)
        object.__setattr__(self, "pivots", pivots)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(vec(v) for v in vectors))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(unit_vec(n, i) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        return subspace_contains(self, v)

    def is_subspace_of(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("ambient dimensions differ")
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("ambient dimensions differ")
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def coordinates(self, v: Sequence):
        """Coefficients of v in the echelon basis, or None if v is outside."""
        v = vec(v)
        coeffs = tuple(v[p] for p in self.pivots)
        recon = zero_vec(self.ambient_dim)
        for c, b in zip(coeffs, self.basis):
            recon = vadd(recon, vscale(c, b))
        return coeffs if recon == v else None

    def complement_indices(self) -> tuple:
        return tuple(c for c in range(self.ambient_dim) if c not in self.pivots)

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "basis": [format_vec(b) for b in self.basis]}

    @classmethod
    def from_json(cls, data) -> "Subspace":
        return cls.span([parse_vec(b) for b in data["basis"]], int(data["ambient_dim"]))


def subspace_contains(S: Subspace, v: Sequence) -> bool:
    if len(v) != S.ambient_dim:
        raise DimensionError("vector of length %d in ambient dimension %d" % (len(v), S.ambient_dim))
    return S.coordinates(v) is not None


@dataclass(frozen=True)
class QuotientMap:
    """The projection Q^n -> Q^n / kernel.

    Quotient coordinates are the entries at the non-pivot columns of the
    kernel's echelon basis, so the chosen complement is spanned by those
    standard basis vectors.
    """

    kernel: Subspace

    @property
    def ambient_dim(self) -> int:
        return self.kernel.ambient_dim

    @property
    def target_dim(self) -> int:
        return self.kernel.ambient_dim - self.kernel.dim

    @property
    def matrix(self) -> RatMatrix:
        n = self.ambient_dim
        comp = self.kernel.complement_indices()
        rows = []
        for c in comp:
            row = [Fraction(0)] * n
            row[c] = Fraction(1)
            for b, p in zip(self.kernel.basis, self.kernel.pivots):
                row[p] -= b[c]
            rows.append(tuple(row))
        return RatMatrix(tuple(rows), n)

    @property
    def representative_projection(self) -> RatMatrix:
        """Idempotent n x n matrix: lift after project."""
        n = self.ambient_dim
        comp = self.kernel.complement_indices()
        P = self.matrix
        rows = [zero_vec(n) for _ in range(n)]
        for r, c in enumerate(comp):
            rows[c] = P.rows[r]
        return RatMatrix(tuple(rows), n)

    def __call__(self, v: Sequence) -> Vector:
        v = vec(v)
        if len(v) != self.ambient_dim:
            raise DimensionError("vector of length %d, quotient map expects %d" % (len(v), self.ambient_dim))
        for b, p in zip(self.kernel.basis, self.kernel.pivots):
            if v[p] != 0:
                v = vsub(v, vscale(v[p], b))
        return tuple(v[c] for c in self.kernel.complement_indices())

    def lift(self, w: Sequence) -> Vector:
        comp = self.kernel.complement_indices()
        if len(w) != len(comp):
            raise DimensionError("quotient vector has wrong length")
        v = [Fraction(0)] * self.ambient_dim
        for c, x in zip(comp, vec(w)):
            v[c] = x
        return tuple(v)

    def to_json(self) -> dict:
        return {"kernel": self.kernel.to_json(), "matrix": self.matrix.to_json()}


@dataclass(frozen=True)
class LinearFunctional:
    covector: tuple

    def __post_init__(self):
        object.__setattr__(self, "covector", vec(self.covector))

    @property
    def ambient_dim(self) -> int:
        return len(self.covector)

    def __call__(self, v: Sequence) -> Fraction:
        if len(v) != self.ambient_dim:
            raise DimensionError("functional on dimension %d applied to length %d" % (self.ambient_dim, len(v)))
        return sum((a * b for a, b in zip(self.covector, vec(v))), Fraction(0))

    def compose(self, P: QuotientMap) -> "LinearFunctional":
        """The functional v -> self(P(v)) on P's domain."""
        if P.target_dim != self.ambient_dim:
            raise DimensionError("functional does not match quotient target")
        M = P.matrix
        return LinearFunctional(tuple(self(M.column(j)) for j in range(M.ncols)))


class NotAntisymmetric(ValueError):
    pass


def skew_decompose(A: RatMatrix) -> list:
    """Write an antisymmetric A as sum_i (u_i w_i^T - w_i u_i^T).

    Repeatedly takes the first nonzero entry a = A[i][j] (i < j, row-major),
    peels off u = column j / a and w = row i, which zeroes rows and columns
    i, j and lowers the rank by exactly two. Returns rank(A)/2 pairs.
    """
    if not A.is_antisymmetric():
        raise NotAntisymmetric("matrix is not antisymmetric")
    n = A.nrows
    a = [list(r) for r in A.rows]
    pairs = []
    while True:
        hit = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j] != 0), None)
        if hit is None:
            return pairs
        i, j = hit
        piv = a[i][j]
        u = tuple(a[r][j] / piv for r in range(n))
        w = tuple(a[i])
        for r in range(n):
            ur, wr = u[r], w[r]
            if ur == 0 and wr == 0:
                continue
            row = a[r]
            for c in range(n):
                row[c] -= ur * w[c] - wr * u[c]
        pairs.append((u, w))


def reassemble(pairs, n: int) -> RatMatrix:
    total = RatMatrix.zeros(n, n)
    for u, w in pairs:
        total = total + wedge(u, w)
    return total
