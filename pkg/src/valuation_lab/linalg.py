"""Exact rational linear algebra.

Scalars are ``gmpy2.mpq`` exact rationals; vectors are tuples
of them and matrices are tuples of row tuples. Nothing in here ever touches a
float. ``fractions.Fraction`` inputs are accepted and converted.
"""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq, mpz
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionMismatch, SingularMap

Vector = tuple  # tuple[mpq, ...]
Matrix = tuple  # tuple[tuple[mpq, ...], ...]


def rational(x) -> mpq:
    """Coerce ``x`` to an exact rational. Floats are rejected to keep the kernel exact."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, mpz)):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    raise TypeError(f"refusing {type(x).__name__} {x!r}; pass an int, Fraction or 'p/q' string")


def vector(xs: Iterable) -> Vector:
    return tuple(rational(x) for x in xs)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(vector(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise DimensionMismatch("ragged matrix")
    return m


def fmt(q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), mpq(0))


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


def zeros(n: int) -> Vector:
    return (mpq(0),) * n


def identity(n: int) -> Matrix:
    return tuple(tuple(mpq(int(i == j)) for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def mat_vec(a: Matrix, v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in a)


def madd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(vadd(r, s) for r, s in zip(a, b))


def msub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(vsub(r, s) for r, s in zip(a, b))


def mscale(c, a: Matrix) -> Matrix:
    return tuple(vscale(c, r) for r in a)


def outer(u: Sequence, v: Sequence) -> Matrix:
    return tuple(tuple(a * b for b in v) for a in u)


def _row_echelon(rows: list[list]) -> tuple[list[list], list[int], int]:
    """In-place Gaussian elimination. Returns (rows, pivot columns, swap parity)."""
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    swaps = 0
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            swaps += 1
        piv = rows[r][c]
        for i in range(r + 1, m):
            f = rows[i][c]
            if f:
                f = f / piv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots, swaps


def rank(a: Sequence[Sequence]) -> int:
    if not a:
        return 0
    _, pivots, _ = _row_echelon([list(map(rational, r)) for r in a])
    return len(pivots)


def det(a: Sequence[Sequence]) -> mpq:
    n = len(a)
    if any(len(r) != n for r in a):
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return mpq(1)
    rows, pivots, swaps = _row_echelon([list(map(rational, r)) for r in a])
    if len(pivots) < n:
        return mpq(0)
    out = mpq(-1 if swaps % 2 else 1)
    for i in range(n):
        out *= rows[i][i]
    return out


def solve(a: Sequence[Sequence], b: Sequence) -> Vector:
    """Solve the square system ``a x = b`` exactly (Gauss-Jordan)."""
    n = len(a)
    aug = [list(map(rational, row)) + [rational(bi)] for row, bi in zip(a, b)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise SingularMap("singular system")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return tuple(aug[i][n] for i in range(n))


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(map(rational, row)) + list(e) for row, e in zip(a, identity(n))]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise SingularMap("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


def least_squares(columns: Sequence[Sequence], target: Sequence) -> Vector:
    """Exact least-squares coefficients via the normal equations.

    ``columns[j]`` is the j-th basis vector (already flattened). Raises
    SingularMap when the columns are linearly dependent.
    """
    k = len(columns)
    gram = [[dot(columns[i], columns[j]) for j in range(k)] for i in range(k)]
    rhs = [dot(columns[i], target) for i in range(k)]
    return solve(gram, rhs)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def integer_row(v: Sequence) -> tuple[int, ...]:
    """Positive rescaling of a rational vector to a primitive integer vector."""
    lcm = 1
    for x in v:
        d = int(x.denominator)
        lcm = lcm * d // gcd(lcm, d)
    return primitive([int(x.numerator) * (lcm // int(x.denominator)) for x in v])


class LinearMap:
    """An invertible-or-not n x n rational matrix with a cached determinant."""

    __slots__ = ("entries", "__dict__")

    def __init__(self, entries):
        m = matrix(entries)
        if any(len(r) != len(m) for r in m):
            raise DimensionMismatch("linear map must be square")
        self.entries = m

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        return cls(identity(n))

    @classmethod
    def diagonal(cls, diag: Sequence) -> "LinearMap":
        d = vector(diag)
        n = len(d)
        return cls([[d[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def det(self) -> mpq:
        return det(self.entries)

    def inverse(self) -> "LinearMap":
        if self.det == 0:
            raise SingularMap("map is singular")
        return LinearMap(inverse(self.entries))

    def transpose(self) -> "LinearMap":
        return LinearMap(transpose(self.entries))

    def transpose_inverse(self) -> "LinearMap":
        return self.inverse().transpose()

    def __call__(self, v: Sequence) -> Vector:
        if len(v) != self.n:
            raise DimensionMismatch(f"vector of length {len(v)} for a {self.n}x{self.n} map")
        return mat_vec(self.entries, v)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(mat_mul(self.entries, other.entries))

    def conjugate(self, a: Matrix) -> Matrix:
        """``phi a phi^t``."""
        return mat_mul(mat_mul(self.entries, a), transpose(self.entries))

    def __eq__(self, other):
        return isinstance(other, LinearMap) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(fmt(x) for x in r) + "]" for r in self.entries)
        return f"LinearMap([{rows}])"
