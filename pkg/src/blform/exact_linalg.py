"""Exact dense linear algebra over the rationals.

Scalars are :class:`fractions.Fraction` (always stored in lowest terms with a
positive denominator).  Matrices are small immutable row-major containers;
nothing here ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

from .errors import DimensionError

Rational = Fraction

__all__ = [
    "Rational",
    "ExactMatrix",
    "to_rational",
    "format_rational",
    "rref",
    "rank",
    "determinant",
    "primitive_integer_vector",
    "IntegerEchelon",
]


def to_rational(value) -> Fraction:
    """Coerce ``value`` to a Fraction.

    Accepts ints, Fractions and strings such as ``"3"``, ``"-2/7"`` or
    ``"0.25"``.  Floats and bools are refused: a float silently carries
    binary rounding into an exact computation.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is one."""
    q = to_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class ExactMatrix:
    """Immutable ``rows x cols`` matrix of Fractions stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(to_rational(e) for e in entries)
        if rows < 0 or cols < 0:
            raise DimensionError("matrix dimensions must be non-negative")
        if len(entries) != rows * cols:
            raise DimensionError(
                f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {len(entries)}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise DimensionError("cannot infer the column count of an empty row list")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
        return cls(len(rows), cols, (e for r in rows for e in r))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, (int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, key) -> Fraction:
        i, j = key
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def tolist(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols,
            self.rows,
            (self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in self.row(i)) for i in range(self.rows))
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"


def rref(m: ExactMatrix) -> tuple[ExactMatrix, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns.

    The pivot in each column is the first row (from the current one down)
    holding a nonzero entry, so the output is deterministic.
    """
    a = m.tolist()
    nrows, ncols = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        if piv != 1:
            a[r] = [x / piv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return ExactMatrix(nrows, ncols, (x for row in a for x in row)), len(pivots), pivots


def rank(m: ExactMatrix) -> int:
    return rref(m)[1]


def _integer_rows(m: ExactMatrix) -> tuple[list[list[int]], int]:
    """Scale each row to integers; returns the rows and the product of scales."""
    out = []
    scale = 1
    for i in range(m.rows):
        row = m.row(i)
        d = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * d) for x in row])
        scale *= d
    return out, scale


def _bareiss(a: list[list[int]]) -> int:
    """Fraction-free elimination; every division below is exact."""
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


def determinant(m: ExactMatrix) -> Fraction:
    if not m.is_square:
        raise DimensionError(f"determinant needs a square matrix, got {m.rows}x{m.cols}")
    ints, scale = _integer_rows(m)
    return Fraction(_bareiss(ints), scale)


def primitive_integer_vector(vec: Sequence) -> tuple[int, ...]:
    """Integer multiple of ``vec`` with coprime entries (zero stays zero)."""
    qs = [to_rational(x) for x in vec]
    d = lcm(*(q.denominator for q in qs)) if qs else 1
    ints = [int(q * d) for q in qs]
    g = gcd(*ints) if ints else 0
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


class IntegerEchelon:
    """Incrementally grown echelon basis of integer row vectors.

    ``reduce`` returns the residual of a vector against the rows stored so
    far (an integer vector, zero iff the input lies in their span).  Rows are
    kept primitive to stop coefficient growth.
    """

    __slots__ = ("width", "rows", "pivots")

    def __init__(self, width: int):
        self.width = width
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []

    def copy(self) -> "IntegerEchelon":
        other = IntegerEchelon(self.width)
        other.rows = list(self.rows)
        other.pivots = list(self.pivots)
        return other

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Sequence[int]) -> list[int]:
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if c:
                a = row[p]
                v = [a * x - c * y for x, y in zip(v, row)]
                g = gcd(*v)
                if g > 1:
                    v = [x // g for x in v]
        return v

    def add(self, vec: Sequence[int]) -> bool:
        """Insert ``vec``; returns False (and stores nothing) if it is dependent."""
        v = self.reduce(vec)
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            return False
        self.rows.append(v)
        self.pivots.append(p)
        return True
