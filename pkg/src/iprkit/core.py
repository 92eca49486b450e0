"""Exact rational matrices, integer sequences and the classical example matrices.

Scalars are :class:`fractions.Fraction` values, which are always reduced with a
positive denominator.  Sequences are plain tuples of non-negative ints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


class MatrixFormatError(ValueError):
    """Raised when matrix text cannot be parsed."""


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point entries are not supported; use int, Fraction or 'p/q'")
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``-p`` or ``p/q`` (q > 0) into a Fraction."""
    token = text.strip()
    num, sep, den = token.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise MatrixFormatError(f"malformed rational {text!r}") from None
    if sep and (den.strip().startswith(("-", "+")) or q <= 0):
        if q == 0:
            raise MatrixFormatError(f"zero denominator in {text!r}")
        raise MatrixFormatError(f"denominator must be positive in {text!r}")
    return Fraction(p, q)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# -- integer sequences -------------------------------------------------------

def _check_seq(x: Iterable[int]) -> tuple[int, ...]:
    seq = tuple(int(e) for e in x)
    if any(e < 0 for e in seq):
        raise ValueError(f"sequence entries must be non-negative: {seq}")
    return seq


def delete_zeros(x: Iterable[int]) -> tuple[int, ...]:
    """Return ``x`` with every 0 removed, order preserved."""
    return tuple(e for e in _check_seq(x) if e != 0)


def compress(x: Iterable[int]) -> tuple[int, ...]:
    """Delete zeros, then collapse each run of equal neighbours to one entry."""
    out: list[int] = []
    for e in delete_zeros(x):
        if not out or out[-1] != e:
            out.append(e)
    return tuple(out)


def is_compressed(x: Iterable[int]) -> bool:
    seq = _check_seq(x)
    return seq == compress(seq)


# -- matrices ----------------------------------------------------------------

@dataclass(frozen=True)
class Matrix:
    """Dense finite matrix of rationals.

    ``rows`` is a tuple of equal-length tuples of Fractions.  Build one from
    nested lists with :meth:`from_rows`.
    """

    rows: tuple[tuple[Fraction, ...], ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.rows:
            raise ValueError("matrix must have at least one row")
        width = len(self.rows[0])
        if width == 0:
            raise ValueError("matrix must have at least one column")
        for row in self.rows:
            if len(row) != width:
                raise ValueError("every row must have the same number of entries")
            if not all(isinstance(e, Fraction) for e in row):
                raise TypeError("entries must be Fractions; use Matrix.from_rows")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], label: str = "") -> "Matrix":
        return cls(tuple(tuple(as_rational(e) for e in row) for row in rows), label)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], label: str = "") -> "Matrix":
        if not cols:
            raise ValueError("matrix must have at least one column")
        return cls.from_rows(zip(*cols), label)

    @property
    def u(self) -> int:
        return len(self.rows)

    @property
    def v(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.u, self.v

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.v)]

    def select_columns(self, indices: Sequence[int]) -> "Matrix":
        return Matrix(tuple(tuple(row[j] for j in indices) for row in self.rows))

    def zero_rows(self) -> list[int]:
        return [i for i, row in enumerate(self.rows) if not any(row)]

    def has_zero_row(self) -> bool:
        return bool(self.zero_rows())

    def is_nonnegative(self) -> bool:
        return all(e >= 0 for row in self.rows for e in row)

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for row in self.rows for e in row)

    def max_row_sum(self) -> Fraction:
        return max(sum(row) for row in self.rows)

    def distinct_rows(self) -> "Matrix":
        seen = dict.fromkeys(self.rows)
        return Matrix(tuple(seen))

    def to_lists(self) -> list[list[Fraction]]:
        return [list(row) for row in self.rows]

    def __str__(self) -> str:
        return render_matrix(self)


def matrix_image(A: Matrix, x: Sequence[int]) -> tuple[Fraction, ...]:
    """Exact product ``A @ x`` for a vector of positive integers."""
    if len(x) != A.v:
        raise ValueError(f"vector length {len(x)} does not match {A.v} columns")
    if any(int(e) != e or e < 1 for e in x):
        raise ValueError("vector entries must be positive integers")
    return tuple(sum((a * e for a, e in zip(row, x)), Fraction(0)) for row in A.rows)


def diagonal_sum(blocks: Sequence[Matrix]) -> Matrix:
    """Block-diagonal matrix with ``blocks`` along the diagonal, in order."""
    if not blocks:
        raise ValueError("diagonal_sum needs at least one block")
    width = sum(b.v for b in blocks)
    zero = Fraction(0)
    rows = []
    offset = 0
    for b in blocks:
        left = (zero,) * offset
        right = (zero,) * (width - offset - b.v)
        rows.extend(left + row + right for row in b.rows)
        offset += b.v
    return Matrix(tuple(rows))


def schur_matrix() -> Matrix:
    return Matrix.from_rows([[1, 0], [0, 1], [1, 1]], label="schur")


def vdw_matrix(n: int) -> Matrix:
    """Rows ``(1, i)`` for ``i < n``; the image of ``(a, d)`` is an n-term progression."""
    if n < 1:
        raise ValueError("progression length must be at least 1")
    return Matrix.from_rows([[1, i] for i in range(n)], label=f"vdw({n})")


# -- text format -------------------------------------------------------------

def parse_matrix(text: str) -> Matrix:
    """Parse the ``u v`` header + rows format; ``#`` lines are comments."""
    lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    if not lines:
        raise MatrixFormatError("empty matrix document")
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixFormatError("header must be 'u v'")
    try:
        u, v = int(header[0]), int(header[1])
    except ValueError:
        raise MatrixFormatError(f"malformed header {lines[0]!r}") from None
    if u < 1 or v < 1:
        raise MatrixFormatError("matrix dimensions must be positive")
    body = lines[1:]
    if len(body) != u:
        raise MatrixFormatError(f"header declares {u} rows, found {len(body)}")
    rows = []
    for k, line in enumerate(body, 1):
        tokens = line.split()
        if len(tokens) != v:
            raise MatrixFormatError(f"row {k} has {len(tokens)} entries, expected {v}")
        rows.append(tuple(parse_rational(t) for t in tokens))
    return Matrix(tuple(rows))


def render_matrix(A: Matrix) -> str:
    lines = [f"{A.u} {A.v}"]
    lines.extend(" ".join(format_rational(e) for e in row) for row in A.rows)
    return "\n".join(lines) + "\n"
