"""Milliken-Taylor and weak Milliken-Taylor row families, truncated by width,
and structural checks for subtracted image partition regular matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb, lcm
from typing import Optional, Sequence, Union

from .conditions import first_entries_check
from .core import Matrix, compress, delete_zeros, diagonal_sum, is_compressed

DEFAULT_ROW_CAP = 5000


class Kind(str, Enum):
    MT = "mt"
    WEAK_MT = "wmt"


@dataclass(frozen=True)
class RowFamily:
    """All rows r with c(r) = a (MT) or d(r) = a (weak MT)."""

    kind: Kind
    a: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(e) for e in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "kind", Kind(self.kind))
        if not a or any(e < 1 for e in a):
            raise ValueError(f"coefficients must be a non-empty sequence of positive integers: {a}")
        if self.kind is Kind.MT and not is_compressed(a):
            raise ValueError(f"Milliken-Taylor family needs a compressed sequence, got {a}")

    @property
    def m(self) -> int:
        return len(self.a)

    def accepts(self, row: Sequence[int]) -> bool:
        op = compress if self.kind is Kind.MT else delete_zeros
        return op(row) == self.a


def weak_mt(a: Sequence[int]) -> RowFamily:
    return RowFamily(Kind.WEAK_MT, tuple(a))


def mt(a: Sequence[int]) -> RowFamily:
    return RowFamily(Kind.MT, tuple(a))


@dataclass(frozen=True)
class Truncation:
    matrix: Matrix
    truncated: bool
    total: int


def _compositions(total: int, parts: int):
    """Positive compositions of ``total`` into ``parts`` parts, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def iter_rows(family: RowFamily, width: int):
    """Yield rows in order: by non-zero position tuple, then multiplicity tuple."""
    a, m = family.a, family.m
    if width < m:
        raise ValueError(f"width {width} is smaller than the sequence length {m}")
    sizes = range(m, width + 1) if family.kind is Kind.MT else (m,)
    # lexicographic order over position tuples of every admissible size
    positions = sorted(p for s in sizes for p in combinations(range(width), s))
    for pos in positions:
        for mult in _compositions(len(pos), m):
            row = [0] * width
            k = 0
            for value, times in zip(a, mult):
                for _ in range(times):
                    row[pos[k]] = value
                    k += 1
            yield tuple(row)


def row_count(family: RowFamily, width: int) -> int:
    m = family.m
    if width < m:
        raise ValueError(f"width {width} is smaller than the sequence length {m}")
    if family.kind is Kind.WEAK_MT:
        return comb(width, m)
    return sum(comb(width, s) * comb(s - 1, m - 1) for s in range(m, width + 1))


def enumerate_rows(family: RowFamily, width: int, row_cap: int = DEFAULT_ROW_CAP) -> Truncation:
    if row_cap < 1:
        raise ValueError("row_cap must be at least 1")
    total = row_count(family, width)
    rows = []
    for row in iter_rows(family, width):
        if len(rows) == row_cap:
            break
        rows.append(row)
    label = f"{family.kind.value}{family.a}@{width}"
    return Truncation(Matrix.from_rows(rows, label=label), total > row_cap, total)


# -- constant-image witnesses ------------------------------------------------

def constant_witness(family: RowFamily, width: int, d: int) -> tuple[int, ...]:
    """The vector (d, ..., d); every weak MT row maps it to d * sum(a)."""
    if d < 1:
        raise ValueError("d must be positive")
    return (d,) * width


def diagonal_constant_witness(families: Sequence[RowFamily], widths: Sequence[int], scale: int = 1) -> tuple[int, ...]:
    """Blockwise-constant vector making the image of the diagonal sum constant.

    Block j gets d_j = L / sum(a_j) with L = scale * lcm of the coefficient
    sums, so every entry of the image equals L.
    """
    if len(families) != len(widths):
        raise ValueError("need one width per family")
    totals = [sum(f.a) for f in families]
    target = scale * lcm(*totals)
    x: list[int] = []
    for f, w, s in zip(families, widths, totals):
        x.extend(constant_witness(f, w, target // s))
    return tuple(x)


# -- subtracted image partition regular matrices -----------------------------

@dataclass(frozen=True)
class SubtractedSplit:
    n: int
    k: int
    finite_part: Matrix
    remainder: Optional[Matrix]


def split_columns(A: Matrix, n: int, k: int) -> SubtractedSplit:
    """Columns n..n+k-1 as the finite part, the others (in order) as the remainder."""
    if n < 0 or k < 1 or n + k > A.v:
        raise ValueError(f"split n={n}, k={k} is out of range for {A.v} columns")
    inner = list(range(n, n + k))
    outer = [j for j in range(A.v) if not n <= j < n + k]
    remainder = A.select_columns(outer) if outer else None
    return SubtractedSplit(n, k, A.select_columns(inner), remainder)


def subtracted_matrix(finite: Matrix, remainder: Matrix, n: int = 0) -> Matrix:
    """Place ``finite`` at column offset ``n`` inside ``remainder``.

    Row t carries finite row t mod u_F, so the finite part's rows are exactly
    the rows of ``finite`` as long as the remainder has at least as many rows.
    """
    if remainder.u < finite.u:
        raise ValueError("remainder needs at least as many rows as the finite block")
    if not 0 <= n <= remainder.v:
        raise ValueError("column offset out of range")
    rows = []
    for t, rrow in enumerate(remainder.rows):
        frow = finite.rows[t % finite.u]
        rows.append(rrow[:n] + frow + rrow[n:])
    return Matrix(tuple(rows), label="subtracted")


@dataclass(frozen=True)
class FirstEntriesEvidence:
    """Remainder is certified by the first-entries condition."""


@dataclass(frozen=True)
class FamilyEvidence:
    """Remainder rows are exactly the truncation of ``family`` at its width."""

    family: RowFamily


@dataclass(frozen=True)
class SearchEvidence:
    """Remainder must reach a Forced verdict in the finite search."""

    N: int
    r: int = 2
    xmax: Optional[int] = None


@dataclass(frozen=True)
class DeclaredM:
    """Remainder columns must equal the given M truncation entry for entry."""

    M: Matrix


Evidence = Union[FirstEntriesEvidence, FamilyEvidence, SearchEvidence, DeclaredM]


@dataclass
class SubtractedReport:
    no_zero_row: bool
    finite_support: str
    finite_part_ok: bool
    remainder_ok: bool
    mode: str
    messages: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.no_zero_row and self.finite_part_ok and self.remainder_ok

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "mode": self.mode,
            "clauses": {
                "no_zero_row": self.no_zero_row,
                "finite_support": self.finite_support,
                "finite_part": self.finite_part_ok,
                "remainder": self.remainder_ok,
            },
            "messages": list(self.messages),
        }


def _as_ints(row):
    if any(e.denominator != 1 or e < 0 for e in row):
        return None
    return tuple(int(e) for e in row)


def validate_subtracted(
    A: Matrix,
    n: int,
    k: int,
    evidence: Evidence,
    finite_search: Optional[SearchEvidence] = None,
) -> SubtractedReport:
    """Check the structural clauses of a (M-)subtracted IPR truncation.

    The finite column block is accepted when its distinct rows satisfy the
    first-entries condition, or, when ``finite_search`` is given, when they
    reach a Forced verdict in the finite search.  Finite row support holds
    automatically for a finite truncation.
    """
    if not isinstance(evidence, (FirstEntriesEvidence, FamilyEvidence, SearchEvidence, DeclaredM)):
        raise TypeError(f"unsupported evidence {evidence!r}")
    messages = []
    zero = A.zero_rows()
    if zero:
        messages.append(f"zero rows: {zero}")
    split = split_columns(A, n, k)
    finite = split.finite_part.distinct_rows()

    if finite_search is None:
        fe = first_entries_check(finite)
        finite_ok = fe.satisfied
        if not finite_ok:
            messages.append(f"finite part fails first-entries: {fe.violation}")
    else:
        from .search import Forced, verify_ipr_finite

        verdict = verify_ipr_finite(finite, finite_search.N, finite_search.r, finite_search.xmax)
        finite_ok = isinstance(verdict, Forced)
        if not finite_ok:
            messages.append(f"finite part not forced: {verdict.describe()}")

    rem = split.remainder
    mode = "M-subtracted" if isinstance(evidence, DeclaredM) else "subtracted"
    if rem is None:
        remainder_ok = False
        messages.append("remainder is empty")
    elif isinstance(evidence, FirstEntriesEvidence):
        fe = first_entries_check(rem)
        remainder_ok = fe.satisfied
        if not remainder_ok:
            messages.append(f"remainder fails first-entries: {fe.violation}")
    elif isinstance(evidence, FamilyEvidence):
        remainder_ok = _matches_family(rem, evidence.family, messages)
    elif isinstance(evidence, SearchEvidence):
        from .search import Forced, verify_ipr_finite

        verdict = verify_ipr_finite(rem, evidence.N, evidence.r, evidence.xmax)
        remainder_ok = isinstance(verdict, Forced)
        if not remainder_ok:
            messages.append(f"remainder not forced: {verdict.describe()}")
    else:
        remainder_ok = rem.rows == evidence.M.rows
        if not remainder_ok:
            messages.append(f"remainder {rem.shape} does not equal declared M {evidence.M.shape} entry for entry")

    return SubtractedReport(
        no_zero_row=not zero,
        finite_support="automatic (finite truncation)",
        finite_part_ok=finite_ok,
        remainder_ok=remainder_ok,
        mode=mode,
        messages=messages,
    )


def _matches_family(rem: Matrix, family: RowFamily, messages: list) -> bool:
    if rem.v < family.m:
        messages.append(f"remainder width {rem.v} is below sequence length {family.m}")
        return False
    rows = [_as_ints(r) for r in rem.rows]
    bad = [i for i, r in enumerate(rows) if r is None or not family.accepts(r)]
    if bad:
        messages.append(f"remainder rows {bad} are not in the {family.kind.value} family of {family.a}")
        return False
    expected = set(iter_rows(family, rem.v))
    missing = expected - set(rows)
    if missing:
        messages.append(f"remainder is missing {len(missing)} family rows")
        return False
    return True


def subtracted_with_family(finite: Matrix, family: RowFamily, width: int, n: int = 0) -> Matrix:
    """Subtracted truncation: ``finite`` block at offset n, family truncation elsewhere."""
    rem = enumerate_rows(family, width).matrix
    return subtracted_matrix(finite, rem, n)


def family_diagonal(families: Sequence[RowFamily], widths: Sequence[int]) -> Matrix:
    return diagonal_sum([enumerate_rows(f, w).matrix for f, w in zip(families, widths)])

