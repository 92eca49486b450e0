"""First-entries condition and Rado's columns condition, as classically defined.

Both checkers work over the rationals with exact arithmetic.  The columns
condition is checked in its Q-span form: an ordered partition I_1, ..., I_k of
the columns such that the columns in I_1 sum to zero and, for t >= 2, the
columns in I_t sum to a rational combination of the columns in earlier parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm
from operator import add
from typing import Optional, Sequence

from .core import Matrix, format_rational


@dataclass(frozen=True)
class FirstEntriesReport:
    satisfied: bool
    first_entries: dict[int, Fraction] = field(default_factory=dict)
    violation: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "first_entries": {str(c): format_rational(e) for c, e in sorted(self.first_entries.items())},
            "violation": self.violation,
        }


def first_entries_check(A: Matrix) -> FirstEntriesReport:
    """Check no zero row, positive leading entries, and equal leading entries per column."""
    firsts: dict[int, Fraction] = {}
    for i, row in enumerate(A.rows):
        lead = next((j for j, e in enumerate(row) if e != 0), None)
        if lead is None:
            return FirstEntriesReport(False, firsts, f"zero row: row {i}")
        entry = row[lead]
        if entry <= 0:
            return FirstEntriesReport(
                False, firsts, f"non-positive first entry: row {i}, column {lead}, value {format_rational(entry)}"
            )
        seen = firsts.setdefault(lead, entry)
        if seen != entry:
            return FirstEntriesReport(
                False,
                firsts,
                f"unequal first entries in column {lead}: {format_rational(seen)} != {format_rational(entry)} (row {i})",
            )
    return FirstEntriesReport(True, firsts)


# -- exact linear algebra ----------------------------------------------------

def rational_span_member(basis: Sequence[Sequence], target: Sequence) -> Optional[list[Fraction]]:
    """Coefficients ``lam`` with ``sum(lam[i] * basis[i]) == target``, or None.

    Solved by Gaussian elimination over Fractions; free coefficients are set to 0.
    """
    n = len(target)
    if any(len(b) != n for b in basis):
        raise ValueError("basis vectors and target must have the same length")
    k = len(basis)
    # augmented system: rows are coordinates, columns are basis vectors + target
    aug = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        piv = aug[r][c]
        if piv != 1:
            aug[r] = [e / piv for e in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    if any(aug[i][k] != 0 for i in range(r, n)):
        return None
    coeffs = [Fraction(0)] * k
    for row, c in enumerate(pivots):
        coeffs[c] = aug[row][k]
    return coeffs


# -- columns condition -------------------------------------------------------

@dataclass(frozen=True)
class ColumnsConditionCertificate:
    """Ordered column partition plus the span coefficients for parts 2..k.

    ``coefficients[t - 1]`` maps each column index of the earlier parts to its
    coefficient in the expression of part ``t``'s column sum.
    """

    partition: tuple[tuple[int, ...], ...]
    coefficients: tuple[dict[int, Fraction], ...]

    def validate(self, A: Matrix) -> bool:
        cols = A.columns()
        used = sorted(j for part in self.partition for j in part)
        if used != list(range(A.v)) or any(not part for part in self.partition):
            return False
        if len(self.coefficients) != len(self.partition) - 1:
            return False
        first = _col_sum(cols, self.partition[0])
        if any(first):
            return False
        earlier = set(self.partition[0])
        for part, coeffs in zip(self.partition[1:], self.coefficients):
            if not set(coeffs) <= earlier:
                return False
            combo = [sum((coeffs[j] * cols[j][i] for j in coeffs), Fraction(0)) for i in range(A.u)]
            if combo != list(_col_sum(cols, part)):
                return False
            earlier |= set(part)
        return True

    def to_json(self) -> dict:
        return {
            "partition": [list(p) for p in self.partition],
            "coefficients": [
                {str(j): format_rational(c) for j, c in sorted(coeffs.items())} for coeffs in self.coefficients
            ],
        }


def _col_sum(cols, part) -> tuple:
    return tuple(sum(col) for col in zip(*(cols[j] for j in part)))


def _integer_columns(A: Matrix) -> list[tuple[int, ...]]:
    # Row scaling leaves every linear relation among the columns unchanged.
    rows = []
    for row in A.rows:
        m = lcm(*(e.denominator for e in row))
        rows.append([e.numerator * (m // e.denominator) for e in row])
    return [tuple(r[j] for r in rows) for j in range(A.v)]


@lru_cache(maxsize=None)
def _mask_order(v: int) -> tuple[int, ...]:
    """Non-empty subsets of range(v) as bitmasks: by size, then lexicographically."""
    return tuple(sum(1 << j for j in combo) for size in range(1, v + 1) for combo in combinations(range(v), size))


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(j for j in range(mask.bit_length()) if mask >> j & 1)


def columns_condition_check(A: Matrix) -> Optional[ColumnsConditionCertificate]:
    """Search ordered partitions of the columns for a columns-condition certificate.

    Partitions are tried by increasing number of parts; within that, each part
    is chosen among the remaining columns by increasing size, then
    lexicographically.  The first certificate found is returned.
    """
    cols = _integer_columns(A)
    v = len(cols)
    zero = (0,) * len(cols[0])
    full = (1 << v) - 1
    sums = [zero] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        sums[mask] = tuple(map(add, sums[mask ^ low], cols[low.bit_length() - 1]))
    order = _mask_order(v)
    zero_masks = [m for m in order if sums[m] == zero]
    if not zero_masks:
        return None

    span_cache: dict[tuple[int, int], Optional[dict[int, Fraction]]] = {}

    def in_span(basis_mask: int, part_mask: int):
        key = (basis_mask, part_mask)
        if key not in span_cache:
            idx = _bits(basis_mask)
            lam = rational_span_member([cols[j] for j in idx], sums[part_mask])
            span_cache[key] = None if lam is None else dict(zip(idx, lam))
        return span_cache[key]

    def extend(used: int, parts_left: int):
        avail = full & ~used
        if parts_left == 1:
            lam = in_span(used, avail)
            return None if lam is None else [(avail, lam)]
        for m in order:
            if m & used or m == avail:
                continue
            lam = in_span(used, m)
            if lam is None:
                continue
            rest = extend(used | m, parts_left - 1)
            if rest is not None:
                return [(m, lam)] + rest
        return None

    for k in range(1, v + 1):
        for first in zero_masks:
            if k == 1:
                if first == full:
                    return ColumnsConditionCertificate((_bits(first),), ())
                continue
            if v - bin(first).count("1") < k - 1:
                continue
            found = extend(first, k - 1)
            if found is not None:
                return ColumnsConditionCertificate(
                    (_bits(first),) + tuple(_bits(m) for m, _ in found),
                    tuple(lam for _, lam in found),
                )
    return None


def satisfies_columns_condition(A: Matrix) -> bool:
    return columns_condition_check(A) is not None
