"""Finite Milliken-Taylor style configuration sets and sum/product subsystems.

Sequences are indexed from 1 in block systems, to match the usual subscripts
x_1, x_2, ...; everything else takes ordinary Python sequences.  All set
builders return sorted lists of distinct integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

from .core import is_compressed

MAX_LENGTH = 16


class LengthLimitError(ValueError):
    pass


def _coeffs(a: Sequence[int]) -> tuple[int, ...]:
    a = tuple(int(e) for e in a)
    if not a:
        raise ValueError("coefficient sequence must be non-empty")
    if any(e < 1 for e in a):
        raise ValueError(f"coefficients must be positive: {a}")
    return a


def _positive_seq(x: Sequence[int], allow_long: bool) -> tuple[int, ...]:
    x = tuple(int(e) for e in x)
    if any(e < 1 for e in x):
        raise ValueError(f"sequence entries must be positive: {x}")
    if len(x) > MAX_LENGTH and not allow_long:
        raise LengthLimitError(f"sequence length {len(x)} exceeds {MAX_LENGTH}; pass allow_long=True")
    return x


def _need_length(a, x):
    if len(x) < len(a):
        raise ValueError(f"need at least {len(a)} terms, got {len(x)}")


def wmt_set(a: Sequence[int], x: Sequence[int], allow_long: bool = False) -> list[int]:
    """All sums a_1*x_{t_1} + ... + a_m*x_{t_m} with t_1 < ... < t_m."""
    a = _coeffs(a)
    x = _positive_seq(x, allow_long)
    _need_length(a, x)
    # level[i] holds the partial sums using a_1..a_i
    level: list[set[int]] = [{0}] + [set() for _ in a]
    for xt in x:
        for i in range(len(a), 0, -1):
            if level[i - 1]:
                level[i].update(s + a[i - 1] * xt for s in level[i - 1])
    return sorted(level[-1])


def _block_sweep(a, x, combine, unit):
    """Sweep x once, assigning each term to nothing or to the current/next block.

    A state is (i, sum of finished blocks, value of open block i); block i is
    always non-empty once opened.  ``combine`` folds a term into an open block.
    """
    m = len(a)
    states: set[tuple[int, int, int]] = set()
    for xt in x:
        new = set(states)
        # open block 0 with this term
        new.add((0, 0, combine(unit, xt)))
        for i, done, cur in states:
            new.add((i, done, combine(cur, xt)))
            if i + 1 < m:
                new.add((i + 1, done + a[i] * cur, combine(unit, xt)))
        states = new
    return sorted({done + a[m - 1] * cur for i, done, cur in states if i == m - 1})


def mt_set(a: Sequence[int], x: Sequence[int], allow_long: bool = False) -> list[int]:
    """All sums a_1*sum(x[F_1]) + ... + a_m*sum(x[F_m]) over F_1 < ... < F_m.

    ``a`` must be compressed.
    """
    a = _coeffs(a)
    if not is_compressed(a):
        raise ValueError(f"coefficient sequence {a} is not compressed")
    x = _positive_seq(x, allow_long)
    _need_length(a, x)
    return _block_sweep(a, x, lambda cur, t: cur + t, 0)


def pmt_set(a: Sequence[int], x: Sequence[int], allow_long: bool = False) -> list[int]:
    """Like :func:`mt_set` with block products; ``a`` need not be compressed."""
    a = _coeffs(a)
    x = _positive_seq(x, allow_long)
    _need_length(a, x)
    return _block_sweep(a, x, lambda cur, t: cur * t, 1)


def fs_set(x: Sequence[int], allow_long: bool = False) -> list[int]:
    """Sums over non-empty subsets of the terms."""
    x = _positive_seq(x, allow_long)
    if not x:
        raise ValueError("finite sums need a non-empty sequence")
    sums: set[int] = set()
    for t in x:
        sums |= {s + t for s in sums} | {t}
    return sorted(sums)


def fp_set(x: Sequence[int], allow_long: bool = False) -> list[int]:
    """Products over non-empty subsets of the terms."""
    x = _positive_seq(x, allow_long)
    if not x:
        raise ValueError("finite products need a non-empty sequence")
    prods: set[int] = set()
    for t in x:
        prods |= {p * t for p in prods} | {t}
    return sorted(prods)


@dataclass(frozen=True)
class BlockSystem:
    """Non-empty 1-based index blocks H_1, H_2, ... with max H_t < min H_{t+1}."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(set(int(i) for i in h))) for h in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        for h in blocks:
            if not h:
                raise ValueError("blocks must be non-empty")
            if h[0] < 1:
                raise ValueError("block indices are 1-based")
        for h, g in zip(blocks, blocks[1:]):
            if h[-1] >= g[0]:
                raise ValueError(f"blocks out of order: max {h} >= min {g}")

    @classmethod
    def parse(cls, text: str) -> "BlockSystem":
        """Parse ``"1,2;3,4"`` into ({1,2}, {3,4})."""
        parts = [p for p in text.replace(" ", "").split(";") if p]
        return cls(tuple(tuple(int(i) for i in p.split(",") if i) for p in parts))

    def check_fits(self, length: int):
        if self.blocks and self.blocks[-1][-1] > length:
            raise IndexError(f"block index {self.blocks[-1][-1]} out of range for length {length}")


def sum_subsystem(x: Sequence[int], blocks: BlockSystem) -> tuple[int, ...]:
    blocks.check_fits(len(x))
    return tuple(sum(x[s - 1] for s in h) for h in blocks.blocks)


def product_subsystem(x: Sequence[int], blocks: BlockSystem) -> tuple[int, ...]:
    blocks.check_fits(len(x))
    return tuple(prod(x[s - 1] for s in h) for h in blocks.blocks)
