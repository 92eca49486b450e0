"""Finite-scale image partition regularity.

The question "is every r-coloring of [1..N] forced to contain a monochromatic
image A x, x in [1..xmax]^v?" is decided in two stages: collect the
inclusion-minimal value sets {entries of A x} that fit inside [1..N], then run
a complete backtracking search for a coloring in which none of those sets is
monochromatic.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, lcm
from typing import Iterable, Optional, Sequence

from .core import Matrix

DEFAULT_IMAGE_CAP = 500_000


class ImageCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Coloring:
    """An r-coloring of [1..N]; ``assignment[n - 1]`` is the color of n."""

    N: int
    r: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(c) for c in self.assignment))
        if self.N < 1 or self.r < 1:
            raise ValueError("N and r must be positive")
        if len(self.assignment) != self.N:
            raise ValueError(f"coloring has {len(self.assignment)} cells, expected {self.N}")
        if any(not 0 <= c < self.r for c in self.assignment):
            raise ValueError(f"colors must lie in 0..{self.r - 1}")

    def __call__(self, n: int) -> int:
        return self.assignment[n - 1]

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.r)]
        for n, c in enumerate(self.assignment, 1):
            out[c].append(n)
        return out

    def is_monochromatic(self, values: Iterable[int]) -> bool:
        return len({self(n) for n in values}) == 1

    def avoids(self, images: Iterable["ImageInstance"]) -> bool:
        return not any(self.is_monochromatic(im.values) for im in images)

    def to_text(self) -> str:
        return f"{self.N} {self.r}\n" + " ".join(map(str, self.assignment)) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Coloring":
        tokens = [t for line in text.splitlines() if not line.strip().startswith("#") for t in line.split()]
        if len(tokens) < 2:
            raise ValueError("coloring file needs a 'N r' header")
        N, r = int(tokens[0]), int(tokens[1])
        return cls(N, r, tuple(int(t) for t in tokens[2:]))


@dataclass(frozen=True)
class ImageInstance:
    values: tuple[int, ...]
    witness: tuple[int, ...]


class Verdict:
    """Outcome of the finite decision at (N, r, xmax).

    ``Forced``: every r-coloring of [1..N] has a monochromatic image, which is
    evidence for image partition regularity.  ``Avoidable``: some coloring of
    [1..N] has none.  That only says the finite threshold is above N; it
    refutes nothing about partition regularity over all of N.
    ``Inconclusive``: no image fits in [1..N], or the image cap was hit.
    """

    kind = ""

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Forced(Verdict):
    images_used: int
    kind = "forced"

    def describe(self) -> str:
        return f"Forced ({self.images_used} images)"


@dataclass(frozen=True)
class Avoidable(Verdict):
    coloring: Coloring
    images_used: int = 0
    kind = "avoidable"

    def describe(self) -> str:
        return f"Avoidable (classes {self.coloring.classes()})"


@dataclass(frozen=True)
class Inconclusive(Verdict):
    reason: str  # "no-images" or "cap-exceeded"
    kind = "inconclusive"

    def describe(self) -> str:
        return f"Inconclusive ({self.reason})"


def verdict_to_json(verdict: Verdict) -> dict:
    out: dict = {"verdict": verdict.kind}
    if isinstance(verdict, Forced):
        out["images_used"] = verdict.images_used
    elif isinstance(verdict, Avoidable):
        out["images_used"] = verdict.images_used
        out["coloring"] = {"N": verdict.coloring.N, "r": verdict.coloring.r,
                           "assignment": list(verdict.coloring.assignment)}
    else:
        out["reason"] = verdict.reason
    return out


# -- image enumeration --------------------------------------------------------

def default_xmax(A: Matrix, N: int) -> int:
    """Smallest bound that is complete for non-negative matrices.

    A coordinate x_j feeds every row with a positive entry a_ij, so
    x_j <= N / a_ij whenever that row's value fits in [1..N].
    """
    positive = [e for row in A.rows for e in row if e > 0]
    if not positive:
        return N
    return max(N, ceil(Fraction(N) / min(positive)))


def _components(A: Matrix) -> tuple[list[tuple[list[int], list[int]]], list[int]]:
    """Split into (rows, cols) blocks that share no column; also zero columns."""
    parent = list(range(A.v))

    def find(j):
        while parent[j] != j:
            parent[j] = parent[parent[j]]
            j = parent[j]
        return j

    for row in A.rows:
        nz = [j for j, e in enumerate(row) if e != 0]
        for j in nz[1:]:
            a, b = find(nz[0]), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    used = {j for row in A.rows for j, e in enumerate(row) if e != 0}
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for j in range(A.v):
        if j in used:
            groups.setdefault(find(j), ([], []))[1].append(j)
    for i, row in enumerate(A.rows):
        j = next(j for j, e in enumerate(row) if e != 0)
        groups[find(j)][0].append(i)
    zero_cols = [j for j in range(A.v) if j not in used]
    return [groups[k] for k in sorted(groups)], zero_cols


def _scaled_rows(A: Matrix, rows: list[int], cols: list[int]):
    """Integer rows (scaled by their denominators' lcm) plus the scale factors."""
    out, scales = [], []
    for i in rows:
        entries = [A.rows[i][j] for j in cols]
        m = lcm(*(e.denominator for e in entries))
        out.append([int(e * m) for e in entries])
        scales.append(m)
    return out, scales


def _iter_block(A: Matrix, rows: list[int], cols: list[int], N: int, xmax: int):
    """Yield (x restricted to cols, sorted value tuple) for one block."""
    irows, scales = _scaled_rows(A, rows, cols)
    nrows, ncols = len(irows), len(cols)
    limits = [N * s for s in scales]

    def values_of(totals):
        vals = set()
        for t, s in zip(totals, scales):
            if t <= 0 or t % s:
                return None
            v = t // s
            if v > N:
                return None
            vals.add(v)
        return tuple(sorted(vals))

    if all(e >= 0 for r in irows for e in r):
        # suffix[k][i]: what row i still gains if every x_j, j >= k, equals 1
        suffix = [[sum(r[k:]) for r in irows] for k in range(ncols + 1)]
        colvec = [[irows[i][k] for i in range(nrows)] for k in range(ncols)]
        x = [0] * ncols

        def rec(k, partial):
            if k == ncols:
                vals = values_of(partial)
                if vals is not None:
                    yield tuple(x), vals
                return
            col = colvec[k]
            rest = suffix[k + 1]
            for xv in range(1, xmax + 1):
                nxt = [p + c * xv for p, c in zip(partial, col)]
                if any(p + s > lim for p, s, lim in zip(nxt, rest, limits)):
                    break
                x[k] = xv
                yield from rec(k + 1, nxt)

        yield from rec(0, [0] * nrows)
    else:
        for xs in product(range(1, xmax + 1), repeat=ncols):
            totals = [sum(a * b for a, b in zip(r, xs)) for r in irows]
            vals = values_of(totals)
            if vals is not None:
                yield xs, vals


def _size_order(item):
    return len(item[0]), item[0]


def _minimal(found: dict[tuple[int, ...], tuple]) -> list[tuple[tuple[int, ...], tuple]]:
    """Keep only inclusion-minimal value sets, in (size, values) order."""
    kept: list[tuple[tuple[int, ...], tuple]] = []
    by_min: dict[int, list[frozenset]] = {}
    for vals in sorted(found, key=lambda s: (len(s), s)):
        s = frozenset(vals)
        if any(t <= s for e in vals for t in by_min.get(e, ())):
            continue
        by_min.setdefault(vals[0], []).append(s)
        kept.append((vals, found[vals]))
    return kept


def enumerate_images(
    A: Matrix,
    N: int,
    xmax: Optional[int] = None,
    cap: int = DEFAULT_IMAGE_CAP,
    minimal: bool = True,
) -> list[ImageInstance]:
    """Distinct value sets of A x inside [1..N], x in [1..xmax]^v.

    By default only inclusion-minimal sets are kept: a coloring avoids every
    image iff it avoids the minimal ones.  ``minimal=False`` keeps them all.

    Blocks of the matrix that share no column are enumerated separately and
    recombined by unions, which is exact because x splits across them.
    Raises :class:`ImageCapExceeded` if more than ``cap`` value sets appear at
    any stage.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if xmax is None:
        xmax = default_xmax(A, N)
    if xmax < 1:
        raise ValueError("xmax must be positive")
    if A.has_zero_row():
        return []
    blocks, zero_cols = _components(A)
    # each entry: value tuple -> partial witness {column: x_j}
    combined: list[tuple[tuple[int, ...], tuple]] = [((), ())]
    for rows, cols in blocks:
        found: dict[tuple[int, ...], tuple] = {}
        for xs, vals in _iter_block(A, rows, cols, N, xmax):
            if vals not in found:
                found[vals] = tuple(zip(cols, xs))
                if len(found) > cap:
                    raise ImageCapExceeded(f"more than {cap} value sets")
        block_images = _minimal(found) if minimal else sorted(found.items(), key=_size_order)
        if not block_images:
            return []
        if len(combined) * len(block_images) > cap:
            raise ImageCapExceeded(f"more than {cap} combined value sets")
        merged: dict[tuple[int, ...], tuple] = {}
        for vals1, w1 in combined:
            for vals2, w2 in block_images:
                key = tuple(sorted(set(vals1) | set(vals2)))
                if key not in merged:
                    merged[key] = w1 + w2
        combined = _minimal(merged) if minimal else sorted(merged.items(), key=_size_order)
    images = []
    for vals, wit in combined:
        x = [1] * A.v
        for j, xv in wit:
            x[j] = xv
        for j in zero_cols:
            x[j] = 1
        images.append(ImageInstance(vals, tuple(x)))
    return images


# -- avoiding-coloring search ---------------------------------------------------

class _Search:
    """Backtracking over n = 1..N with forward checking on near-complete images."""

    def __init__(self, sets: list[tuple[int, ...]], N: int, r: int):
        self.N, self.r = N, r
        self.sets = sets
        self.size = [len(s) for s in sets]
        self.occ: list[list[int]] = [[] for _ in range(N + 1)]
        for i, s in enumerate(sets):
            for n in s:
                self.occ[n].append(i)
        self.color = [-1] * (N + 1)
        self.dom = [(1 << r) - 1] * (N + 1)
        self.cnt = [[0] * r for _ in sets]
        self.una = list(self.size)

    def assign(self, n: int, c: int, trail: list) -> bool:
        self.color[n] = c
        ok = True
        bit = 1 << c
        for i in self.occ[n]:
            self.una[i] -= 1
            self.cnt[i][c] += 1
            if not ok:
                continue
            k = self.cnt[i][c]
            if k == self.size[i]:
                ok = False
            elif k == self.size[i] - 1 and self.una[i] == 1:
                u = next(m for m in self.sets[i] if self.color[m] < 0)
                if self.dom[u] & bit:
                    self.dom[u] &= ~bit
                    trail.append((u, bit))
                    if not self.dom[u]:
                        ok = False
        return ok

    def unassign(self, n: int, c: int, trail: list):
        for i in self.occ[n]:
            self.una[i] += 1
            self.cnt[i][c] -= 1
        self.color[n] = -1
        while trail:
            u, bit = trail.pop()
            self.dom[u] |= bit

    def run(self, n: int = 1, used: int = 0) -> bool:
        if n > self.N:
            return True
        dom = self.dom[n]
        for c in range(min(used + 1, self.r)):
            if not dom >> c & 1:
                continue
            trail: list = []
            if self.assign(n, c, trail) and self.run(n + 1, max(used, c + 1)):
                return True
            self.unassign(n, c, trail)
        return False

    def replay(self, prefix: Sequence[int]) -> Optional[int]:
        """Assign 1..len(prefix); returns the colors-used count, or None on conflict."""
        used = 0
        for n, c in enumerate(prefix, 1):
            if not self.dom[n] >> c & 1 or c > used:
                return None
            if not self.assign(n, c, []):
                return None
            used = max(used, c + 1)
        return used

    def result(self) -> Coloring:
        return Coloring(self.N, self.r, tuple(self.color[1:]))


def _check_sets(images, N):
    sets = []
    for im in images:
        vals = tuple(sorted(set(im.values if isinstance(im, ImageInstance) else im)))
        if not vals or vals[0] < 1 or vals[-1] > N:
            raise ValueError(f"image {vals} does not lie in [1..{N}]")
        sets.append(vals)
    return sets


def _solve_prefix(args):
    sets, N, r, prefix = args
    s = _Search(sets, N, r)
    used = s.replay(prefix)
    if used is None or not s.run(len(prefix) + 1, used):
        return None
    return s.result().assignment


def _canonical_prefixes(r: int, depth: int):
    """Color sequences of the given length in which colors first appear in order."""
    out = [()]
    for _ in range(depth):
        out = [p + (c,) for p in out for c in range(min(max(p, default=-1) + 2, r))]
    return out


def find_avoiding_coloring(images: Sequence, N: int, r: int, threads: int = 1) -> Optional[Coloring]:
    """An r-coloring of [1..N] with no monochromatic image, or None if none exists.

    Colors are symmetry-broken (1 gets color 0, new colors appear in order),
    so the search is complete up to relabelling.  With ``threads > 1`` the
    subtrees below a short prefix are searched in worker processes; the
    returned coloring is the same one the single-threaded search finds.
    """
    if r < 1:
        raise ValueError("need at least one color")
    sets = _check_sets(images, N)
    if any(len(s) == 1 for s in sets):
        return None
    if threads <= 1 or N < 4:
        s = _Search(sets, N, r)
        return s.result() if s.run() else None
    depth = 1
    while depth < min(N, 12) and len(_canonical_prefixes(r, depth)) < 4 * threads:
        depth += 1
    prefixes = _canonical_prefixes(r, depth)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_solve_prefix, (sets, N, r, p)) for p in prefixes]
        for fut in futures:
            assignment = fut.result()
            if assignment is not None:
                for other in futures:
                    other.cancel()
                return Coloring(N, r, assignment)
    return None


def verify_ipr_finite(
    A: Matrix,
    N: int,
    r: int,
    xmax: Optional[int] = None,
    cap: int = DEFAULT_IMAGE_CAP,
    threads: int = 1,
) -> Verdict:
    """Decide whether every r-coloring of [1..N] has a monochromatic image of A.

    Forced supports image partition regularity; Avoidable only shows the finite
    threshold is above N and says nothing against regularity over all of N.
    """
    try:
        images = enumerate_images(A, N, xmax, cap)
    except ImageCapExceeded:
        return Inconclusive("cap-exceeded")
    if not images:
        return Inconclusive("no-images")
    coloring = find_avoiding_coloring(images, N, r, threads)
    if coloring is None:
        return Forced(len(images))
    return Avoidable(coloring, len(images))


@dataclass
class Deepening:
    forced_at: Optional[int]
    verdict: Verdict
    history: list[tuple[int, str]] = field(default_factory=list)


def deepen(
    A: Matrix,
    r: int,
    start: int = 1,
    max_N: int = 40,
    xmax: Optional[int] = None,
    cap: int = DEFAULT_IMAGE_CAP,
    threads: int = 1,
) -> Deepening:
    """Raise N from ``start`` until the verdict is Forced or ``max_N`` is passed."""
    history = []
    verdict: Verdict = Inconclusive("no-images")
    for N in range(max(start, 1), max_N + 1):
        verdict = verify_ipr_finite(A, N, r, xmax, cap, threads)
        history.append((N, verdict.kind))
        if isinstance(verdict, Forced):
            return Deepening(N, verdict, history)
        if isinstance(verdict, Inconclusive) and verdict.reason == "cap-exceeded":
            break
    return Deepening(None, verdict, history)


def find_monochromatic_witness(A: Matrix, coloring: Coloring, xmax: Optional[int] = None):
    """Some (x, color) with A x monochromatic inside [1..N], or None."""
    for im in enumerate_images(A, coloring.N, xmax):
        if coloring.is_monochromatic(im.values):
            return im.witness, coloring(im.values[0])
    return None


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("IPRKIT_THREADS", "1")))
    except ValueError:
        return 1
