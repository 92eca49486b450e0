"""DIMACS export of the avoiding-coloring problem, and a small DPLL checker.

Variable v(n, c) = n*r + c + 1 - r says "n has color c".  Models decode back
to colorings; a model exists exactly when an avoiding coloring does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .search import Coloring, ImageInstance


def var(n: int, c: int, r: int) -> int:
    return n * r + c + 1 - r


@dataclass
class CNF:
    num_vars: int
    clauses: list[tuple[int, ...]]
    comments: list[str] = field(default_factory=list)

    def to_dimacs(self) -> str:
        lines = [f"c {c}" for c in self.comments]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, cl)) + " 0" for cl in self.clauses)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "CNF":
        num_vars = None
        comments: list[str] = []
        clauses: list[tuple[int, ...]] = []
        pending: list[int] = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("c"):
                comments.append(line[1:].strip())
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise ValueError(f"bad problem line {line!r}")
                num_vars = int(parts[2])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(tuple(pending))
                    pending = []
                else:
                    pending.append(lit)
        if num_vars is None:
            raise ValueError("missing 'p cnf' line")
        if pending:
            clauses.append(tuple(pending))
        return cls(num_vars, clauses, comments)


def export_cnf(images: Sequence, N: int, r: int) -> CNF:
    if r < 2:
        raise ValueError("CNF export needs at least two colors")
    clauses: list[tuple[int, ...]] = []
    for n in range(1, N + 1):
        clauses.append(tuple(var(n, c, r) for c in range(r)))
        clauses.extend((-var(n, c, r), -var(n, d, r)) for c, d in combinations(range(r), 2))
    for im in images:
        values = im.values if isinstance(im, ImageInstance) else tuple(im)
        for c in range(r):
            clauses.append(tuple(-var(n, c, r) for n in values))
    comments = [f"avoiding {r}-colorings of [1..{N}]", f"v(n,c) = n*{r} + c + 1 - {r}"]
    return CNF(N * r, clauses, comments)


def decode_model(model: dict[int, bool], N: int, r: int) -> Coloring:
    assignment = []
    for n in range(1, N + 1):
        colors = [c for c in range(r) if model.get(var(n, c, r))]
        if len(colors) != 1:
            raise ValueError(f"model gives {n} the colors {colors}")
        assignment.append(colors[0])
    return Coloring(N, r, tuple(assignment))


def solve_cnf(cnf: CNF) -> Optional[dict[int, bool]]:
    """DPLL with unit propagation; branches on the lowest free variable, true first."""
    clauses = [tuple(cl) for cl in cnf.clauses]
    if any(not cl for cl in clauses):
        return None
    watch: dict[int, list[int]] = {}
    for i, cl in enumerate(clauses):
        for lit in cl:
            watch.setdefault(-lit, []).append(i)
    value: dict[int, bool] = {}

    def lit_value(lit):
        v = value.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def propagate(start: list[int], trail: list[int]) -> bool:
        queue = list(start)
        while queue:
            lit = queue.pop()
            # clauses containing -lit lost a literal
            for i in watch.get(lit, ()):
                free = None
                nfree = 0
                sat = False
                for l2 in clauses[i]:
                    lv = lit_value(l2)
                    if lv is True:
                        sat = True
                        break
                    if lv is None:
                        nfree += 1
                        free = l2
                if sat:
                    continue
                if nfree == 0:
                    return False
                if nfree == 1:
                    value[abs(free)] = free > 0
                    trail.append(abs(free))
                    queue.append(free)
        return True

    def assign(lit, trail) -> bool:
        value[abs(lit)] = lit > 0
        trail.append(abs(lit))
        return propagate([lit], trail)

    def undo(trail):
        for v in trail:
            value.pop(v, None)

    root: list[int] = []
    for cl in clauses:
        if len(cl) == 1:
            lv = lit_value(cl[0])
            if lv is False:
                return None
            if lv is None and not assign(cl[0], root):
                return None

    def rec() -> bool:
        free = next((v for v in range(1, cnf.num_vars + 1) if v not in value), None)
        if free is None:
            return all(any(lit_value(l) for l in cl) for cl in clauses)
        for lit in (free, -free):
            trail: list[int] = []
            if assign(lit, trail) and rec():
                return True
            undo(trail)
        return False

    if not rec():
        return None
    return {v: value.get(v, False) for v in range(1, cnf.num_vars + 1)}
