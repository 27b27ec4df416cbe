"""Candidate toxicity orderings of a dose-combination grid.

Only the partial order is known (toxicity is monotone within each agent), so
CRM-style designs work with a handful of complete orderings that all extend
it: row-wise, column-wise, and four diagonal traversals.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Dose, DoseGrid

ORDERING_NAMES = (
    "rows",
    "columns",
    "up-diagonals",
    "down-diagonals",
    "up-down-diagonals",
    "down-up-diagonals",
)


@dataclass(frozen=True)
class Ordering:
    label: str
    doses: tuple[Dose, ...]  # position t (0-based) -> dose pair

    def position_of(self, dose: Dose) -> int:
        return self.doses.index(dose)


def _diagonals(grid: DoseGrid) -> list[list[Dose]]:
    out = []
    for z in range(2, grid.n_a + grid.n_b + 1):
        diag = [(a, z - a) for a in range(grid.n_a, 0, -1) if grid.contains((a, z - a))]
        out.append(diag)  # listed from high agent-A index to low ("up" direction)
    return out


def enumerate_orderings(grid: DoseGrid) -> list[Ordering]:
    """The six standard complete orderings, each a linear extension of the
    within-agent partial order."""
    rows = [(a, b) for b in range(1, grid.n_b + 1) for a in range(1, grid.n_a + 1)]
    cols = [(a, b) for a in range(1, grid.n_a + 1) for b in range(1, grid.n_b + 1)]
    diags = _diagonals(grid)
    up = [d for diag in diags for d in diag]
    down = [d for diag in diags for d in reversed(diag)]
    updown = [
        d
        for i, diag in enumerate(diags)
        for d in (diag if i % 2 == 0 else list(reversed(diag)))
    ]
    downup = [
        d
        for i, diag in enumerate(diags)
        for d in (list(reversed(diag)) if i % 2 == 0 else diag)
    ]
    seqs = [rows, cols, up, down, updown, downup]
    return [Ordering(name, tuple(seq)) for name, seq in zip(ORDERING_NAMES, seqs)]


def respects_partial_order(doses) -> bool:
    """True when no dose appears after another dose that dominates it."""
    seen: list[Dose] = []
    for dose in doses:
        for prev in seen:
            if dose != prev and dose[0] <= prev[0] and dose[1] <= prev[1]:
                return False
        seen.append(dose)
    return True
