"""Common contract implemented by all nine dose-finding designs.

A design is constructed once per trial from a grid, the study settings, and
its own parameters.  It is stateless across calls: every decision is a pure
function of the trial state (whose cohort log is authoritative) plus an
explicit RNG, so replaying a log always reproduces the same recommendations.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import (
    PHASE_MODEL,
    PHASE_STARTUP,
    Decision,
    Dose,
    DoseGrid,
    MtdResult,
    StudyConfig,
    TrialState,
)


@dataclass(frozen=True)
class MonoProfile:
    """Monotherapy toxicity profile of the two agents (design input, not truth)."""

    p: tuple[float, ...]  # agent A, strictly increasing in (0, 1)
    q: tuple[float, ...]  # agent B

    def __post_init__(self):
        for label, vec in (("p", self.p), ("q", self.q)):
            arr = np.asarray(vec, dtype=float)
            if np.any(arr <= 0) or np.any(arr >= 1):
                raise ValueError(f"monotherapy profile {label} must lie in (0, 1)")
            if np.any(np.diff(arr) <= 0):
                raise ValueError(f"monotherapy profile {label} must be strictly increasing")


# Main-setting monotherapy profile used by I2D, Copula, and DFCOMB.
DEFAULT_PROFILE = MonoProfile(p=(0.1, 0.2, 0.25, 0.3, 0.35), q=(0.1, 0.3, 0.35))
ALT_PROFILE = MonoProfile(p=(0.05, 0.1, 0.2, 0.25, 0.3), q=(0.1, 0.2, 0.25))


def closest_to_target(candidates, estimates: dict[Dose, float], phi: float) -> Optional[Dose]:
    """The candidate whose estimate is nearest the target.

    Ties are broken deterministically and safety-first: prefer an estimate at
    or below the target over one above it; among equal estimates below the
    target take the higher dose position (keeps pushing toward the target),
    among equal estimates at or above it take the lower position.  Distances
    are quantized at 1e-9 so solver noise cannot defeat the tie rules.
    """
    best = None
    best_key = None
    for dose in candidates:
        est = estimates[dose]
        pos = dose[0] + dose[1]
        if est < phi - 1e-9:
            key = (round(abs(est - phi), 9), 0, -pos, -dose[0])
        else:
            key = (round(abs(est - phi), 9), int(est > phi + 1e-9), pos, dose[0])
        if best_key is None or key < best_key:
            best, best_key = dose, key
    return best


def neighbors_no_diagonal(grid: DoseGrid, dose: Dose) -> list[Dose]:
    """Four axial neighbours plus the two anti-diagonal moves."""
    a, b = dose
    cand = [(a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1), (a + 1, b - 1), (a - 1, b + 1)]
    return [d for d in cand if grid.contains(d)]


def neighbors_eight(grid: DoseGrid, dose: Dose) -> list[Dose]:
    a, b = dose
    cand = [
        (a + da, b + db)
        for da in (-1, 0, 1)
        for db in (-1, 0, 1)
        if not (da == 0 and db == 0)
    ]
    return [d for d in cand if grid.contains(d)]


def decision_rng(seed: int, state: TrialState) -> np.random.Generator:
    """Per-decision RNG derived from the trial seed and the log length.

    Using the log length as the second entropy word makes recommendations
    reproducible under replay, restart, and undo/redo.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), len(state.log)]))


class DoseFindingDesign(ABC):
    """One trial design: phase bookkeeping, dose decisions, MTD selection."""

    design_id: str = ""

    def __init__(self, grid: DoseGrid, study: StudyConfig):
        self.grid = grid
        self.study = study
        self.phi = study.phi

    # -- phase -------------------------------------------------------------

    def initial_phase(self) -> str:
        """Phase of an empty trial; single-stage designs start in "model"."""
        return PHASE_STARTUP

    def compute_phase(self, state: TrialState) -> str:
        """Recompute the phase from the log (pure).  Default: single phase."""
        return state.phase

    def sync_phase(self, state: TrialState) -> TrialState:
        phase = self.compute_phase(state)
        return state if phase == state.phase else state.with_phase(phase)

    # -- conduct -----------------------------------------------------------

    def cohort_size(self, state: TrialState) -> int:
        return self.study.cohort_size

    @abstractmethod
    def decide(self, state: TrialState, rng: np.random.Generator) -> Decision:
        """Next action given the current state.  Empty state must yield (1, 1)."""

    @abstractmethod
    def select_mtd(self, state: TrialState, rng: np.random.Generator) -> MtdResult:
        """Final recommendation once the trial has stopped."""

    def estimates(self, state: TrialState, rng: np.random.Generator) -> Optional[np.ndarray]:
        """Current toxicity estimate surface for reporting, or None if the
        design has nothing model-based to show yet."""
        return None

    # -- helpers shared by subclasses --------------------------------------

    def fresh_state(self) -> TrialState:
        return TrialState.empty(self.grid, self.initial_phase())

    def highest_tried(self, state: TrialState) -> Optional[Dose]:
        tried = state.tried_doses()
        if not tried:
            return None
        return max(tried, key=lambda d: (d[0] + d[1], d[0]))


def clamp_guess(values, lo: float = 0.01, hi: float = 0.99) -> tuple[float, ...]:
    """Clamp prior-guess probabilities away from 0/1 so logits stay finite."""
    return tuple(float(min(max(v, lo), hi)) for v in values)


def shifted_guess(values) -> tuple[float, ...]:
    """Default mis-specified prior guess: each level takes the truth of the
    next lower level (one-dose shift, first level halved)."""
    vals = [float(v) for v in values]
    return tuple([vals[0] / 2.0] + vals[:-1])
