"""Domain types and trial bookkeeping shared by every dose-finding design.

Dose combinations are 1-based pairs ``(a, b)`` where ``a`` indexes the levels
of agent A and ``b`` the levels of agent B.  All matrices over the grid
(assignment counts, DLT counts, toxicity rates, estimates) are numpy arrays of
shape ``(n_a, n_b)`` indexed ``[a - 1, b - 1]``.

The cohort log is the source of truth for a trial: the count matrices are
derived caches and replaying the log from an empty state must reproduce them
exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

Dose = tuple[int, int]

PHASE_STARTUP = "startup"
PHASE_MODEL = "model"
PHASE_FINISHED = "finished"


class TrialError(ValueError):
    """Raised on invalid trial bookkeeping (bad dose, bad counts, wrong phase)."""


class UndefinedRateError(TrialError):
    """Raised when an empirical rate is requested for an untried dose."""


@dataclass(frozen=True)
class DoseGrid:
    """Rectangular grid of dose combinations: agent A levels x agent B levels."""

    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise TrialError(f"grid must have at least one level per agent, got {self.n_a}x{self.n_b}")

    def contains(self, dose: Dose) -> bool:
        a, b = dose
        return 1 <= a <= self.n_a and 1 <= b <= self.n_b

    def doses(self) -> list[Dose]:
        return [(a, b) for a in range(1, self.n_a + 1) for b in range(1, self.n_b + 1)]

    @property
    def size(self) -> int:
        return self.n_a * self.n_b


@dataclass(frozen=True)
class ToxicityScenario:
    """Ground-truth DLT probabilities used by the simulator.

    ``monotone`` records whether the rates are non-decreasing along each row
    and column.  A violation is surfaced as a flag (and a warning at load
    time), not an error, so deliberately odd scenarios remain usable.
    """

    grid: DoseGrid
    rates: np.ndarray
    name: str = "scenario"

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        if rates.shape != (self.grid.n_a, self.grid.n_b):
            raise TrialError(
                f"rates shape {rates.shape} does not match grid {self.grid.n_a}x{self.grid.n_b}"
            )
        if np.any(rates < 0.0) or np.any(rates > 1.0):
            raise TrialError("toxicity rates must lie in [0, 1]")
        object.__setattr__(self, "rates", rates)

    @property
    def monotone(self) -> bool:
        r = self.rates
        return bool(np.all(np.diff(r, axis=0) >= 0) and np.all(np.diff(r, axis=1) >= 0))

    def rate(self, dose: Dose) -> float:
        return float(self.rates[dose[0] - 1, dose[1] - 1])


@dataclass(frozen=True)
class CohortRecord:
    dose: Dose
    patients: int
    dlts: int


@dataclass(frozen=True)
class TrialState:
    """Running tally of a trial: counts, DLTs, cohort log, phase, current dose."""

    grid: DoseGrid
    n: np.ndarray
    y: np.ndarray
    log: tuple[CohortRecord, ...] = ()
    phase: str = PHASE_STARTUP
    current: Optional[Dose] = None

    @staticmethod
    def empty(grid: DoseGrid, phase: str = PHASE_STARTUP) -> "TrialState":
        shape = (grid.n_a, grid.n_b)
        return TrialState(grid, np.zeros(shape, dtype=int), np.zeros(shape, dtype=int), (), phase, None)

    @property
    def total_patients(self) -> int:
        return int(self.n.sum())

    @property
    def total_dlts(self) -> int:
        return int(self.y.sum())

    def counts(self, dose: Dose) -> tuple[int, int]:
        a, b = dose
        return int(self.n[a - 1, b - 1]), int(self.y[a - 1, b - 1])

    def tried_doses(self) -> list[Dose]:
        idx = np.argwhere(self.n > 0)
        return [(int(a) + 1, int(b) + 1) for a, b in idx]

    def with_phase(self, phase: str) -> "TrialState":
        return replace(self, phase=phase)


@dataclass(frozen=True)
class Decision:
    """Next action emitted by a design: assign a dose or terminate the trial."""

    action: str  # "assign" | "terminate"
    dose: Optional[Dose] = None
    reason: str = ""

    @staticmethod
    def assign(dose: Dose, reason: str) -> "Decision":
        return Decision("assign", dose, reason)

    @staticmethod
    def terminate(reason: str) -> "Decision":
        return Decision("terminate", None, reason)

    @property
    def is_terminate(self) -> bool:
        return self.action == "terminate"


@dataclass(frozen=True)
class StudyConfig:
    """Study-level parameters shared by all designs in a simulation run."""

    phi: float = 0.3
    max_n: int = 60
    cohort_size: int = 3
    early_stop_n: Optional[int] = None
    reps: int = 2000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.phi < 1.0:
            raise TrialError(f"target toxicity probability must be in (0, 1), got {self.phi}")
        if self.max_n < 1:
            raise TrialError("max_n must be positive")
        if self.cohort_size < 1:
            raise TrialError("cohort_size must be positive")
        if self.cohort_size > 1 and self.max_n % self.cohort_size != 0:
            raise TrialError(
                f"max_n={self.max_n} must be a multiple of cohort_size={self.cohort_size}"
            )
        if self.early_stop_n is not None and self.early_stop_n < self.cohort_size:
            raise TrialError("early_stop_n must be at least one cohort")


@dataclass(frozen=True)
class MtdResult:
    """Final recommendation: the selected dose, or nothing if the trial stopped."""

    selected: Optional[Dose] = None
    estimate: Optional[float] = None


def record_cohort(state: TrialState, dose: Dose, patients: int, dlts: int) -> TrialState:
    """Append one cohort to the trial, returning a new state."""
    if state.phase == PHASE_FINISHED:
        raise TrialError("trial already finished")
    if not state.grid.contains(dose):
        raise TrialError(f"dose {dose} outside {state.grid.n_a}x{state.grid.n_b} grid")
    if patients < 1:
        raise TrialError("cohort must contain at least one patient")
    if not 0 <= dlts <= patients:
        raise TrialError(f"dlts={dlts} must lie in [0, patients={patients}]")
    n = state.n.copy()
    y = state.y.copy()
    a, b = dose
    n[a - 1, b - 1] += patients
    y[a - 1, b - 1] += dlts
    return replace(state, n=n, y=y, log=state.log + (CohortRecord(dose, patients, dlts),), current=dose)


def replay_log(grid: DoseGrid, log: Iterable[CohortRecord], phase: str = PHASE_STARTUP) -> TrialState:
    """Rebuild count matrices from a cohort log."""
    state = TrialState.empty(grid, phase)
    for rec in log:
        state = record_cohort(state, rec.dose, rec.patients, rec.dlts)
    return state


def empirical_rate(state: TrialState, dose: Dose) -> float:
    """Observed DLT fraction at a dose; undefined until the dose has been tried."""
    n, y = state.counts(dose)
    if n == 0:
        raise UndefinedRateError(f"no patients at dose {dose}")
    return y / n


def true_mtd_set(scenario: ToxicityScenario, phi: float, tol: float = 1e-6) -> set[Dose]:
    """Doses whose true rate is within ``tol`` of the target. May be empty."""
    hits = np.argwhere(np.abs(scenario.rates - phi) <= tol)
    return {(int(a) + 1, int(b) + 1) for a, b in hits}


def overtoxic_set(scenario: ToxicityScenario, phi: float, margin: float = 1e-9) -> set[Dose]:
    """Doses whose true rate strictly exceeds the target (beyond ``margin``)."""
    hits = np.argwhere(scenario.rates > phi + margin)
    return {(int(a) + 1, int(b) + 1) for a, b in hits}


def scenario_to_json(scenario: ToxicityScenario) -> dict:
    """Serialize to the scenario file schema (rows are agent-B levels)."""
    return {
        "name": scenario.name,
        "J": scenario.grid.n_a,
        "K": scenario.grid.n_b,
        "rates": [[float(v) for v in scenario.rates[:, k]] for k in range(scenario.grid.n_b)],
    }


def scenario_from_json(obj: dict) -> ToxicityScenario:
    """Parse the scenario file schema: row k of ``rates`` holds agent-B level k."""
    try:
        n_a = int(obj["J"])
        n_b = int(obj["K"])
        rows = obj["rates"]
        name = str(obj.get("name", "scenario"))
    except (KeyError, TypeError) as exc:
        raise TrialError(f"malformed scenario object: {exc}") from exc
    if len(rows) != n_b or any(len(row) != n_a for row in rows):
        raise TrialError(f"scenario '{name}': rates must be {n_b} rows of {n_a} values")
    rates = np.array(rows, dtype=float).T
    return ToxicityScenario(DoseGrid(n_a, n_b), rates, name)


def load_scenario(path: str) -> ToxicityScenario:
    with open(path) as fh:
        return scenario_from_json(json.load(fh))
