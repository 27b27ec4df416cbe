"""Shared live-conduct logic: the history file schema, log replay, and the
recommendation rule (design decision plus the optional per-dose early stop).

The HTTP service and the offline ``decide`` command both run through these
functions, so a recommendation computed over HTTP is identical to one
computed from the exported history file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import CohortRecord, Decision, DoseGrid, StudyConfig, TrialError, TrialState, record_cohort
from .designs import build_design
from .designs.base import DoseFindingDesign, decision_rng
from .engine import apply_early_stop


@dataclass(frozen=True)
class TrialSetup:
    design_id: str
    params: dict
    study: StudyConfig
    grid: DoseGrid
    seed: int


def setup_from_json(obj: dict) -> TrialSetup:
    try:
        study_obj = obj.get("study", {})
        study = StudyConfig(
            phi=float(study_obj.get("phi", 0.3)),
            max_n=int(study_obj.get("max_n", 60)),
            cohort_size=int(study_obj.get("cohort_size", 3)),
            early_stop_n=study_obj.get("early_stop_n"),
            reps=1,
            seed=0,
        )
        grid_obj = obj["grid"]
        grid = DoseGrid(int(grid_obj["J"]), int(grid_obj["K"]))
        return TrialSetup(
            design_id=str(obj["design"]),
            params=dict(obj.get("params", {})),
            study=study,
            grid=grid,
            seed=int(obj.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TrialError):
            raise
        raise TrialError(f"malformed trial setup: {exc}") from exc


def log_from_json(entries) -> list[CohortRecord]:
    records = []
    for e in entries:
        dose = e["dose"]
        records.append(CohortRecord((int(dose["j"]), int(dose["k"])), int(e["patients"]), int(e["dlts"])))
    return records


def log_to_json(log) -> list[dict]:
    return [
        {"dose": {"j": r.dose[0], "k": r.dose[1]}, "patients": r.patients, "dlts": r.dlts}
        for r in log
    ]


def build_from_setup(setup: TrialSetup) -> DoseFindingDesign:
    return build_design(setup.design_id, setup.grid, setup.study, setup.params)


def replay(design: DoseFindingDesign, log) -> TrialState:
    state = design.fresh_state()
    for rec in log:
        state = design.sync_phase(record_cohort(state, rec.dose, rec.patients, rec.dlts))
    return state


def recommend(design: DoseFindingDesign, state: TrialState, seed: int, early_stop_n: Optional[int]) -> Decision:
    """The next action for a live trial, honoring the per-dose early stop."""
    if state.total_patients >= design.study.max_n:
        return Decision.terminate("max-n")
    decision = design.decide(state, decision_rng(seed, state))
    if not decision.is_terminate and apply_early_stop(state, decision.dose, early_stop_n):
        return Decision.terminate(f"early-stop-{early_stop_n}")
    return decision


def matrix_rows(matrix: Optional[np.ndarray]) -> Optional[list[list[float]]]:
    """Serialize a grid matrix as rows of agent-B levels (row k holds all
    agent-A levels), matching the scenario file convention."""
    if matrix is None:
        return None
    return [[float(v) for v in matrix[:, k]] for k in range(matrix.shape[1])]


def decide_from_history(obj: dict) -> dict:
    """Offline recommendation for an exported history object."""
    setup = setup_from_json(obj)
    design = build_from_setup(setup)
    log = log_from_json(obj.get("log", []))
    state = replay(design, log)
    decision = recommend(design, state, setup.seed, setup.study.early_stop_n)
    estimates = design.estimates(state, decision_rng(setup.seed, state)) if state.total_patients else None
    out = {
        "phase": state.phase,
        "decision": {
            "action": decision.action,
            "reason": decision.reason,
        },
        "estimates": matrix_rows(estimates),
        "patients": state.total_patients,
        "dlts": state.total_dlts,
    }
    if decision.dose is not None:
        out["decision"]["dose"] = {"j": decision.dose[0], "k": decision.dose[1]}
    return out


def load_history(path: str) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise TrialError(f"history file is not valid JSON: {exc}") from exc
