"""Monte Carlo study runner: simulate trials, enforce stopping rules, and
compute operating characteristics.

Every replication owns an isolated RNG stream derived from (base seed,
design id, scenario id, replication index), so results are independent of
execution order and worker count.
"""

from __future__ import annotations

import csv
import io
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import (
    CohortRecord,
    Dose,
    MtdResult,
    PHASE_FINISHED,
    StudyConfig,
    ToxicityScenario,
    TrialState,
    overtoxic_set,
    record_cohort,
    true_mtd_set,
)
from .designs import build_design
from .designs.base import DoseFindingDesign, decision_rng


@dataclass(frozen=True)
class TrialRecord:
    design_id: str
    scenario_id: str
    rep: int
    seed: tuple[int, ...]  # entropy words feeding this replication's streams
    log: tuple[CohortRecord, ...]
    result: MtdResult
    termination: str
    patients_total: int


@dataclass(frozen=True)
class MetricsRow:
    design_id: str
    scenario_id: str
    s_c: float
    s_ot: float
    a_c: float
    a_ot: float
    reps: int
    mean_n: float


def _stable_id_hash(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def trial_seed_words(base_seed: int, design_id: str, scenario_id: str, rep: int) -> list[int]:
    return [int(base_seed), _stable_id_hash(design_id), _stable_id_hash(scenario_id), int(rep)]


def apply_early_stop(state: TrialState, recommended: Dose, cap: Optional[int]) -> bool:
    """True when the recommended dose has already enrolled ``cap`` patients."""
    if cap is None:
        return False
    n, _ = state.counts(recommended)
    return n >= cap


def run_trial(
    design: DoseFindingDesign,
    scenario: ToxicityScenario,
    config: StudyConfig,
    seed_words: Sequence[int],
    rep: int = 0,
) -> TrialRecord:
    """Simulate one trial to completion; deterministic given the seed words."""
    root = np.random.SeedSequence(list(seed_words))
    outcome_ss, design_ss = root.spawn(2)
    outcome_rng = np.random.default_rng(outcome_ss)
    design_seed = int(design_ss.generate_state(1)[0])

    state = design.fresh_state()
    termination = "max-n"
    while True:
        decision = design.decide(state, decision_rng(design_seed, state))
        if decision.is_terminate:
            termination = decision.reason
            break
        dose = decision.dose
        if not state.grid.contains(dose):
            raise RuntimeError(
                f"design {design.design_id} assigned out-of-grid dose {dose} (contract violation)"
            )
        if apply_early_stop(state, dose, config.early_stop_n):
            termination = f"early-stop-{config.early_stop_n}"
            break
        size = min(design.cohort_size(state), config.max_n - state.total_patients)
        rate = scenario.rate(dose)
        dlts = int((outcome_rng.random(size) < rate).sum())
        state = record_and_sync(design, state, dose, size, dlts)
        if state.total_patients >= config.max_n:
            break
    state = state.with_phase(PHASE_FINISHED)
    if termination == "max-n" or termination.startswith("early-stop"):
        result = design.select_mtd(state, decision_rng(design_seed, state))
    else:
        result = MtdResult()  # design terminated the trial: no recommendation
    return TrialRecord(
        design.design_id,
        scenario.name,
        rep,
        tuple(int(w) for w in seed_words),
        state.log,
        result,
        termination,
        state.total_patients,
    )


def record_and_sync(design: DoseFindingDesign, state: TrialState, dose: Dose, patients: int, dlts: int) -> TrialState:
    return design.sync_phase(record_cohort(state, dose, patients, dlts))


def compute_metrics(records: Sequence[TrialRecord], scenario: ToxicityScenario, phi: float, mtd_tol: float = 1e-6) -> MetricsRow:
    """Operating characteristics over one (design, scenario) cell.

    Runs that end without a recommendation stay in the denominators: they
    count as neither correct nor over-toxic selections.
    """
    if not records:
        raise ValueError("no trial records to summarize")
    mtd = true_mtd_set(scenario, phi, mtd_tol)
    toxic = overtoxic_set(scenario, phi)
    n_runs = len(records)
    sel_correct = sel_toxic = 0
    frac_correct = np.empty(n_runs)
    frac_toxic = np.empty(n_runs)
    patients = np.empty(n_runs)
    for i, rec in enumerate(records):
        if rec.result.selected is not None:
            sel_correct += rec.result.selected in mtd
            sel_toxic += rec.result.selected in toxic
        at_mtd = at_toxic = 0
        for cohort in rec.log:
            if cohort.dose in mtd:
                at_mtd += cohort.patients
            if cohort.dose in toxic:
                at_toxic += cohort.patients
        patients[i] = rec.patients_total
        frac_correct[i] = at_mtd / rec.patients_total
        frac_toxic[i] = at_toxic / rec.patients_total
    return MetricsRow(
        records[0].design_id,
        scenario.name,
        s_c=sel_correct / n_runs,
        s_ot=sel_toxic / n_runs,
        a_c=float(frac_correct.mean()),
        a_ot=float(frac_toxic.mean()),
        reps=n_runs,
        mean_n=float(patients.mean()),
    )


@dataclass(frozen=True)
class DesignSpec:
    design_id: str
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.params.get("label", self.design_id)


def _run_cell(args) -> tuple[str, str, list[TrialRecord]]:
    spec, scenario, config, rep_range = args
    grid = scenario.grid
    design = build_design(spec.design_id, grid, config, spec.params, scenario)
    records = []
    for rep in rep_range:
        words = trial_seed_words(config.seed, spec.label, scenario.name, rep)
        records.append(run_trial(design, scenario, config, words, rep))
    return spec.label, scenario.name, records


def run_study(
    designs: Sequence[DesignSpec],
    scenarios: Sequence[ToxicityScenario],
    config: StudyConfig,
    threads: int = 1,
    keep_records: bool = False,
):
    """Full factorial study; returns metric rows (and records if asked).

    Replications are split into chunks that run in separate processes when
    ``threads > 1``; per-replication seeding makes the result identical for
    any worker count.
    """
    jobs = []
    for spec in designs:
        for scenario in scenarios:
            if threads > 1 and config.reps >= 8:
                chunk = max(1, config.reps // (threads * 4))
                starts = range(0, config.reps, chunk)
                jobs.extend(
                    (spec, scenario, config, range(s, min(s + chunk, config.reps))) for s in starts
                )
            else:
                jobs.append((spec, scenario, config, range(config.reps)))
    results: dict[tuple[str, str], list[TrialRecord]] = {}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for label, scen, recs in pool.map(_run_cell, jobs):
                results.setdefault((label, scen), []).extend(recs)
    else:
        for job in jobs:
            label, scen, recs = _run_cell(job)
            results.setdefault((label, scen), []).extend(recs)
    rows = []
    all_records: dict[tuple[str, str], list[TrialRecord]] = {}
    scen_by_name = {s.name: s for s in scenarios}
    for spec in designs:
        for scenario in scenarios:
            recs = sorted(results[(spec.label, scenario.name)], key=lambda r: r.rep)
            row = compute_metrics(recs, scen_by_name[scenario.name], config.phi)
            rows.append(replace(row, design_id=spec.label))
            if keep_records:
                all_records[(spec.label, scenario.name)] = recs
    if keep_records:
        return rows, all_records
    return rows


def metrics_to_csv(rows: Sequence[MetricsRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["design", "scenario", "S_C", "S_OT", "A_C", "A_OT", "reps", "mean_n"])
    for r in rows:
        writer.writerow(
            [
                r.design_id,
                r.scenario_id,
                f"{r.s_c:.6f}",
                f"{r.s_ot:.6f}",
                f"{r.a_c:.6f}",
                f"{r.a_ot:.6f}",
                r.reps,
                f"{r.mean_n:.6f}",
            ]
        )
    return buf.getvalue()


def metrics_from_csv(text: str) -> list[MetricsRow]:
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    for rec in reader:
        rows.append(
            MetricsRow(
                rec["design"],
                rec["scenario"],
                float(rec["S_C"]),
                float(rec["S_OT"]),
                float(rec["A_C"]),
                float(rec["A_OT"]),
                int(rec["reps"]),
                float(rec["mean_n"]),
            )
        )
    return rows
