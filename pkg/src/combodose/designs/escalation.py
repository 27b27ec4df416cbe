"""Probability-cutoff escalation rule shared by the Copula-family designs.

Escalate when the current dose is likely under the target, de-escalate when
it is likely over, otherwise stay.  Candidate moves are the four
non-decreasing (resp. non-increasing) steps including the two anti-diagonal
trades, filtered to estimates strictly beyond the current dose's estimate in
the direction of travel.  De-escalation demanded at (1, 1) terminates the
trial.
"""

from __future__ import annotations

import numpy as np

from ..core import Decision, Dose, DoseGrid
from .base import closest_to_target


def _estimate(estimates: np.ndarray, dose: Dose) -> float:
    return float(estimates[dose[0] - 1, dose[1] - 1])


def cutoff_rule_decide(
    grid: DoseGrid,
    current: Dose,
    p_below: float,
    p_above: float,
    estimates: np.ndarray,
    phi: float,
    c_e: float,
    c_d: float,
) -> Decision:
    a, b = current
    if p_below > c_e:
        if current == (grid.n_a, grid.n_b):
            return Decision.assign(current, "stay-at-top")
        cur_est = _estimate(estimates, current)
        cand = [(a + 1, b), (a, b + 1), (a + 1, b - 1), (a - 1, b + 1)]
        cand = [d for d in cand if grid.contains(d) and _estimate(estimates, d) > cur_est]
        if not cand:
            return Decision.assign(current, "stay")
        est = {d: _estimate(estimates, d) for d in cand}
        return Decision.assign(closest_to_target(cand, est, phi), "escalate")
    if p_above > c_d:
        if current == (1, 1):
            return Decision.terminate("safety-stop")
        cur_est = _estimate(estimates, current)
        cand = [(a - 1, b), (a, b - 1), (a + 1, b - 1), (a - 1, b + 1)]
        cand = [d for d in cand if grid.contains(d) and _estimate(estimates, d) < cur_est]
        if not cand:
            return Decision.assign(current, "stay")
        est = {d: _estimate(estimates, d) for d in cand}
        return Decision.assign(closest_to_target(cand, est, phi), "de-escalate")
    return Decision.assign(current, "stay")


def diagonal_startup_sequence(grid: DoseGrid) -> list[Dose]:
    """Escalate both agents together, then the one that has room left."""
    seq = []
    a = b = 1
    seq.append((a, b))
    while (a, b) != (grid.n_a, grid.n_b):
        if a < grid.n_a and b < grid.n_b:
            a += 1
            b += 1
        elif a < grid.n_a:
            a += 1
        else:
            b += 1
        seq.append((a, b))
    return seq


def startup_progress(sequence: list[Dose], log) -> tuple[int, bool]:
    """How many start-up records have been consumed and whether the phase is
    over (first DLT seen or sequence exhausted).  Start-up records are
    matched one-to-one against the prefix of the cohort log."""
    used = 0
    for rec in log:
        if used >= len(sequence):
            return used, True
        used += 1
        if rec.dlts > 0:
            return used, True
    return used, used >= len(sequence)
