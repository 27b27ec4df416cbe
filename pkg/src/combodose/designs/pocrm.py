"""Partial-ordering CRM: model averaging over candidate complete orderings.

Each ordering maps the grid onto a one-dimensional skeleton; a one-parameter
power model is fit by maximum likelihood per ordering, orderings are weighted
by their posterior probability, and the working ordering for the next cohort
is drawn by weighted randomization.  A zone-based start-up phase (one
anti-diagonal at a time, random order within a zone) runs until the first
DLT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, PHASE_STARTUP, StudyConfig, TrialState
from ..numerics import SkeletonSpec, crm_skeleton
from .base import DoseFindingDesign
from .orderings import Ordering, enumerate_orderings


class MleUndefinedError(ValueError):
    """The one-parameter MLE does not exist (all-DLT or no-DLT data)."""


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    """Argmax of a unimodal function on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def power_model_loglik(skeleton_by_dose: np.ndarray, n: np.ndarray, y: np.ndarray, a: float) -> float:
    """Log-likelihood of the power working model sk ** exp(a) for count data."""
    u = math.exp(a)
    p = skeleton_by_dose**u
    with np.errstate(divide="ignore"):
        ll = y * np.log(p) + (n - y) * np.log1p(-p)
    return float(ll[np.asarray(n) > 0].sum())


@dataclass(frozen=True)
class PocrmFit:
    a_hat: np.ndarray  # per-ordering MLE
    weights: np.ndarray  # posterior ordering probabilities, sum to 1
    estimates: np.ndarray  # (n_orderings, n_a, n_b) fitted toxicity surfaces


class PocrmModel:
    """Orderings, their skeleton layouts, and the prior over orderings."""

    def __init__(self, grid: DoseGrid, skeleton: list[float], orderings: list[Ordering], prior_weights=None):
        if any(len(o.doses) != grid.size for o in orderings):
            raise ValueError("each ordering must cover the full grid")
        if len(skeleton) != grid.size:
            raise ValueError("skeleton length must equal the number of dose combinations")
        self.grid = grid
        self.orderings = orderings
        self.skeleton = np.asarray(skeleton, dtype=float)
        m = len(orderings)
        self.prior_weights = (
            np.full(m, 1.0 / m) if prior_weights is None else np.asarray(prior_weights, dtype=float)
        )
        if abs(self.prior_weights.sum() - 1.0) > 1e-9:
            raise ValueError("ordering prior weights must sum to 1")
        # skeleton value of each dose under each ordering, shape (m, n_a, n_b)
        self.sk_matrix = np.empty((m, grid.n_a, grid.n_b))
        for i, o in enumerate(orderings):
            for t, (a, b) in enumerate(o.doses):
                self.sk_matrix[i, a - 1, b - 1] = self.skeleton[t]


def pocrm_fit(model: PocrmModel, state: TrialState, a_bound: float = 5.0, tol: float = 1e-8) -> PocrmFit:
    """Per-ordering MLEs and posterior ordering weights."""
    total_n = state.total_patients
    total_y = state.total_dlts
    if total_y == 0 or total_y == total_n:
        raise MleUndefinedError("need both a DLT and a non-DLT for the MLE to exist")
    m = len(model.orderings)
    a_hat = np.empty(m)
    logl = np.empty(m)
    est = np.empty_like(model.sk_matrix)
    n, y = state.n, state.y
    for i in range(m):
        sk = model.sk_matrix[i]
        f = lambda a: power_model_loglik(sk, n, y, a)
        a_hat[i] = golden_section_max(f, -a_bound, a_bound, tol)
        logl[i] = f(a_hat[i])
        est[i] = sk ** math.exp(a_hat[i])
    w = model.prior_weights * np.exp(logl - logl.max())
    return PocrmFit(a_hat, w / w.sum(), est)


def pocrm_choose_dose(fit: PocrmFit, model: PocrmModel, phi: float, rng: np.random.Generator) -> Dose:
    """Weighted-randomized ordering, then the dose nearest the target under it.

    Distance ties resolve to the earlier position in the sampled ordering.
    """
    idx = int(rng.choice(len(model.orderings), p=fit.weights))
    ordering = model.orderings[idx]
    est = fit.estimates[idx]
    best = min(
        ordering.doses,
        key=lambda d: (abs(est[d[0] - 1, d[1] - 1] - phi), ordering.position_of(d)),
    )
    return best


def zone_of(dose: Dose) -> int:
    return dose[0] + dose[1] - 1


class PocrmDesign(DoseFindingDesign):
    design_id = "pocrm"

    def __init__(
        self,
        grid: DoseGrid,
        study: StudyConfig,
        half_width: float = 0.05,
        mtd_position: int = 11,
        a_bound: float = 5.0,
    ):
        super().__init__(grid, study)
        spec = SkeletonSpec(half_width, mtd_position, grid.size, study.phi)
        self.model = PocrmModel(grid, crm_skeleton(spec), enumerate_orderings(grid))
        self.a_bound = a_bound

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        return cls(
            grid,
            study,
            params.get("half_width", 0.05),
            params.get("mtd_position", 11),
            params.get("a_bound", 5.0),
        )

    def compute_phase(self, state: TrialState) -> str:
        if state.total_dlts > 0:
            return PHASE_MODEL
        if len(state.tried_doses()) == self.grid.size:
            return PHASE_MODEL  # every zone explored without a DLT
        return PHASE_STARTUP

    def _startup_dose(self, state: TrialState, rng) -> Dose:
        tried = set(state.tried_doses())
        for z in range(1, self.grid.n_a + self.grid.n_b):
            zone = [d for d in self.grid.doses() if zone_of(d) == z]
            open_doses = sorted(set(zone) - tried)
            if open_doses:
                return open_doses[int(rng.integers(len(open_doses)))]
        raise AssertionError("startup called with all zones explored")

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign((1, 1), "startup")
        if self.compute_phase(state) == PHASE_STARTUP:
            return Decision.assign(self._startup_dose(state, rng), "startup")
        try:
            fit = pocrm_fit(self.model, state, self.a_bound)
        except MleUndefinedError:
            # Homogeneous outcomes: hold the safest informative dose.
            if state.total_dlts == 0:
                return Decision.assign(self.highest_tried(state), "hold-no-dlt")
            return Decision.assign((1, 1), "hold-all-dlt")
        dose = pocrm_choose_dose(fit, self.model, self.phi, rng)
        return Decision.assign(dose, "model")

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        if state.total_patients == 0:
            return MtdResult()
        try:
            fit = pocrm_fit(self.model, state, self.a_bound)
        except MleUndefinedError:
            dose = self.highest_tried(state) if state.total_dlts == 0 else (1, 1)
            return MtdResult(dose, None)
        # Final call: the modal ordering rather than a randomized one.
        idx = int(np.argmax(fit.weights))
        ordering = self.model.orderings[idx]
        est = fit.estimates[idx]
        best = min(
            ordering.doses,
            key=lambda d: (abs(est[d[0] - 1, d[1] - 1] - self.phi), ordering.position_of(d)),
        )
        return MtdResult(best, float(est[best[0] - 1, best[1] - 1]))

    def estimates(self, state, rng):
        try:
            fit = pocrm_fit(self.model, state, self.a_bound)
        except MleUndefinedError:
            return None
        return np.tensordot(fit.weights, fit.estimates, axes=(0, 0))
