"""Copula-linked dose-toxicity surface with probability-cutoff escalation.

Marginal monotherapy toxicities enter through power transforms and are
joined by a Clayton-style dependence term.  Start-up walks agent B up the
first column, then agent A along the first row, each pass ending on its
first DLT; the model phase applies the probability cutoff rule with fixed
cutoffs (0.8, 0.45) and de-escalation demanded at (1, 1) stops the trial.
"""

from __future__ import annotations

import numpy as np

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, PHASE_STARTUP, StudyConfig, TrialState
from ..numerics.quadrature import midpoint_nodes
from .base import DEFAULT_PROFILE, DoseFindingDesign, MonoProfile, closest_to_target
from ._surface import SurfacePosterior
from .escalation import cutoff_rule_decide


def copula_surface(alpha: float, beta: float, gamma: float, p: float, q: float) -> float:
    """Joint toxicity probability from the agents' marginal probabilities."""
    if gamma <= 0:
        raise ValueError("dependence parameter must be positive")
    term = (1.0 - p**alpha) ** (-gamma) + (1.0 - q**beta) ** (-gamma) - 1.0
    return float(1.0 - term ** (-1.0 / gamma))


def _startup_passes(grid: DoseGrid) -> tuple[list[Dose], list[Dose]]:
    vertical = [(1, b) for b in range(1, grid.n_b + 1)]
    horizontal = [(a, 1) for a in range(2, grid.n_a + 1)]
    return vertical, horizontal


def _pass_progress(log, passes) -> tuple[Dose | None, bool]:
    """Next start-up dose and whether start-up is over.  Each pass consumes
    log records until its first DLT or its last dose."""
    i = 0
    for seq in passes:
        for dose in seq:
            if i >= len(log):
                return dose, False
            rec = log[i]
            i += 1
            if rec.dlts > 0:
                break
    return None, True


class CopulaDesign(DoseFindingDesign):
    design_id = "copula"

    def __init__(
        self,
        grid: DoseGrid,
        study: StudyConfig,
        profile: MonoProfile = DEFAULT_PROFILE,
        c_e: float = 0.8,
        c_d: float = 0.45,
        resolution: int = 61,
        param_bound: float = 3.0,
        allow_untried_mtd: bool = False,
    ):
        super().__init__(grid, study)
        if len(profile.p) != grid.n_a or len(profile.q) != grid.n_b:
            raise ValueError("monotherapy profile lengths must match the grid")
        if c_e + c_d <= 1.0:
            raise ValueError("cutoffs must satisfy c_e + c_d > 1")
        self.profile = profile
        self.c_e = c_e
        self.c_d = c_d
        self.allow_untried_mtd = allow_untried_mtd
        self.passes = _startup_passes(grid)
        axes = midpoint_nodes([(0.0, param_bound)] * 3, resolution)
        mesh = np.meshgrid(*axes, indexing="ij")
        alpha = mesh[0].ravel()[:, None, None]
        beta = mesh[1].ravel()[:, None, None]
        gamma = mesh[2].ravel()[:, None, None]
        p = np.asarray(profile.p)[None, :, None]
        q = np.asarray(profile.q)[None, None, :]
        term = (1.0 - p**alpha) ** (-gamma) + (1.0 - q**beta) ** (-gamma) - 1.0
        self.posterior = SurfacePosterior(1.0 - term ** (-1.0 / gamma))

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        profile = MonoProfile(
            tuple(params.get("profile_a", DEFAULT_PROFILE.p)),
            tuple(params.get("profile_b", DEFAULT_PROFILE.q)),
        )
        return cls(
            grid,
            study,
            profile,
            params.get("c_e", 0.8),
            params.get("c_d", 0.45),
            params.get("resolution", 61),
            allow_untried_mtd=params.get("allow_untried_mtd", False),
        )

    def compute_phase(self, state: TrialState) -> str:
        _, over = _pass_progress(state.log, self.passes)
        return PHASE_MODEL if over else PHASE_STARTUP

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign((1, 1), "startup")
        nxt, over = _pass_progress(state.log, self.passes)
        if not over:
            return Decision.assign(nxt, "startup")
        weights = self.posterior.weights(state.n, state.y)
        means = self.posterior.means(weights)
        p_below, p_above = self.posterior.tail_probs(weights, state.current, self.phi)
        return cutoff_rule_decide(
            self.grid, state.current, p_below, p_above, means, self.phi, self.c_e, self.c_d
        )

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        tried = state.tried_doses()
        if not tried:
            return MtdResult()
        weights = self.posterior.weights(state.n, state.y)
        means = self.posterior.means(weights)
        pool = self.grid.doses() if self.allow_untried_mtd else tried
        est = {d: float(means[d[0] - 1, d[1] - 1]) for d in pool}
        best = closest_to_target(pool, est, self.phi)
        return MtdResult(best, est[best])

    def estimates(self, state, rng):
        return self.posterior.means(self.posterior.weights(state.n, state.y))
