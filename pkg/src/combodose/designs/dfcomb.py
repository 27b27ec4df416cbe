"""Logistic-surface design with interaction and probability-cutoff conduct.

Effective doses are the logits of the monotherapy profiles; the four
regression coefficients are sampled under priors that enforce monotonicity.
Start-up escalates along the diagonal until the first DLT; the model phase
applies the shared cutoff rule and the final MTD maximizes the posterior
mass of a window around the target among doses that treated a cohort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, PHASE_STARTUP, StudyConfig, TrialState
from .base import DEFAULT_PROFILE, DoseFindingDesign, MonoProfile
from ._mcmc import SamplerSettings, dfcomb_chain, run_design_chain
from .escalation import cutoff_rule_decide, diagonal_startup_sequence, startup_progress


def _expit(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass(frozen=True)
class DfcombSummary:
    mean: np.ndarray
    p_below: np.ndarray
    p_above: np.ndarray
    window: np.ndarray


class DfcombDesign(DoseFindingDesign):
    design_id = "dfcomb"

    def __init__(
        self,
        grid: DoseGrid,
        study: StudyConfig,
        profile: MonoProfile = DEFAULT_PROFILE,
        c_e: float = 0.85,
        c_d: float = 0.45,
        delta: float = 0.12,
        sampler: SamplerSettings | None = None,
    ):
        super().__init__(grid, study)
        if len(profile.p) != grid.n_a or len(profile.q) != grid.n_b:
            raise ValueError("monotherapy profile lengths must match the grid")
        self.profile = profile
        self.c_e = c_e
        self.c_d = c_d
        self.delta = delta
        self.sampler = sampler or SamplerSettings(scales=(0.5, 0.4, 0.4, 0.3))
        self.a_eff = np.array([math.log(p / (1 - p)) for p in profile.p])
        self.b_eff = np.array([math.log(q / (1 - q)) for q in profile.q])
        self.startup_seq = diagonal_startup_sequence(grid)

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        from .hierarchy import sampler_from_params

        profile = MonoProfile(
            tuple(params.get("profile_a", DEFAULT_PROFILE.p)),
            tuple(params.get("profile_b", DEFAULT_PROFILE.q)),
        )
        sampler = sampler_from_params(params, default=SamplerSettings(scales=(0.5, 0.4, 0.4, 0.3)))
        return cls(
            grid,
            study,
            profile,
            params.get("c_e", 0.85),
            params.get("c_d", 0.45),
            params.get("delta", 0.12),
            sampler,
        )

    def compute_phase(self, state: TrialState) -> str:
        _, over = startup_progress(self.startup_seq, state.log)
        return PHASE_MODEL if over else PHASE_STARTUP

    def summary(self, state: TrialState, rng) -> DfcombSummary:
        init = np.array([0.0, 1.0, 1.0, 0.0])
        seed = int(rng.integers(np.iinfo(np.int64).max))
        samples, _ = run_design_chain(
            dfcomb_chain,
            init,
            self.sampler,
            seed,
            state.y.astype(np.float64),
            state.n.astype(np.float64),
            self.a_eff,
            self.b_eff,
        )
        eta = (
            samples[:, 0, None, None]
            + samples[:, 1, None, None] * self.a_eff[None, :, None]
            + samples[:, 2, None, None] * self.b_eff[None, None, :]
            + samples[:, 3, None, None] * (self.a_eff[None, :, None] * self.b_eff[None, None, :])
        )
        pi = _expit(eta)
        return DfcombSummary(
            mean=pi.mean(axis=0),
            p_below=(pi < self.phi).mean(axis=0),
            p_above=(pi > self.phi).mean(axis=0),
            window=((pi >= self.phi - self.delta) & (pi <= self.phi + self.delta)).mean(axis=0),
        )

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign(self.startup_seq[0], "startup")
        used, over = startup_progress(self.startup_seq, state.log)
        if not over:
            return Decision.assign(self.startup_seq[used], "startup")
        post = self.summary(state, rng)
        a, b = state.current
        return cutoff_rule_decide(
            self.grid,
            state.current,
            float(post.p_below[a - 1, b - 1]),
            float(post.p_above[a - 1, b - 1]),
            post.mean,
            self.phi,
            self.c_e,
            self.c_d,
        )

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        tried = state.tried_doses()
        if not tried:
            return MtdResult()
        post = self.summary(state, rng)
        best = max(tried, key=lambda d: (round(float(post.window[d[0] - 1, d[1] - 1]), 12), d[0] + d[1], d[0]))
        return MtdResult(best, float(post.mean[best[0] - 1, best[1] - 1]))

    def estimates(self, state, rng):
        return self.summary(state, rng).mean
