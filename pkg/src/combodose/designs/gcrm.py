"""Proportional-odds logistic design conducted patient by patient.

One logistic model per agent-B level shares a common slope on agent A's
effective dose; per-level intercepts are tied together by normally
distributed increments (kept non-decreasing) and the slope carries a gamma
prior.  Every patient triggers a refit; diagonal moves are allowed, and the
trial stops once the lowest combination is probably over the target.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, StudyConfig, TrialState
from .base import DoseFindingDesign, clamp_guess, closest_to_target, neighbors_eight
from ._mcmc import SamplerSettings, gcrm_chain, run_design_chain
from .hierarchy import resolve_guesses, sampler_from_params


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def _expit(x):
    return 1.0 / (1.0 + np.exp(-x))


class GcrmDesign(DoseFindingDesign):
    design_id = "gcrm"

    def __init__(
        self,
        grid: DoseGrid,
        study: StudyConfig,
        guess_row,
        guess_col,
        mu_alpha: float = -8.0,
        mu_beta: float = 1.0,
        s2_alpha: float = 1.0,
        s2_beta: float = 1.0,
        stop_threshold: float = 0.95,
        sampler: SamplerSettings | None = None,
    ):
        super().__init__(grid, study)
        if len(guess_row) != grid.n_a or len(guess_col) != grid.n_b:
            raise ValueError("prior guess lengths must match the grid")
        guess_row = clamp_guess(guess_row)
        guess_col = clamp_guess(guess_col)
        self.mu_alpha = mu_alpha
        self.mu_beta = mu_beta
        self.s2_alpha = s2_alpha
        self.stop_threshold = stop_threshold
        self.a_eff = np.array([(_logit(g) - mu_alpha) / mu_beta for g in guess_row])
        deltas = [_logit(guess_col[k]) - _logit(guess_col[k - 1]) for k in range(1, grid.n_b)]
        self.delta = np.array([max(d, 0.0) for d in deltas])  # keep the prior path monotone
        self.g_shape = mu_beta**2 / s2_beta
        self.g_rate = mu_beta / s2_beta
        self.sampler = sampler or SamplerSettings(scales=(0.25,) * (grid.n_b + 1))

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        guess_row, guess_col = resolve_guesses(grid, params, scenario)
        sampler = sampler_from_params(params, default=SamplerSettings(scales=(0.25,) * (grid.n_b + 1)))
        return cls(
            grid,
            study,
            guess_row,
            guess_col,
            params.get("mu_alpha", -8.0),
            params.get("mu_beta", 1.0),
            params.get("s2_alpha", 1.0),
            params.get("s2_beta", 1.0),
            params.get("stop_threshold", 0.95),
            sampler,
        )

    def initial_phase(self) -> str:
        return PHASE_MODEL

    def cohort_size(self, state: TrialState) -> int:
        return 1  # patient-by-patient conduct

    def posterior_samples(self, state: TrialState, rng) -> np.ndarray:
        alphas = [self.mu_alpha]
        for d in self.delta:
            alphas.append(alphas[-1] + d)
        init = np.array(alphas + [self.mu_beta])
        seed = int(rng.integers(np.iinfo(np.int64).max))
        samples, _ = run_design_chain(
            gcrm_chain,
            init,
            self.sampler,
            seed,
            state.y.astype(np.float64),
            state.n.astype(np.float64),
            self.a_eff,
            self.delta,
            self.mu_alpha,
            self.s2_alpha,
            self.g_shape,
            self.g_rate,
        )
        return samples

    def _pi_samples(self, samples: np.ndarray) -> np.ndarray:
        n_b = self.grid.n_b
        alpha = samples[:, :n_b]  # (S, n_b)
        beta = samples[:, n_b]
        eta = alpha[:, None, :] + beta[:, None, None] * self.a_eff[None, :, None]
        return _expit(eta)  # (S, n_a, n_b)

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign((1, 1), "first-patient")
        pi = self._pi_samples(self.posterior_samples(state, rng))
        if float((pi[:, 0, 0] > self.phi).mean()) > self.stop_threshold:
            return Decision.terminate("safety-stop")
        means = pi.mean(axis=0)
        cand = neighbors_eight(self.grid, state.current) + [state.current]
        est = {d: float(means[d[0] - 1, d[1] - 1]) for d in cand}
        return Decision.assign(closest_to_target(cand, est, self.phi), "model")

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        tried = state.tried_doses()
        if not tried:
            return MtdResult()
        means = self._pi_samples(self.posterior_samples(state, rng)).mean(axis=0)
        est = {d: float(means[d[0] - 1, d[1] - 1]) for d in tried}
        best = closest_to_target(tried, est, self.phi)
        return MtdResult(best, est[best])

    def estimates(self, state, rng):
        return self._pi_samples(self.posterior_samples(state, rng)).mean(axis=0)
