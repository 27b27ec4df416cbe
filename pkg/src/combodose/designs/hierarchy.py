"""Hierarchical beta-binomial design: single stage, no start-up.

Each combination's toxicity gets a beta prior whose shapes are log-linear in
per-agent effective doses; the six coefficients carry independent normal
priors.  Conduct checks an exact CI on the pooled toxicity rate before every
cohort (terminate when its lower bound exceeds the target), then assigns the
8-neighbourhood dose whose posterior mean is nearest the target.  Diagonal
moves are allowed.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, StudyConfig, TrialState
from ..numerics import exact_binomial_ci
from .base import DoseFindingDesign, clamp_guess, closest_to_target, neighbors_eight, shifted_guess
from ._mcmc import SamplerSettings, hierarchy_chain, run_design_chain


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


class HierarchyDesign(DoseFindingDesign):
    design_id = "hierarchy"

    def __init__(
        self,
        grid: DoseGrid,
        study: StudyConfig,
        guess_row,  # prior guesses for (j, 1), length n_a
        guess_col,  # prior guesses for (1, k), length n_b
        sigma2: float = 10.0,
        k_const: float | None = None,
        ci_level: float = 0.95,
        sampler: SamplerSettings | None = None,
    ):
        super().__init__(grid, study)
        if len(guess_row) != grid.n_a or len(guess_col) != grid.n_b:
            raise ValueError("prior guess lengths must match the grid")
        if sigma2 <= 0:
            raise ValueError("prior variance must be positive")
        self.sigma2 = sigma2
        self.ci_level = ci_level
        self.sampler = sampler or SamplerSettings(scales=(0.6, 0.9, 0.9, 0.6, 0.9, 0.9))
        guess_row = clamp_guess(guess_row)
        guess_col = clamp_guess(guess_col)
        pi11 = guess_row[0]
        k_const = float(grid.n_b if k_const is None else k_const)
        spread = 2.0 * math.sqrt(sigma2)
        self.mu = np.array([math.log(k_const * pi11), spread, spread])
        self.omega = np.array([math.log(k_const * (1.0 - pi11)), spread, spread])
        denom = 2.0 * spread  # mu_1 + omega_1
        self.a_eff = np.array([( _logit(g) - _logit(pi11)) / denom for g in guess_row])
        self.b_eff = np.array([( _logit(g) - _logit(guess_col[0])) / denom for g in guess_col])
        self.a_eff[0] = 0.0
        self.b_eff[0] = 0.0

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        guess_row, guess_col = resolve_guesses(grid, params, scenario)
        sampler = sampler_from_params(params, default=SamplerSettings(scales=(0.6, 0.9, 0.9, 0.6, 0.9, 0.9)))
        return cls(
            grid,
            study,
            guess_row,
            guess_col,
            params.get("sigma2", 10.0),
            params.get("k_const"),
            params.get("ci_level", 0.95),
            sampler,
        )

    def initial_phase(self) -> str:
        return PHASE_MODEL

    def posterior_samples(self, state: TrialState, rng) -> np.ndarray:
        init = np.concatenate([self.mu, self.omega])
        seed = int(rng.integers(np.iinfo(np.int64).max))
        samples, _ = run_design_chain(
            hierarchy_chain,
            init,
            self.sampler,
            seed,
            state.y.astype(np.float64),
            state.n.astype(np.float64),
            self.a_eff,
            self.b_eff,
            self.mu,
            self.omega,
            self.sigma2,
        )
        return samples

    def posterior_means(self, state: TrialState, rng) -> np.ndarray:
        """E[(alpha + y) / (alpha + beta + n)] over the coefficient posterior."""
        s = self.posterior_samples(state, rng)
        la = s[:, 0, None, None] + s[:, 1, None, None] * self.a_eff[None, :, None] + s[:, 2, None, None] * self.b_eff[None, None, :]
        lb = s[:, 3, None, None] + s[:, 4, None, None] * self.a_eff[None, :, None] + s[:, 5, None, None] * self.b_eff[None, None, :]
        al = np.exp(la)
        be = np.exp(lb)
        return ((al + state.y) / (al + be + state.n)).mean(axis=0)

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign((1, 1), "first-cohort")
        lo, _ = exact_binomial_ci(state.total_dlts, state.total_patients, self.ci_level)
        if lo > self.phi:
            return Decision.terminate("safety-stop")
        means = self.posterior_means(state, rng)
        cand = neighbors_eight(self.grid, state.current) + [state.current]
        est = {d: float(means[d[0] - 1, d[1] - 1]) for d in cand}
        return Decision.assign(closest_to_target(cand, est, self.phi), "model")

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        tried = state.tried_doses()
        if not tried:
            return MtdResult()
        means = self.posterior_means(state, rng)
        est = {d: float(means[d[0] - 1, d[1] - 1]) for d in tried}
        best = closest_to_target(tried, est, self.phi)
        return MtdResult(best, est[best])

    def estimates(self, state, rng):
        return self.posterior_means(state, rng)


def resolve_guesses(grid: DoseGrid, params: dict, scenario) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Prior guesses from explicit params, the scenario truth, or a shifted
    (deliberately wrong) version of the truth."""
    mode = params.get("prior_guess", "truth")
    if "guess_row" in params and "guess_col" in params:
        return tuple(params["guess_row"]), tuple(params["guess_col"])
    if scenario is None:
        raise ValueError("prior guesses require either explicit values or a scenario")
    row = [float(scenario.rates[j, 0]) for j in range(grid.n_a)]
    col = [float(scenario.rates[0, k]) for k in range(grid.n_b)]
    if mode == "truth":
        return clamp_guess(row), clamp_guess(col)
    if mode == "shifted":
        return clamp_guess(shifted_guess(row)), clamp_guess(shifted_guess(col))
    raise ValueError(f"unknown prior_guess mode '{mode}'")


def sampler_from_params(params: dict, default: SamplerSettings) -> SamplerSettings:
    s = params.get("sampler", {})
    return SamplerSettings(
        burnin=s.get("burnin", default.burnin),
        keep=s.get("keep", default.keep),
        scales=tuple(s.get("scales", default.scales)),
    )
