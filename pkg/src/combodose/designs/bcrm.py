"""Bootstrap-aggregating CRM: data-driven orderings instead of fixed ones.

Each bootstrap resample of the patient records yields smoothed (isotonic)
posterior-mean estimates whose tie-broken sort order defines a complete
toxicity ordering; a one-parameter power-model CRM is then fit to the
original data under every distinct ordering and the fits are averaged with
the orderings' bootstrap frequencies.  Escalation follows the probability
cutoff rule with a diagonal start-up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, PHASE_STARTUP, StudyConfig, TrialState
from ..numerics import BetaParams, SkeletonSpec, crm_skeleton, pava_2d
from ..numerics.quadrature import midpoint_nodes
from .base import DoseFindingDesign
from .escalation import cutoff_rule_decide, diagonal_startup_sequence, startup_progress


@dataclass(frozen=True)
class BcrmConfig:
    prior: BetaParams = BetaParams(1.0, 1.0)
    jitter_eps: float = 1e-4
    bootstrap: int = 500
    eps_neighborhood: float = 0.12
    c_e: float = 0.85
    c_d: float = 0.45

    def __post_init__(self):
        if self.bootstrap < 1:
            raise ValueError("need at least one bootstrap replicate")
        if self.jitter_eps <= 0 or self.eps_neighborhood <= 0:
            raise ValueError("jitter and neighborhood widths must be positive")


@dataclass(frozen=True)
class BaggedPosterior:
    mean: np.ndarray
    p_below: np.ndarray  # P(pi < phi) per dose
    p_above: np.ndarray
    window: np.ndarray  # P(phi - eps < pi < phi + eps) per dose
    ordering_freqs: dict[tuple[Dose, ...], float]


def patient_records(state: TrialState) -> list[tuple[int, int]]:
    """Flatten the cohort log into per-patient (dose_index, outcome) pairs."""
    recs = []
    for rec in state.log:
        idx = (rec.dose[0] - 1) * state.grid.n_b + (rec.dose[1] - 1)
        recs.extend([(idx, 1)] * rec.dlts)
        recs.extend([(idx, 0)] * (rec.patients - rec.dlts))
    return recs


def ordering_from_estimates(values: np.ndarray, jitter_eps: float) -> tuple[Dose, ...]:
    """Total order of doses by smoothed estimate, anti-diagonal tie-break.

    Estimates are quantized at 1e-9 first so isotonic solver noise collapses
    back into ties; the tie-break adds rank * eps with eps shrunk below the
    smallest remaining strict gap over the number of doses, so strictly
    separated estimates are never reordered.
    """
    n_a, n_b = values.shape
    q = np.round(values, 9)
    doses = [(a, b) for a in range(1, n_a + 1) for b in range(1, n_b + 1)]
    doses.sort(key=lambda d: (q[d[0] - 1, d[1] - 1], d[0] + d[1], d[0]))
    gaps = np.diff(np.sort(q.ravel()))
    strict = gaps[gaps > 0]
    if strict.size:
        jitter_eps = min(jitter_eps, float(strict.min()) / (2.0 * values.size))
    jittered = {d: q[d[0] - 1, d[1] - 1] + r * jitter_eps for r, d in enumerate(doses, start=1)}
    doses.sort(key=lambda d: jittered[d])
    return tuple(doses)


class _CrmQuadrature:
    """One-parameter power-model CRM posterior on a fixed node grid with a
    standard normal prior on the slope parameter."""

    def __init__(self, resolution: int = 401, bound: float = 6.0):
        (nodes,) = midpoint_nodes([(-bound, bound)], resolution)
        self.u = np.exp(nodes)  # power model exponent per node
        self.log_prior = -0.5 * nodes**2

    def fit(self, skeleton_by_dose: np.ndarray, n: np.ndarray, y: np.ndarray, phi: float, eps: float):
        # pi per node per dose: (nodes, n_a, n_b); xlogy keeps 0 * log(0) = 0
        p = skeleton_by_dose[None, :, :] ** self.u[:, None, None]
        ll = xlogy(y, p) + xlogy(n - y, 1.0 - p)
        logw = ll.sum(axis=(1, 2)) + self.log_prior
        w = np.exp(logw - logw.max())
        w /= w.sum()
        mean = np.tensordot(w, p, axes=(0, 0))
        p_below = np.tensordot(w, (p < phi).astype(float), axes=(0, 0))
        p_above = np.tensordot(w, (p > phi).astype(float), axes=(0, 0))
        window = np.tensordot(w, ((p > phi - eps) & (p < phi + eps)).astype(float), axes=(0, 0))
        return mean, p_below, p_above, window


class BcrmDesign(DoseFindingDesign):
    design_id = "bcrm"

    def __init__(
        self,
        grid: DoseGrid,
        study: StudyConfig,
        config: BcrmConfig | None = None,
        half_width: float = 0.05,
        mtd_position: int = 11,
    ):
        super().__init__(grid, study)
        self.config = config or BcrmConfig()
        spec = SkeletonSpec(half_width, mtd_position, grid.size, study.phi)
        self.skeleton = np.asarray(crm_skeleton(spec))
        self.startup_seq = diagonal_startup_sequence(grid)
        self.quad = _CrmQuadrature()

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        cfg = BcrmConfig(
            jitter_eps=params.get("jitter_eps", 1e-4),
            bootstrap=params.get("bootstrap", 500),
            eps_neighborhood=params.get("eps_neighborhood", 0.12),
            c_e=params.get("c_e", 0.85),
            c_d=params.get("c_d", 0.45),
        )
        return cls(grid, study, cfg, params.get("half_width", 0.05), params.get("mtd_position", 11))

    def compute_phase(self, state: TrialState) -> str:
        _, over = startup_progress(self.startup_seq, state.log)
        return PHASE_MODEL if over else PHASE_STARTUP

    def _skeleton_for(self, ordering: tuple[Dose, ...]) -> np.ndarray:
        sk = np.empty((self.grid.n_a, self.grid.n_b))
        for t, (a, b) in enumerate(ordering):
            sk[a - 1, b - 1] = self.skeleton[t]
        return sk

    def bagged_posterior(self, state: TrialState, rng: np.random.Generator) -> BaggedPosterior:
        """Eq-style bagging: bootstrap orderings weighted by frequency, CRM
        fits always on the original data."""
        records = patient_records(state)
        if not records:
            raise ValueError("need at least one enrolled patient")
        cfg = self.config
        n_pat = len(records)
        codes = np.array([idx * 2 + out for idx, out in records], dtype=np.int64)
        n_cells = self.grid.size
        draws = rng.integers(0, n_pat, size=(cfg.bootstrap, n_pat))
        counts: dict[tuple[Dose, ...], int] = {}
        prior = cfg.prior
        for row in draws:
            picked = np.bincount(codes[row], minlength=2 * n_cells)
            y_b = picked[1::2].reshape(self.grid.n_a, self.grid.n_b)
            n_b = y_b + picked[0::2].reshape(self.grid.n_a, self.grid.n_b)
            means = (prior.a + y_b) / (prior.mass + n_b)
            iso = pava_2d(means, n_b + prior.mass)
            ordering = ordering_from_estimates(iso, cfg.jitter_eps)
            counts[ordering] = counts.get(ordering, 0) + 1
        freqs = {o: c / cfg.bootstrap for o, c in counts.items()}
        mean = np.zeros((self.grid.n_a, self.grid.n_b))
        p_below = np.zeros_like(mean)
        p_above = np.zeros_like(mean)
        window = np.zeros_like(mean)
        for ordering, f in freqs.items():
            sk = self._skeleton_for(ordering)
            m, pb, pa, wd = self.quad.fit(sk, state.n, state.y, self.phi, cfg.eps_neighborhood)
            mean += f * m
            p_below += f * pb
            p_above += f * pa
            window += f * wd
        return BaggedPosterior(mean, p_below, p_above, window, freqs)

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign(self.startup_seq[0], "startup")
        used, over = startup_progress(self.startup_seq, state.log)
        if not over:
            return Decision.assign(self.startup_seq[used], "startup")
        post = self.bagged_posterior(state, rng)
        a, b = state.current
        return cutoff_rule_decide(
            self.grid,
            state.current,
            float(post.p_below[a - 1, b - 1]),
            float(post.p_above[a - 1, b - 1]),
            post.mean,
            self.phi,
            self.config.c_e,
            self.config.c_d,
        )

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        tried = state.tried_doses()
        if not tried:
            return MtdResult()
        post = self.bagged_posterior(state, rng)
        best = max(tried, key=lambda d: (round(float(post.window[d[0] - 1, d[1] - 1]), 12), d[0] + d[1], d[0]))
        return MtdResult(best, float(post.mean[best[0] - 1, best[1] - 1]))

    def estimates(self, state, rng):
        if state.total_patients == 0:
            return None
        return self.bagged_posterior(state, rng).mean
