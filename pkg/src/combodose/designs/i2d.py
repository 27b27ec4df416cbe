"""Two-agent CRM over a discrete dose grid with a power-type surface.

The surface is pi = 1 - ca**alpha * (1 - cb)**(beta + gamma*log(ca)) with
per-level constants ca (agent A, decreasing) and cb (agent B, increasing);
with the interaction off the gamma term is dropped.  Conduct uses a
single-patient start-up sweep that walks agent A along the bottom row, then
single probes at higher agent-B rows, then the top row; the model phase
re-enters at the bottom row and afterwards moves only to axial or
anti-diagonal neighbours (no diagonal escalation).
"""

from __future__ import annotations

import numpy as np

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, PHASE_STARTUP, StudyConfig, TrialState
from ..numerics.quadrature import midpoint_nodes
from .base import DEFAULT_PROFILE, DoseFindingDesign, MonoProfile, closest_to_target, neighbors_no_diagonal
from ._surface import SurfacePosterior
from .escalation import startup_progress


def i2d_surface(alpha: float, beta: float, gamma: float, ca: float, cb: float, interaction: bool = True) -> float:
    """Toxicity probability of one combination under the power-type surface."""
    expo = beta + gamma * np.log(ca) if interaction else beta
    return float(1.0 - ca**alpha * (1.0 - cb) ** expo)


def i2d_startup_sequence(grid: DoseGrid) -> list[Dose]:
    """Start-up sweep: the full bottom row, one probe per intermediate
    agent-B row (agent A stepping down by 2, floored at 1), then the top
    row from the probe position outward."""
    seq = [(a, 1) for a in range(1, grid.n_a + 1)]
    a = grid.n_a
    for b in range(2, grid.n_b + 1):
        a = max(1, a - 2)
        if b < grid.n_b:
            seq.append((a, b))
        else:
            seq.extend((m, b) for m in range(a, grid.n_a + 1))
    return seq


class I2dDesign(DoseFindingDesign):
    design_id = "i2d"

    def __init__(
        self,
        grid: DoseGrid,
        study: StudyConfig,
        profile: MonoProfile = DEFAULT_PROFILE,
        interaction: bool = False,
        resolution: int = 61,
        power_bound: float = 5.0,
    ):
        super().__init__(grid, study)
        if len(profile.p) != grid.n_a or len(profile.q) != grid.n_b:
            raise ValueError("monotherapy profile lengths must match the grid")
        self.profile = profile
        self.interaction = interaction
        # Constants chosen so alpha = beta = 1 reproduces independent action:
        # pi = 1 - (1 - p)(1 - q).  ca decreases with agent A level.
        self.ca = 1.0 - np.asarray(profile.p)
        self.cb = np.asarray(profile.q)
        self.startup_seq = i2d_startup_sequence(grid)
        bounds = [(0.0, power_bound), (0.0, power_bound)]
        if interaction:
            bounds.append((-power_bound, 0.0))
        axes = midpoint_nodes(bounds, resolution)
        mesh = np.meshgrid(*axes, indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=-1)
        ca = self.ca[None, :, None]
        cb = self.cb[None, None, :]
        alpha = nodes[:, 0][:, None, None]
        beta = nodes[:, 1][:, None, None]
        expo = beta + (nodes[:, 2][:, None, None] * np.log(ca) if interaction else 0.0)
        self.posterior = SurfacePosterior(1.0 - ca**alpha * (1.0 - cb) ** expo)

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
            params.get("interaction", False),
            params.get("resolution", 61),
        )

    def compute_phase(self, state: TrialState) -> str:
        _, over = startup_progress(self.startup_seq, state.log)
        return PHASE_MODEL if over else PHASE_STARTUP

    def cohort_size(self, state: TrialState) -> int:
        return 1 if self.compute_phase(state) == PHASE_STARTUP else self.study.cohort_size

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign(self.startup_seq[0], "startup")
        used, over = startup_progress(self.startup_seq, state.log)
        if not over:
            return Decision.assign(self.startup_seq[used], "startup")
        weights = self.posterior.weights(state.n, state.y)
        means = self.posterior.means(weights)
        est = {d: float(means[d[0] - 1, d[1] - 1]) for d in self.grid.doses()}
        if len(state.log) == used:
            # Model phase re-enters with agent B at its lowest level.
            row = [(a, 1) for a in range(1, self.grid.n_a + 1)]
            return Decision.assign(closest_to_target(row, est, self.phi), "model-entry")
        cand = neighbors_no_diagonal(self.grid, state.current) + [state.current]
        return Decision.assign(closest_to_target(cand, est, self.phi), "model")

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        tried = state.tried_doses()
        if not tried:
            return MtdResult()
        weights = self.posterior.weights(state.n, state.y)
        means = self.posterior.means(weights)
        est = {d: float(means[d[0] - 1, d[1] - 1]) for d in tried}
        best = closest_to_target(tried, est, self.phi)
        return MtdResult(best, est[best])

    def estimates(self, state, rng):
        return self.posterior.means(self.posterior.weights(state.n, state.y))
