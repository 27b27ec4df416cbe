"""Model-assisted interval designs for combinations: BOIN and Keyboard.

Both designs move doses by comparing the observed DLT fraction at the
current combination against fixed boundaries (BOIN) or by locating the
strongest posterior key (Keyboard), then pick among the admissible
escalation set {(a+1, b), (a, b+1)} or de-escalation set {(a-1, b), (a, b-1)}
using beta-posterior interval masses.  Final MTD selection is shared:
2-D isotonic regression of posterior means over the grid, restricted to
tried doses.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from ..core import Decision, Dose, DoseGrid, MtdResult, PHASE_MODEL, StudyConfig, TrialState
from ..numerics import BetaParams, interval_masses, pava_2d
from .base import DoseFindingDesign, closest_to_target


@dataclass(frozen=True)
class BoinBoundaries:
    phi: float
    phi1: float
    phi2: float
    lambda_e: float
    lambda_d: float


def boin_boundaries(phi: float, phi1: float | None = None, phi2: float | None = None) -> BoinBoundaries:
    """Escalation/de-escalation boundaries minimizing misclassification odds.

    Defaults follow the recommended under/over-dosing margins
    phi1 = 0.6 * phi and phi2 = 1.4 * phi.
    """
    if phi1 is None:
        phi1 = 0.6 * phi
    if phi2 is None:
        phi2 = 1.4 * phi
    if not 0.0 < phi1 < phi < phi2 < 1.0:
        raise ValueError(f"need 0 < phi1 < phi < phi2 < 1, got ({phi1}, {phi}, {phi2})")
    lambda_e = math.log((1 - phi1) / (1 - phi)) / math.log(phi * (1 - phi1) / (phi1 * (1 - phi)))
    lambda_d = math.log((1 - phi) / (1 - phi2)) / math.log(phi2 * (1 - phi) / (phi * (1 - phi2)))
    return BoinBoundaries(phi, phi1, phi2, lambda_e, lambda_d)


@dataclass(frozen=True)
class KeyboardKeys:
    """Equal-width keys tiling [0, 1] around the target key (phi-eps1, phi+eps2).

    Edge stubs narrower than a full key are kept as (possibly thinner) keys so
    the tiling covers [0, 1] exactly.
    """

    eps1: float
    eps2: float
    edges: tuple[float, ...]
    target_index: int

    @property
    def n_keys(self) -> int:
        return len(self.edges) - 1


def keyboard_keys(phi: float, eps1: float = 0.05, eps2: float = 0.05) -> KeyboardKeys:
    if eps1 <= 0 or eps2 <= 0 or phi - eps1 <= 0 or phi + eps2 >= 1:
        raise ValueError(f"target key ({phi - eps1}, {phi + eps2}) must sit inside (0, 1)")
    width = eps1 + eps2
    lo = phi - eps1
    hi = phi + eps2
    lower = []
    e = lo
    while e > 1e-12:
        e = max(e - width, 0.0)
        lower.append(e)
    upper = []
    e = hi
    while e < 1.0 - 1e-12:
        e = min(e + width, 1.0)
        upper.append(e)
    edges = tuple(reversed(lower)) + (lo, hi) + tuple(upper)
    return KeyboardKeys(eps1, eps2, edges, target_index=len(lower))


def strongest_key(keys: KeyboardKeys, post: BetaParams) -> int:
    """Index of the key with maximal posterior mass.

    Mass ties go to the key nearer the target; an exact tie in distance goes
    to the lower key.
    """
    masses = interval_masses(post.a, post.b, np.asarray(keys.edges))
    order = sorted(
        range(keys.n_keys),
        key=lambda i: (-masses[i], abs(i - keys.target_index), i),
    )
    return order[0]


def _admissible(grid: DoseGrid, dose: Dose, up: bool) -> list[Dose]:
    a, b = dose
    cand = [(a + 1, b), (a, b + 1)] if up else [(a - 1, b), (a, b - 1)]
    return [d for d in cand if grid.contains(d)]


def _pick_by_interval_mass(
    state: TrialState,
    candidates: list[Dose],
    prior: BetaParams,
    lo: float,
    hi: float,
    up: bool,
) -> Dose:
    """Candidate maximizing posterior mass of (lo, hi); untried doses compete
    with their prior-only posterior.  Ties prefer fewer patients, then the
    agent-A move."""
    scored = []
    for dose in candidates:
        n, y = state.counts(dose)
        post = BetaParams(prior.a + y, prior.b + n - y)
        mass = float(interval_masses(post.a, post.b, np.array([lo, hi]))[0])
        a_rank = -dose[0] if up else dose[0]
        scored.append((-round(mass, 12), n, a_rank, dose))
    scored.sort(key=lambda t: t[:3])
    return scored[0][3]


def select_mtd_isotonic(state: TrialState, phi: float, prior: BetaParams) -> MtdResult:
    """Isotonic-regressed posterior means; pick the tried dose nearest phi.

    Untried doses enter the regression with prior-only means and prior-mass
    weight, so the projection is defined over the whole grid; selection is
    restricted to tried doses.
    """
    tried = state.tried_doses()
    if not tried:
        raise ValueError("cannot select an MTD before any dose has been tried")
    means = (prior.a + state.y) / (prior.mass + state.n)
    weights = state.n + prior.mass
    iso = pava_2d(means, weights)
    est = {d: float(iso[d[0] - 1, d[1] - 1]) for d in tried}
    best = closest_to_target(tried, est, phi)
    return MtdResult(best, est[best])


class CBoinDesign(DoseFindingDesign):
    """Combinational Bayesian optimal interval design."""

    design_id = "cboin"

    def __init__(self, grid: DoseGrid, study: StudyConfig, phi1=None, phi2=None, prior=(1.0, 1.0)):
        super().__init__(grid, study)
        self.bounds = boin_boundaries(study.phi, phi1, phi2)
        self.prior = BetaParams(*prior)

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        return cls(grid, study, params.get("phi1"), params.get("phi2"))

    def initial_phase(self) -> str:
        return PHASE_MODEL

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign((1, 1), "first-cohort")
        current = state.current
        n, y = state.counts(current)
        if n == 0:
            raise ValueError(f"no data at current dose {current}")
        p_hat = y / n
        b = self.bounds
        if p_hat <= b.lambda_e:
            cand = _admissible(self.grid, current, up=True)
            if not cand:
                return Decision.assign(current, "stay-at-top")
            dose = _pick_by_interval_mass(state, cand, self.prior, b.lambda_e, b.lambda_d, up=True)
            return Decision.assign(dose, "escalate")
        if p_hat >= b.lambda_d:
            cand = _admissible(self.grid, current, up=False)
            if not cand:
                return Decision.assign(current, "stay-at-bottom")
            dose = _pick_by_interval_mass(state, cand, self.prior, b.lambda_e, b.lambda_d, up=False)
            return Decision.assign(dose, "de-escalate")
        return Decision.assign(current, "stay")

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        return select_mtd_isotonic(state, self.phi, self.prior)

    def estimates(self, state, rng):
        if state.total_patients == 0:
            return None
        means = (self.prior.a + state.y) / (self.prior.mass + state.n)
        return pava_2d(means, state.n + self.prior.mass)


class CKeyboardDesign(DoseFindingDesign):
    """Combinational Keyboard design (shared admissible sets with BOIN)."""

    design_id = "ckeyboard"

    def __init__(self, grid: DoseGrid, study: StudyConfig, eps1=0.05, eps2=0.05, prior=(1.0, 1.0)):
        super().__init__(grid, study)
        self.keys = keyboard_keys(study.phi, eps1, eps2)
        self.prior = BetaParams(*prior)

    @classmethod
    def from_params(cls, grid, study, params, scenario=None):
        return cls(grid, study, params.get("eps1", 0.05), params.get("eps2", 0.05))

    def initial_phase(self) -> str:
        return PHASE_MODEL

    def decide(self, state: TrialState, rng) -> Decision:
        if state.total_patients == 0:
            return Decision.assign((1, 1), "first-cohort")
        current = state.current
        n, y = state.counts(current)
        if n == 0:
            raise ValueError(f"no data at current dose {current}")
        post = BetaParams(self.prior.a + y, self.prior.b + n - y)
        key = strongest_key(self.keys, post)
        lo = self.keys.edges[self.keys.target_index]
        hi = self.keys.edges[self.keys.target_index + 1]
        if key < self.keys.target_index:
            cand = _admissible(self.grid, current, up=True)
            if not cand:
                return Decision.assign(current, "stay-at-top")
            dose = _pick_by_interval_mass(state, cand, self.prior, lo, hi, up=True)
            return Decision.assign(dose, "escalate")
        if key > self.keys.target_index:
            cand = _admissible(self.grid, current, up=False)
            if not cand:
                return Decision.assign(current, "stay-at-bottom")
            dose = _pick_by_interval_mass(state, cand, self.prior, lo, hi, up=False)
            return Decision.assign(dose, "de-escalate")
        return Decision.assign(current, "stay")

    def select_mtd(self, state: TrialState, rng) -> MtdResult:
        return select_mtd_isotonic(state, self.phi, self.prior)

    def estimates(self, state, rng):
        if state.total_patients == 0:
            return None
        means = (self.prior.a + state.y) / (self.prior.mass + state.n)
        return pava_2d(means, state.n + self.prior.mass)


def boin_direction(n: int, y: int, bounds: BoinBoundaries) -> str:
    p_hat = y / n
    if p_hat <= bounds.lambda_e:
        return "escalate"
    if p_hat >= bounds.lambda_d:
        return "de-escalate"
    return "stay"


def keyboard_direction(n: int, y: int, keys: KeyboardKeys, prior=BetaParams(1.0, 1.0)) -> str:
    post = BetaParams(prior.a + y, prior.b + n - y)
    key = strongest_key(keys, post)
    if key < keys.target_index:
        return "escalate"
    if key > keys.target_index:
        return "de-escalate"
    return "stay"


def boundary_table(phi: float, max_patients: int, design: str = "cboin") -> str:
    """CSV decision chart: per n, the largest y that still escalates and the
    smallest y that de-escalates.  Deterministic byte stream."""
    if design == "cboin":
        bounds = boin_boundaries(phi)
        direction = lambda n, y: boin_direction(n, y, bounds)
    elif design == "ckeyboard":
        keys = keyboard_keys(phi)
        direction = lambda n, y: keyboard_direction(n, y, keys)
    else:
        raise ValueError(f"no boundary table for design '{design}'")
    buf = io.StringIO()
    buf.write("n,escalate_if_dlts_lte,deescalate_if_dlts_gte\n")
    for n in range(1, max_patients + 1):
        dirs = [direction(n, y) for y in range(n + 1)]
        esc = [y for y, d in enumerate(dirs) if d == "escalate"]
        des = [y for y, d in enumerate(dirs) if d == "de-escalate"]
        esc_s = str(max(esc)) if esc else ""
        des_s = str(min(des)) if des else ""
        buf.write(f"{n},{esc_s},{des_s}\n")
    return buf.getvalue()
