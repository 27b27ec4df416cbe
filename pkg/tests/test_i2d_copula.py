import math

import numpy as np
import pytest

from combodose.core import DoseGrid, StudyConfig
from combodose.designs import CopulaDesign, I2dDesign
from combodose.designs.base import DEFAULT_PROFILE, MonoProfile
from combodose.designs.copula import copula_surface, _pass_progress, _startup_passes
from combodose.designs.i2d import i2d_startup_sequence, i2d_surface
from conftest import make_state

RNG = np.random.default_rng(0)


# -- surfaces -----------------------------------------------------------------


def test_i2d_surface_values():
    assert i2d_surface(1, 1, 0, ca=1.0, cb=0.0, interaction=False) == pytest.approx(0.0)
    assert i2d_surface(1, 1, 0, ca=0.9, cb=0.1, interaction=False) == pytest.approx(0.19, abs=1e-12)


def test_i2d_interaction_zero_matches_reduced_form():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b = rng.uniform(0.1, 4, 2)
        ca, cb = rng.uniform(0.05, 0.95, 2)
        assert i2d_surface(a, b, 0.0, ca, cb, True) == pytest.approx(
            i2d_surface(a, b, 0.0, ca, cb, False), abs=1e-14
        )


def test_i2d_surface_monotone_in_levels():
    # decreasing agent-A constants and increasing agent-B constants give a
    # surface that rises with both level indices
    rng = np.random.default_rng(2)
    for _ in range(50):
        alpha, beta = rng.uniform(0.2, 3, 2)
        gamma = -rng.uniform(0, 2)
        ca = np.sort(rng.uniform(0.05, 0.95, 4))[::-1]
        cb = np.sort(rng.uniform(0.05, 0.9, 3))
        vals = np.array([[i2d_surface(alpha, beta, gamma, a, b) for b in cb] for a in ca])
        assert np.all(np.diff(vals, axis=0) >= -1e-12)
        assert np.all(np.diff(vals, axis=1) >= -1e-12)


def test_copula_surface_value():
    assert copula_surface(1, 1, 1, 0.2, 0.1) == pytest.approx(0.26531, abs=5e-6)


def test_copula_margin_limit():
    # one agent absent: the surface collapses to the other margin
    assert copula_surface(1, 1, 1, 1e-12, 0.1) == pytest.approx(0.1, abs=1e-9)
    assert copula_surface(1, 1, 1, 0.2, 1e-12) == pytest.approx(0.2, abs=1e-9)


def test_copula_surface_monotone():
    rng = np.random.default_rng(3)
    for _ in range(60):
        alpha, beta, gamma = rng.uniform(0.1, 3, 3)
        p = np.sort(rng.uniform(0.02, 0.9, 4))
        q = np.sort(rng.uniform(0.02, 0.9, 3))
        vals = np.array([[copula_surface(alpha, beta, gamma, pj, qk) for qk in q] for pj in p])
        assert np.all(np.diff(vals, axis=0) >= -1e-12)
        assert np.all(np.diff(vals, axis=1) >= -1e-12)


def test_copula_gamma_limit_is_independence():
    for p, q in [(0.2, 0.1), (0.5, 0.3), (0.05, 0.6)]:
        for alpha, beta in [(1, 1), (0.7, 1.8)]:
            indep = 1 - (1 - p**alpha) * (1 - q**beta)
            assert abs(copula_surface(alpha, beta, 1e-6, p, q) - indep) < 1e-4


# -- start-up sequences ---------------------------------------------------------


def test_i2d_startup_sequence_five_by_three():
    seq = i2d_startup_sequence(DoseGrid(5, 3))
    assert seq == [
        (1, 1), (2, 1), (3, 1), (4, 1), (5, 1),
        (3, 2),
        (1, 3), (2, 3), (3, 3), (4, 3), (5, 3),
    ]


def test_i2d_startup_sequence_clamps_at_one():
    seq = i2d_startup_sequence(DoseGrid(3, 3))
    assert seq[:4] == [(1, 1), (2, 1), (3, 1), (1, 2)]
    assert seq[4:] == [(1, 3), (2, 3), (3, 3)]


def test_i2d_startup_single_row():
    assert i2d_startup_sequence(DoseGrid(4, 1)) == [(1, 1), (2, 1), (3, 1), (4, 1)]


def test_i2d_startup_interrupted_by_dlt(grid, study):
    design = I2dDesign(grid, study)
    state = make_state(grid, [((1, 1), 1, 0), ((2, 1), 1, 1)], phase="startup")
    assert design.compute_phase(state) == "model"


def test_i2d_cohort_sizes(grid, study):
    design = I2dDesign(grid, study)
    startup = make_state(grid, [((1, 1), 1, 0)], phase="startup")
    assert design.cohort_size(startup) == 1
    model = make_state(grid, [((1, 1), 1, 1)], phase="model")
    assert design.cohort_size(model) == 3


def test_i2d_model_entry_bottom_row(grid, study):
    design = I2dDesign(grid, study)
    # DLT on the second start-up patient: model phase begins on the bottom row
    state = make_state(grid, [((1, 1), 1, 0), ((2, 1), 1, 1)], phase="model")
    decision = design.decide(state, RNG)
    assert decision.reason == "model-entry"
    assert decision.dose[1] == 1


def test_i2d_moves_exclude_diagonal(grid, study):
    design = I2dDesign(grid, study)
    base = [((1, 1), 1, 0), ((2, 1), 1, 1)]
    rng = np.random.default_rng(0)
    state = make_state(grid, base + [((3, 1), 3, 1), ((2, 2), 3, 1)], phase="model")
    decision = design.decide(state, rng)
    a, b = state.current
    assert decision.dose != (a + 1, b + 1) and decision.dose != (a - 1, b - 1)
    allowed = {(a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1), (a + 1, b - 1), (a - 1, b + 1), (a, b)}
    assert decision.dose in allowed


def test_copula_startup_passes(grid, study):
    passes = _startup_passes(grid)
    assert passes[0] == [(1, 1), (1, 2), (1, 3)]
    assert passes[1] == [(2, 1), (3, 1), (4, 1), (5, 1)]
    # no DLTs: walk both passes fully
    log = make_state(grid, [((1, 1), 3, 0)], phase="startup").log
    nxt, over = _pass_progress(log, passes)
    assert nxt == (1, 2) and not over
    # DLT at (1,2): vertical pass ends, horizontal begins
    log = make_state(grid, [((1, 1), 3, 0), ((1, 2), 3, 1)], phase="startup").log
    nxt, over = _pass_progress(log, passes)
    assert nxt == (2, 1) and not over
    # DLT in both passes: start-up over
    log = make_state(grid, [((1, 1), 3, 0), ((1, 2), 3, 1), ((2, 1), 3, 1)], phase="startup").log
    _, over = _pass_progress(log, passes)
    assert over


def test_copula_terminates_at_lowest_dose(grid, study):
    design = CopulaDesign(grid, study)
    state = make_state(
        grid,
        [((1, 1), 3, 3), ((2, 1), 3, 3), ((1, 1), 3, 3)],
        phase="model",
    )
    # heavy toxicity at (1,1): de-escalation demanded at the lowest dose
    decision = design.decide(state, RNG)
    assert decision.is_terminate and decision.reason == "safety-stop"


def test_copula_escalation_requires_higher_estimate(grid, study):
    design = CopulaDesign(grid, study)
    state = make_state(
        grid,
        [((1, 1), 3, 0), ((1, 2), 3, 0), ((1, 3), 3, 0), ((2, 1), 3, 0), ((3, 1), 3, 0),
         ((4, 1), 3, 0), ((5, 1), 3, 0), ((2, 2), 3, 0)],
        phase="model",
    )
    decision = design.decide(state, RNG)
    assert not decision.is_terminate
    weights = design.posterior.weights(state.n, state.y)
    means = design.posterior.means(weights)
    cur = means[1, 1]
    got = means[decision.dose[0] - 1, decision.dose[1] - 1]
    assert decision.dose == (2, 2) or got > cur


def test_copula_select_restricted_to_tried(grid, study):
    design = CopulaDesign(grid, study)
    state = make_state(grid, [((1, 1), 3, 0), ((1, 2), 3, 1)], phase="model")
    res = design.select_mtd(state, RNG)
    assert res.selected in {(1, 1), (1, 2)}
    open_design = CopulaDesign(grid, study, allow_untried_mtd=True)
    res_open = open_design.select_mtd(state, RNG)
    assert res_open.selected in set(grid.doses())


def test_copula_select_single_tried(grid, study):
    design = CopulaDesign(grid, study)
    state = make_state(grid, [((1, 1), 6, 2)], phase="model")
    assert design.select_mtd(state, RNG).selected == (1, 1)


def test_profile_validation():
    with pytest.raises(ValueError):
        MonoProfile((0.2, 0.1), (0.1, 0.2))
    with pytest.raises(ValueError):
        I2dDesign(DoseGrid(5, 3), StudyConfig(), MonoProfile((0.1, 0.2), (0.1, 0.2, 0.3)))
    assert len(DEFAULT_PROFILE.p) == 5 and len(DEFAULT_PROFILE.q) == 3
