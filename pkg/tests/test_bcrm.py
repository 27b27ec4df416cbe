import itertools

import numpy as np
import pytest

from combodose.core import DoseGrid, StudyConfig
from combodose.designs import BcrmDesign
from combodose.designs.bcrm import BcrmConfig, ordering_from_estimates, patient_records
from combodose.designs.orderings import respects_partial_order
from combodose.numerics import BetaParams, pava_2d
from conftest import make_state


@pytest.fixture
def small_study():
    return StudyConfig(phi=0.3, max_n=60, cohort_size=3, reps=1, seed=0)


def test_patient_records_expand_log(grid, small_study):
    state = make_state(grid, [((1, 1), 3, 1), ((2, 1), 3, 0)])
    recs = patient_records(state)
    assert len(recs) == 6
    assert sum(out for _, out in recs) == 1


def test_ordering_from_estimates_tie_break():
    vals = np.full((2, 2), 0.25)
    o = ordering_from_estimates(vals, 1e-4)
    assert o == ((1, 1), (1, 2), (2, 1), (2, 2))  # anti-diagonal sweep on ties


def test_ordering_never_reorders_strict_gaps():
    rng = np.random.default_rng(2)
    for _ in range(40):
        raw = rng.uniform(0, 1, (3, 2))
        iso = pava_2d(raw)
        o = ordering_from_estimates(iso, 1e-4)
        assert respects_partial_order(o)
        # estimates may reorder only inside the 1e-9 quantization bucket
        vals = [iso[a - 1, b - 1] for a, b in o]
        assert all(v2 >= v1 - 1.1e-9 for v1, v2 in zip(vals, vals[1:]))


def test_solver_noise_collapses_to_ties():
    vals = np.full((2, 2), 0.25) + np.array([[3e-13, -4e-13], [1e-13, 0.0]])
    assert ordering_from_estimates(vals, 1e-4) == ((1, 1), (1, 2), (2, 1), (2, 2))


def test_bagging_single_bootstrap_equals_single_fit(grid, small_study):
    design = BcrmDesign(grid, small_study, BcrmConfig(bootstrap=1))
    state = make_state(grid, [((1, 1), 3, 0), ((2, 2), 3, 1)])
    rng = np.random.default_rng(0)
    post = design.bagged_posterior(state, rng)
    assert len(post.ordering_freqs) == 1
    ((ordering, freq),) = post.ordering_freqs.items()
    assert freq == 1.0
    sk = design._skeleton_for(ordering)
    mean, _, _, _ = design.quad.fit(sk, state.n, state.y, 0.3, design.config.eps_neighborhood)
    assert np.allclose(post.mean, mean, atol=1e-12)


def test_one_sided_data_collapses_orderings(grid, small_study):
    # heavy, clean separation: every resample produces the same ordering
    design = BcrmDesign(grid, small_study, BcrmConfig(bootstrap=50))
    state = make_state(grid, [((1, 1), 30, 0), ((5, 3), 30, 30)])
    post = design.bagged_posterior(state, np.random.default_rng(1))
    assert max(post.ordering_freqs.values()) > 0.99


def _exhaustive_reference(design, state):
    """Exact bagging over all ordered resamples of a tiny patient set."""
    recs = patient_records(state)
    n = len(recs)
    codes = np.array([i * 2 + o for i, o in recs])
    freqs = {}
    for combo in itertools.product(range(n), repeat=n):
        picked = np.bincount(codes[list(combo)], minlength=2 * design.grid.size)
        y_b = picked[1::2].reshape(design.grid.n_a, design.grid.n_b)
        n_b = y_b + picked[0::2].reshape(design.grid.n_a, design.grid.n_b)
        means = (1 + y_b) / (2 + n_b)
        iso = pava_2d(means, n_b + 2)
        o = ordering_from_estimates(iso, design.config.jitter_eps)
        freqs[o] = freqs.get(o, 0) + 1
    total = sum(freqs.values())
    mean = np.zeros((design.grid.n_a, design.grid.n_b))
    for o, c in freqs.items():
        sk = design._skeleton_for(o)
        m, _, _, _ = design.quad.fit(sk, state.n, state.y, 0.3, design.config.eps_neighborhood)
        mean += (c / total) * m
    return mean


def test_bagged_estimates_match_exhaustive_reference():
    grid = DoseGrid(2, 2)
    study = StudyConfig(phi=0.3, max_n=8, cohort_size=2, reps=1, seed=0)
    design = BcrmDesign(grid, study, BcrmConfig(bootstrap=200), mtd_position=3)
    state = make_state(grid, [((1, 1), 2, 0), ((2, 1), 2, 1)])
    exact = _exhaustive_reference(design, state)
    m1 = design.bagged_posterior(state, np.random.default_rng(10)).mean
    m2 = design.bagged_posterior(state, np.random.default_rng(77)).mean
    assert np.max(np.abs(m1 - m2)) < 0.02
    assert np.max(np.abs(m1 - exact)) < 0.02
    assert np.max(np.abs(m2 - exact)) < 0.02


def test_decide_cutoffs(grid, small_study):
    design = BcrmDesign(grid, small_study, BcrmConfig(bootstrap=80))
    rng = np.random.default_rng(0)
    # clean data at the current dose: escalation
    state = make_state(grid, [((1, 1), 3, 1), ((2, 1), 6, 0)])
    d = design.decide(state, rng)
    assert d.reason in ("escalate", "stay")
    # de-escalation demanded at (1,1) terminates
    state = make_state(grid, [((1, 1), 6, 6)])
    d = design.decide(state, rng)
    assert d.is_terminate and d.reason == "safety-stop"


def test_startup_is_diagonal(grid, small_study):
    design = BcrmDesign(grid, small_study)
    rng = np.random.default_rng(0)
    assert design.decide(design.fresh_state(), rng).dose == (1, 1)
    state = make_state(grid, [((1, 1), 3, 0)], phase="startup")
    assert design.decide(state, rng).dose == (2, 2)
    state = make_state(grid, [((1, 1), 3, 0), ((2, 2), 3, 0), ((3, 3), 3, 0)], phase="startup")
    assert design.decide(state, rng).dose == (4, 3)


def test_select_mtd_window_mass(grid, small_study):
    design = BcrmDesign(grid, small_study, BcrmConfig(bootstrap=60))
    state = make_state(grid, [((1, 1), 3, 0), ((2, 2), 6, 2), ((3, 2), 3, 2)])
    rng = np.random.default_rng(3)
    res = design.select_mtd(state, rng)
    post = design.bagged_posterior(state, np.random.default_rng(3))
    tried = state.tried_doses()
    best = max(tried, key=lambda d: (round(float(post.window[d[0] - 1, d[1] - 1]), 12), d[0] + d[1], d[0]))
    assert res.selected == best
    # untried doses never selected
    assert res.selected in tried
