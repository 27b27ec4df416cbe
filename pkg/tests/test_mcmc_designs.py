import math

import numpy as np
import pytest
from scipy.special import betaln, expit, logit

from combodose.core import DoseGrid, StudyConfig
from combodose.designs import DfcombDesign, GcrmDesign, HierarchyDesign
from combodose.designs._mcmc import (
    SamplerSettings,
    dfcomb_chain,
    dfcomb_logpost,
    gcrm_chain,
    gcrm_logpost,
    hierarchy_chain,
    hierarchy_logpost,
    run_design_chain,
)
from combodose.numerics import grid_posterior
from combodose.numerics.sampler import chain_noise, run_chain
from conftest import make_state

RNG = np.random.default_rng(0)
GUESSES = {"guess_row": [0.1, 0.2, 0.25, 0.3, 0.35], "guess_col": [0.1, 0.3, 0.35]}


def _hierarchy(grid, study, **kw):
    return HierarchyDesign(grid, study, GUESSES["guess_row"], GUESSES["guess_col"], **kw)


def _gcrm(grid, study, **kw):
    return GcrmDesign(grid, study, GUESSES["guess_row"], GUESSES["guess_col"], **kw)


# -- jitted kernels replicate the generic sampler exactly ------------------------


def test_hierarchy_kernel_matches_generic_chain(grid, study):
    design = _hierarchy(grid, study)
    state = make_state(grid, [((1, 1), 3, 0), ((2, 2), 3, 1)])
    y = state.y.astype(float)
    n = state.n.astype(float)
    args = (y, n, design.a_eff, design.b_eff, design.mu, design.omega, design.sigma2)
    init = np.concatenate([design.mu, design.omega])
    increments, log_u = chain_noise(400, 6, design.sampler.scales, seed=99)
    jitted, acc_j = hierarchy_chain(init, increments, log_u, *args)
    generic, acc_g = run_chain(lambda th: hierarchy_logpost(th, *args), init, increments, log_u)
    assert acc_j == acc_g
    assert np.array_equal(jitted, generic)


def test_dfcomb_kernel_matches_generic_chain(grid, study):
    design = DfcombDesign(grid, study)
    state = make_state(grid, [((1, 1), 3, 0), ((2, 2), 6, 2)])
    args = (state.y.astype(float), state.n.astype(float), design.a_eff, design.b_eff)
    init = np.array([0.0, 1.0, 1.0, 0.0])
    increments, log_u = chain_noise(400, 4, design.sampler.scales, seed=7)
    jitted, acc_j = dfcomb_chain(init, increments, log_u, *args)
    generic, acc_g = run_chain(lambda b: dfcomb_logpost(b, *args), init, increments, log_u)
    assert acc_j == acc_g
    assert np.array_equal(jitted, generic)


def test_gcrm_kernel_matches_generic_chain(grid, study):
    design = _gcrm(grid, study)
    state = make_state(grid, [((1, 1), 1, 0), ((2, 1), 1, 1)])
    args = (
        state.y.astype(float), state.n.astype(float), design.a_eff, design.delta,
        design.mu_alpha, design.s2_alpha, design.g_shape, design.g_rate,
    )
    alphas = [design.mu_alpha]
    for d in design.delta:
        alphas.append(alphas[-1] + d)
    init = np.array(alphas + [1.0])
    increments, log_u = chain_noise(400, 4, design.sampler.scales, seed=3)
    jitted, acc_j = gcrm_chain(init, increments, log_u, *args)
    generic, acc_g = run_chain(lambda p: gcrm_logpost(p, *args), init, increments, log_u)
    assert acc_j == acc_g
    assert np.array_equal(jitted, generic)


# -- hierarchy ---------------------------------------------------------------------


def test_hierarchy_effective_dose_constants(grid, study):
    design = HierarchyDesign(grid, study, [0.05, 0.1, 0.2, 0.3, 0.4], [0.05, 0.15, 0.3], k_const=3.0)
    assert design.mu[0] == pytest.approx(math.log(0.15), abs=1e-12)  # log(3 * 0.05)
    assert design.mu[0] == pytest.approx(-1.8971, abs=1e-4)
    assert design.omega[0] == pytest.approx(math.log(2.85), abs=1e-12)
    assert design.omega[0] == pytest.approx(1.0473, abs=1e-4)
    assert design.a_eff[0] == 0.0 and design.b_eff[0] == 0.0
    spread = 2 * math.sqrt(10.0)
    expect = (logit(0.1) - logit(0.05)) / (2 * spread)
    assert design.a_eff[1] == pytest.approx(expect, abs=1e-12)


def test_hierarchy_marginal_matches_monte_carlo():
    # single-cell marginal likelihood against 1e6-draw integration over pi
    grid1 = DoseGrid(1, 1)
    study = StudyConfig(phi=0.3, max_n=6, cohort_size=3, reps=1, seed=0)
    design = HierarchyDesign(grid1, study, [0.1], [0.1])
    y, n = 2, 6
    state = make_state(grid1, [((1, 1), n, y)])
    alpha, beta = 2.0, 3.0
    theta = np.array([math.log(alpha), 0.0, 0.0, math.log(beta), 0.0, 0.0])
    lp = hierarchy_logpost(
        theta, state.y.astype(float), state.n.astype(float),
        design.a_eff, design.b_eff, design.mu, design.omega, design.sigma2,
    )
    prior = -0.5 * ((theta[:3] - design.mu) ** 2).sum() / design.sigma2
    prior += -0.5 * ((theta[3:] - design.omega) ** 2).sum() / design.sigma2
    marginal = math.exp(lp - prior)  # without the binomial coefficient
    draws = np.random.default_rng(5).beta(alpha, beta, 1_000_000)
    mc = float(np.mean(draws**y * (1 - draws) ** (n - y)))
    assert marginal == pytest.approx(mc, abs=1e-3)
    exact = math.exp(betaln(alpha + y, beta + n - y) - betaln(alpha, beta))
    assert marginal == pytest.approx(exact, abs=1e-12)


def test_hierarchy_zero_data_matches_prior_predictive(grid, study):
    design = _hierarchy(grid, study)
    means = design.posterior_means(design.fresh_state(), np.random.default_rng(0))
    rng = np.random.default_rng(1)
    s2 = design.sigma2
    th = design.mu + rng.standard_normal((200_000, 3)) * math.sqrt(s2)
    ph = design.omega + rng.standard_normal((200_000, 3)) * math.sqrt(s2)
    for dose in [(1, 1), (3, 2), (5, 3)]:
        a_e, b_e = design.a_eff[dose[0] - 1], design.b_eff[dose[1] - 1]
        al = np.exp(np.clip(th[:, 0] + th[:, 1] * a_e + th[:, 2] * b_e, None, 60))
        be = np.exp(np.clip(ph[:, 0] + ph[:, 1] * a_e + ph[:, 2] * b_e, None, 60))
        expect = float(np.mean(al / (al + be)))
        assert means[dose[0] - 1, dose[1] - 1] == pytest.approx(expect, abs=0.02)


def test_hierarchy_pooled_ci_terminates(grid, study):
    design = _hierarchy(grid, study)
    state = make_state(grid, [((1, 1), 6, 6), ((2, 2), 6, 6)])
    decision = design.decide(state, np.random.default_rng(0))
    assert decision.is_terminate and decision.reason == "safety-stop"
    lo, _ = __import__("combodose.numerics", fromlist=["exact_binomial_ci"]).exact_binomial_ci(12, 12)
    assert lo > 0.3


def test_hierarchy_zero_data_starts_low(grid, study):
    design = _hierarchy(grid, study)
    assert design.decide(design.fresh_state(), np.random.default_rng(0)).dose == (1, 1)


def test_hierarchy_diagonal_move_permitted(grid, study):
    design = _hierarchy(grid, study)
    state = make_state(grid, [((1, 1), 3, 0)])
    decision = design.decide(state, np.random.default_rng(0))
    a, b = decision.dose
    assert abs(a - 1) <= 1 and abs(b - 1) <= 1
    assert decision.dose == (2, 2)  # highest admissible estimate below target


# -- dfcomb ---------------------------------------------------------------------


def test_dfcomb_effective_doses_and_surface_point(grid, study):
    design = DfcombDesign(grid, study)
    assert design.a_eff[0] == pytest.approx(logit(0.1), abs=1e-12)
    assert design.b_eff[1] == pytest.approx(logit(0.3), abs=1e-12)
    # beta = (0, 1, 1, 0) at p=0.2, q=0.1: eta = logit(0.2) + logit(0.1) = -log(36)
    eta = logit(0.2) + logit(0.1)
    assert eta == pytest.approx(-3.5835189, abs=1e-6)
    assert expit(eta) == pytest.approx(1 / 37, abs=1e-12)
    assert expit(eta) == pytest.approx(0.027027, abs=5e-7)


def test_dfcomb_flat_coefficients_give_half():
    assert expit(0.0) == 0.5  # beta = 0 everywhere: every dose at 0.5


def test_dfcomb_monotonicity_constraints_rejected():
    y = np.zeros((2, 2))
    n = np.zeros((2, 2))
    a_eff = np.array([-2.0, -1.0])
    b_eff = np.array([-2.0, -1.0])
    assert dfcomb_logpost(np.array([0.0, -0.5, 1.0, 0.0]), y, n, a_eff, b_eff) == -np.inf
    # b1 + b3 * b_eff <= 0 for b_eff = -2
    assert dfcomb_logpost(np.array([0.0, 1.0, 1.0, 0.6]), y, n, a_eff, b_eff) == -np.inf
    assert np.isfinite(dfcomb_logpost(np.array([0.0, 1.0, 1.0, 0.0]), y, n, a_eff, b_eff))


def test_dfcomb_posterior_matches_quadrature_submodel(grid, study):
    # pin the interaction at zero on both routes and compare posterior means
    design = DfcombDesign(
        grid, study,
        sampler=SamplerSettings(burnin=4_000, keep=30_000, scales=(0.5, 0.4, 0.4, 0.0)),
    )
    state = make_state(grid, [((1, 1), 3, 0), ((2, 2), 6, 1), ((3, 3), 6, 3)])
    summary = design.summary(state, np.random.default_rng(8))

    a_eff, b_eff = design.a_eff, design.b_eff

    def loglik(nodes):
        out = np.zeros(len(nodes))
        for (j, k) in [(0, 0), (1, 1), (2, 2)]:
            eta = nodes[:, 0] + nodes[:, 1] * a_eff[j] + nodes[:, 2] * b_eff[k]
            njk = state.n[j, k]
            yjk = state.y[j, k]
            out += yjk * eta - njk * np.logaddexp(0.0, eta)
        return out

    def log_prior(nodes):
        lp = -0.5 * nodes[:, 0] ** 2
        lp = np.where((nodes[:, 1] > 0) & (nodes[:, 2] > 0), lp - nodes[:, 1] - nodes[:, 2], -np.inf)
        return lp

    post = grid_posterior(loglik, log_prior, [(-6, 6), (1e-9, 6), (1e-9, 6)], 81)
    for (j, k) in [(0, 0), (1, 1), (2, 2), (4, 2)]:
        eta_nodes = post.nodes[:, 0] + post.nodes[:, 1] * a_eff[j] + post.nodes[:, 2] * b_eff[k]
        expect = float(post.expectation(expit(eta_nodes)))
        assert summary.mean[j, k] == pytest.approx(expect, abs=0.01)


def test_dfcomb_startup_and_selection(grid, study):
    design = DfcombDesign(grid, study)
    assert design.startup_seq == [(1, 1), (2, 2), (3, 3), (4, 3), (5, 3)]
    state = make_state(grid, [((1, 1), 3, 0), ((2, 2), 3, 2), ((1, 2), 3, 1)])
    res = design.select_mtd(state, np.random.default_rng(0))
    assert res.selected in state.tried_doses()


# -- gcrm -----------------------------------------------------------------------


def test_gcrm_effective_doses(grid, study):
    design = GcrmDesign(grid, study, [0.05, 0.1, 0.2, 0.3, 0.4], [0.05, 0.15, 0.3])
    assert design.a_eff[0] == pytest.approx(logit(0.05) + 8.0, abs=1e-9)
    assert design.a_eff[0] == pytest.approx(5.0556, abs=1e-4)
    assert design.delta[0] == pytest.approx(logit(0.15) - logit(0.05), abs=1e-12)


def test_gcrm_surface_monotone_in_samples(grid, study):
    design = _gcrm(grid, study)
    state = make_state(grid, [((1, 1), 1, 0), ((2, 1), 1, 0), ((2, 2), 1, 1)])
    samples = design.posterior_samples(state, np.random.default_rng(4))
    pi = design._pi_samples(samples)
    assert np.all(np.diff(pi, axis=1) >= -1e-12)  # within-sample monotone in agent A
    assert np.all(np.diff(pi, axis=2) >= -1e-12)  # and in agent B


def test_gcrm_first_patient_and_stop(grid, study):
    design = _gcrm(grid, study)
    assert design.cohort_size(design.fresh_state()) == 1
    assert design.decide(design.fresh_state(), np.random.default_rng(0)).dose == (1, 1)
    toxic = make_state(grid, [((1, 1), 8, 8)])
    decision = design.decide(toxic, np.random.default_rng(0))
    assert decision.is_terminate and decision.reason == "safety-stop"


def test_gcrm_tail_matches_quadrature_submodel():
    # single agent-B level: the model is exactly (alpha_1, beta)
    grid1 = DoseGrid(3, 1)
    study = StudyConfig(phi=0.3, max_n=30, cohort_size=1, reps=1, seed=0)
    design = GcrmDesign(
        grid1, study, [0.05, 0.15, 0.3], [0.05],
        sampler=SamplerSettings(burnin=4_000, keep=40_000, scales=(0.25, 0.25)),
    )
    state = make_state(grid1, [((1, 1), 4, 1), ((2, 1), 4, 2)])
    pi = design._pi_samples(design.posterior_samples(state, np.random.default_rng(2)))
    p_above = float((pi[:, 0, 0] > 0.3).mean())

    a_eff = design.a_eff

    def loglik(nodes):
        out = np.zeros(len(nodes))
        for j in range(3):
            if state.n[j, 0] == 0:
                continue
            eta = nodes[:, 0] + nodes[:, 1] * a_eff[j]
            out += state.y[j, 0] * eta - state.n[j, 0] * np.logaddexp(0.0, eta)
        return out

    def log_prior(nodes):
        lp = -0.5 * (nodes[:, 0] - design.mu_alpha) ** 2 / design.s2_alpha
        lp += (design.g_shape - 1) * np.log(nodes[:, 1]) - design.g_rate * nodes[:, 1]
        return lp

    post = grid_posterior(loglik, log_prior, [(-14, -2), (1e-9, 8)], 161)
    eta11 = post.nodes[:, 0] + post.nodes[:, 1] * a_eff[0]
    expect = float(post.weights[expit(eta11) > 0.3].sum())
    assert p_above == pytest.approx(expect, abs=0.02)


def test_gcrm_diagonal_move_permitted(grid, study):
    design = _gcrm(grid, study)
    state = make_state(grid, [((1, 1), 1, 0)])
    decision = design.decide(state, np.random.default_rng(6))
    a, b = decision.dose
    assert abs(a - 1) <= 1 and abs(b - 1) <= 1


def test_dfcomb_surface_monotone_under_constraints():
    # random coefficient draws satisfying the monotonicity constraints give
    # surfaces that rise with both agents
    rng = np.random.default_rng(12)
    a_eff = np.array([math.log(p / (1 - p)) for p in (0.1, 0.2, 0.25, 0.3, 0.35)])
    b_eff = np.array([math.log(q / (1 - q)) for q in (0.1, 0.3, 0.35)])
    kept = 0
    while kept < 40:
        b0 = rng.normal()
        b1, b2 = rng.exponential(size=2)
        b3 = rng.normal()
        if b1 <= 0 or b2 <= 0:
            continue
        if np.any(b1 + b3 * b_eff <= 0) or np.any(b2 + b3 * a_eff <= 0):
            continue
        kept += 1
        eta = b0 + b1 * a_eff[:, None] + b2 * b_eff[None, :] + b3 * a_eff[:, None] * b_eff[None, :]
        pi = 1 / (1 + np.exp(-eta))
        assert np.all(np.diff(pi, axis=0) >= -1e-12)
        assert np.all(np.diff(pi, axis=1) >= -1e-12)


def test_gcrm_effective_dose_identity(grid, study):
    # at the prior means the model reproduces the row-one prior guesses
    guesses = [0.05, 0.1, 0.2, 0.3, 0.4]
    design = GcrmDesign(grid, study, guesses, [0.05, 0.15, 0.3])
    back = expit(design.mu_alpha + design.mu_beta * design.a_eff)
    assert np.allclose(back, guesses, atol=1e-12)
