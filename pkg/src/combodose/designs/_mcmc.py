"""Specialized random-walk Metropolis kernels for the sampled designs.

Each kernel inlines its design's log-posterior inside the chain loop so
numba can compile the whole walk; the loop structure and accept rule are
identical to ``numerics.sampler.run_chain``, consuming the same
pre-generated noise arrays, so the jitted and generic paths produce
bit-identical chains for the same seed (tested).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..numerics._jit import maybe_njit
from ..numerics.sampler import chain_noise

_EXP_CAP = 60.0  # reject hyper-parameter proposals with exp() this large


@dataclass(frozen=True)
class SamplerSettings:
    burnin: int = 2000
    keep: int = 8000
    scales: tuple[float, ...] = (0.5,)

    @property
    def steps(self) -> int:
        return self.burnin + self.keep


def run_design_chain(kernel, init, settings: SamplerSettings, seed, *args):
    """Drive a jitted kernel with seeded noise; returns kept samples and the
    acceptance rate."""
    init = np.asarray(init, dtype=float)
    increments, log_u = chain_noise(settings.steps, init.shape[0], settings.scales, seed)
    chain, accepted = kernel(init, increments, log_u, *args)
    return chain[settings.burnin :], accepted / settings.steps


@maybe_njit
def hierarchy_logpost(theta, y, n, a_eff, b_eff, mu, omega, sigma2):
    """Beta-binomial marginal likelihood with log-linear beta shapes and
    independent normal priors on the six coefficients."""
    lp = 0.0
    for i in range(3):
        lp -= 0.5 * (theta[i] - mu[i]) ** 2 / sigma2
        lp -= 0.5 * (theta[3 + i] - omega[i]) ** 2 / sigma2
    for j in range(y.shape[0]):
        for k in range(y.shape[1]):
            la = theta[0] + theta[1] * a_eff[j] + theta[2] * b_eff[k]
            lb = theta[3] + theta[4] * a_eff[j] + theta[5] * b_eff[k]
            if la > _EXP_CAP or lb > _EXP_CAP:
                return -np.inf
            al = math.exp(la)
            be = math.exp(lb)
            if n[j, k] > 0:
                lp += (
                    math.lgamma(al + y[j, k])
                    + math.lgamma(be + n[j, k] - y[j, k])
                    - math.lgamma(al + be + n[j, k])
                    - math.lgamma(al)
                    - math.lgamma(be)
                    + math.lgamma(al + be)
                )
    return lp


@maybe_njit
def hierarchy_chain(init, increments, log_u, y, n, a_eff, b_eff, mu, omega, sigma2):
    dim = init.shape[0]
    steps = increments.shape[0]
    x = init.copy()
    lp = hierarchy_logpost(x, y, n, a_eff, b_eff, mu, omega, sigma2)
    out = np.empty((steps, dim))
    accepted = 0
    for i in range(steps):
        prop = x + increments[i]
        lp_prop = hierarchy_logpost(prop, y, n, a_eff, b_eff, mu, omega, sigma2)
        if lp_prop - lp > log_u[i]:
            x = prop
            lp = lp_prop
            accepted += 1
        out[i] = x
    return out, accepted


@maybe_njit
def _softplus(eta):
    if eta > 30.0:
        return eta
    if eta < -30.0:
        return math.exp(eta)
    return math.log1p(math.exp(eta))


@maybe_njit
def dfcomb_logpost(beta, y, n, a_eff, b_eff):
    """Logistic surface with interaction; N(0,1) priors on intercept and
    interaction, unit-mean exponential priors on the slopes, and zero mass
    wherever the monotonicity constraints fail."""
    b0, b1, b2, b3 = beta[0], beta[1], beta[2], beta[3]
    if b1 <= 0.0 or b2 <= 0.0:
        return -np.inf
    for k in range(b_eff.shape[0]):
        if b1 + b3 * b_eff[k] <= 0.0:
            return -np.inf
    for j in range(a_eff.shape[0]):
        if b2 + b3 * a_eff[j] <= 0.0:
            return -np.inf
    lp = -0.5 * b0 * b0 - 0.5 * b3 * b3 - b1 - b2
    for j in range(y.shape[0]):
        for k in range(y.shape[1]):
            if n[j, k] > 0:
                eta = b0 + b1 * a_eff[j] + b2 * b_eff[k] + b3 * a_eff[j] * b_eff[k]
                lp += y[j, k] * eta - n[j, k] * _softplus(eta)
    return lp


@maybe_njit
def dfcomb_chain(init, increments, log_u, y, n, a_eff, b_eff):
    dim = init.shape[0]
    steps = increments.shape[0]
    x = init.copy()
    lp = dfcomb_logpost(x, y, n, a_eff, b_eff)
    out = np.empty((steps, dim))
    accepted = 0
    for i in range(steps):
        prop = x + increments[i]
        lp_prop = dfcomb_logpost(prop, y, n, a_eff, b_eff)
        if lp_prop - lp > log_u[i]:
            x = prop
            lp = lp_prop
            accepted += 1
        out[i] = x
    return out, accepted


@maybe_njit
def gcrm_logpost(params, y, n, a_eff, delta, mu_alpha, s2_alpha, g_shape, g_rate):
    """Proportional-odds logistic surface: per-row intercepts with normally
    distributed increments (kept non-decreasing) and a gamma slope."""
    n_b = y.shape[1]
    beta = params[n_b]
    if beta <= 0.0:
        return -np.inf
    for k in range(1, n_b):
        if params[k] < params[k - 1]:
            return -np.inf
    lp = -0.5 * (params[0] - mu_alpha) ** 2 / s2_alpha
    for k in range(1, n_b):
        inc = params[k] - params[k - 1]
        lp -= 0.25 * (inc - delta[k - 1]) ** 2 / s2_alpha  # variance 2 * s2_alpha
    lp += (g_shape - 1.0) * math.log(beta) - g_rate * beta
    for j in range(y.shape[0]):
        for k in range(n_b):
            if n[j, k] > 0:
                eta = params[k] + beta * a_eff[j]
                lp += y[j, k] * eta - n[j, k] * _softplus(eta)
    return lp


@maybe_njit
def gcrm_chain(init, increments, log_u, y, n, a_eff, delta, mu_alpha, s2_alpha, g_shape, g_rate):
    dim = init.shape[0]
    steps = increments.shape[0]
    x = init.copy()
    lp = gcrm_logpost(x, y, n, a_eff, delta, mu_alpha, s2_alpha, g_shape, g_rate)
    out = np.empty((steps, dim))
    accepted = 0
    for i in range(steps):
        prop = x + increments[i]
        lp_prop = gcrm_logpost(prop, y, n, a_eff, delta, mu_alpha, s2_alpha, g_shape, g_rate)
        if lp_prop - lp > log_u[i]:
            x = prop
            lp = lp_prop
            accepted += 1
        out[i] = x
    return out, accepted
