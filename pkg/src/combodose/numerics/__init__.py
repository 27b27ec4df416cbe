"""Shared statistical machinery: conjugate beta updates, isotonic regression,
grid quadrature, random-walk Metropolis, CRM skeletons, exact binomial CIs."""

from .beta import BetaParams, beta_posterior, exact_binomial_ci, interval_masses, prob_in_interval
from .isotonic import pava_1d, pava_2d
from .quadrature import GridPosterior, MassUnderflowError, grid_posterior
from .sampler import ChainResult, chain_noise, run_chain, rw_sampler
from .skeleton import SkeletonSpec, crm_skeleton

__all__ = [
    "BetaParams",
    "beta_posterior",
    "exact_binomial_ci",
    "interval_masses",
    "prob_in_interval",
    "pava_1d",
    "pava_2d",
    "GridPosterior",
    "MassUnderflowError",
    "grid_posterior",
    "ChainResult",
    "chain_noise",
    "run_chain",
    "rw_sampler",
    "SkeletonSpec",
    "crm_skeleton",
]
