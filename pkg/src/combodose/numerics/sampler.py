"""Gaussian random-walk Metropolis sampler.

The proposal noise and acceptance thresholds are pre-generated from a seeded
numpy Generator and passed through the chain loop as arrays.  That keeps the
chain bit-reproducible for a given seed, independent of whether the loop runs
through numba or plain Python, and lets design modules ship specialized
jitted chains that are exactly equivalent to the generic one (the design's
kernel consumes the same arrays in the same order).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class ChainResult:
    samples: np.ndarray  # (steps - burnin, dim), post burn-in draws
    acceptance_rate: float


def chain_noise(steps: int, dim: int, step_scales, seed) -> tuple[np.ndarray, np.ndarray]:
    """Pre-generate proposal increments and log-uniform acceptance draws."""
    rng = np.random.default_rng(seed)
    scales = np.broadcast_to(np.asarray(step_scales, dtype=float), (dim,))
    increments = rng.standard_normal((steps, dim)) * scales
    log_u = np.log(rng.random(steps))
    return increments, log_u


def run_chain(
    logpost: Callable[[np.ndarray], float],
    init: np.ndarray,
    increments: np.ndarray,
    log_u: np.ndarray,
) -> tuple[np.ndarray, int]:
    """Reference (pure Python) Metropolis loop over pre-generated noise."""
    x = np.array(init, dtype=float)
    lp = float(logpost(x))
    steps = increments.shape[0]
    out = np.empty((steps, x.shape[0]))
    accepted = 0
    for i in range(steps):
        prop = x + increments[i]
        lp_prop = float(logpost(prop))
        if lp_prop - lp > log_u[i]:
            x = prop
            lp = lp_prop
            accepted += 1
        out[i] = x
    return out, accepted


def rw_sampler(
    logpost: Callable[[np.ndarray], float],
    init: Sequence[float],
    steps: int,
    burnin: int,
    step_scales,
    seed,
) -> ChainResult:
    """Run a random-walk Metropolis chain and return post-burn-in samples.

    ``steps`` counts all iterations including burn-in; ``steps > burnin`` is
    required.  The log-posterior must be finite at ``init``.
    """
    init = np.asarray(init, dtype=float)
    if steps <= burnin:
        raise ValueError(f"need steps > burnin, got steps={steps}, burnin={burnin}")
    lp0 = float(logpost(init))
    if not np.isfinite(lp0):
        raise ValueError("log-posterior is not finite at the initial point")
    increments, log_u = chain_noise(steps, init.shape[0], step_scales, seed)
    out, accepted = run_chain(logpost, init, increments, log_u)
    return ChainResult(out[burnin:], accepted / steps)
