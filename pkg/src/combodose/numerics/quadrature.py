"""Low-dimensional grid posteriors via the midpoint rule.

Good enough for the 2- and 3-parameter dose-toxicity surfaces used here;
anything higher-dimensional goes through the random-walk sampler instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class MassUnderflowError(ArithmeticError):
    """All quadrature nodes carried zero mass; widen the bounds."""


@dataclass(frozen=True)
class GridPosterior:
    nodes: np.ndarray  # (n_nodes, dim)
    weights: np.ndarray  # (n_nodes,), sums to 1

    def mean(self) -> np.ndarray:
        return self.weights @ self.nodes

    def expectation(self, values: np.ndarray) -> np.ndarray:
        """E[f] for per-node values of shape (n_nodes, ...)."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def midpoint_nodes(bounds: Sequence[tuple[float, float]], resolution) -> list[np.ndarray]:
    res = np.broadcast_to(np.asarray(resolution, dtype=int), (len(bounds),))
    axes = []
    for (lo, hi), r in zip(bounds, res):
        if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
            raise ValueError(f"bounds must be finite with hi > lo, got ({lo}, {hi})")
        if r < 1:
            raise ValueError("resolution must be at least 1 node per dimension")
        step = (hi - lo) / r
        axes.append(lo + step * (np.arange(r) + 0.5))
    return axes


def grid_posterior(
    loglik: Callable[[np.ndarray], np.ndarray],
    log_prior: Callable[[np.ndarray], np.ndarray] | None,
    bounds: Sequence[tuple[float, float]],
    resolution=61,
) -> GridPosterior:
    """Normalized posterior over a midpoint grid.

    ``loglik`` and ``log_prior`` receive an (n_nodes, dim) array and return
    per-node values; ``log_prior=None`` means uniform over the box.  At most
    three dimensions are supported.
    """
    if len(bounds) > 3:
        raise ValueError("grid_posterior supports at most 3 dimensions")
    axes = midpoint_nodes(bounds, resolution)
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    logw = np.asarray(loglik(nodes), dtype=float)
    if log_prior is not None:
        logw = logw + np.asarray(log_prior(nodes), dtype=float)
    finite = np.isfinite(logw)
    if not finite.any():
        raise MassUnderflowError("posterior mass underflowed everywhere in the box")
    shifted = np.where(finite, logw - logw[finite].max(), -np.inf)
    w = np.exp(shifted)
    total = w.sum()
    if total <= 0:
        raise MassUnderflowError("posterior mass underflowed everywhere in the box")
    return GridPosterior(nodes, w / total)
