"""Posterior machinery for designs whose toxicity surface is evaluated on a
fixed quadrature grid (I2D, Copula).

The surface tensor over all (node, dose) pairs is computed once per design
instance; each decision then costs two tensor contractions.
"""

from __future__ import annotations

import numpy as np


class SurfacePosterior:
    def __init__(self, pi_tensor: np.ndarray):
        # pi_tensor: (n_nodes, n_a, n_b), strictly inside (0, 1)
        self.pi = pi_tensor
        self.log_pi = np.log(pi_tensor)
        self.log_1m_pi = np.log1p(-pi_tensor)

    def weights(self, n: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Normalized posterior node weights under a binomial likelihood and
        a uniform prior over the node box."""
        logw = np.tensordot(self.log_pi, y, axes=([1, 2], [0, 1])) + np.tensordot(
            self.log_1m_pi, n - y, axes=([1, 2], [0, 1])
        )
        w = np.exp(logw - logw.max())
        return w / w.sum()

    def means(self, weights: np.ndarray) -> np.ndarray:
        return np.tensordot(weights, self.pi, axes=(0, 0))

    def tail_probs(self, weights: np.ndarray, dose, phi: float) -> tuple[float, float]:
        """(P(pi < phi), P(pi > phi)) at one dose."""
        col = self.pi[:, dose[0] - 1, dose[1] - 1]
        return float(weights[col < phi].sum()), float(weights[col > phi].sum())
