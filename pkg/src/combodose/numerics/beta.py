"""Beta-binomial conjugate updates, interval probabilities, and exact binomial CIs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"beta shapes must be positive, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def mass(self) -> float:
        return self.a + self.b


def beta_posterior(prior: BetaParams, y: int, n: int) -> BetaParams:
    """Conjugate update for y DLTs out of n patients."""
    if not 0 <= y <= n:
        raise ValueError(f"need 0 <= y <= n, got y={y}, n={n}")
    return BetaParams(prior.a + y, prior.b + (n - y))


def prob_in_interval(p: BetaParams, lo: float, hi: float) -> float:
    """Posterior probability that the rate lies in (lo, hi)."""
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"degenerate interval ({lo}, {hi})")
    return float(stats.beta.cdf(hi, p.a, p.b) - stats.beta.cdf(lo, p.a, p.b))


def interval_masses(a, b, edges: np.ndarray) -> np.ndarray:
    """Vectorized beta mass of each interval between consecutive edges."""
    cdf = stats.beta.cdf(edges, a, b)
    return np.diff(cdf)


def exact_binomial_ci(y: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson interval for a binomial proportion.

    Boundary conventions: lo = 0 when y = 0 and hi = 1 when y = n.
    """
    if n < 1:
        raise ValueError("need at least one observation")
    if not 0 <= y <= n:
        raise ValueError(f"need 0 <= y <= n, got y={y}, n={n}")
    alpha = 1.0 - level
    lo = 0.0 if y == 0 else float(stats.beta.ppf(alpha / 2, y, n - y + 1))
    hi = 1.0 if y == n else float(stats.beta.ppf(1 - alpha / 2, y + 1, n - y))
    return lo, hi
