"""Prior-guess ("skeleton") vectors for one-parameter CRM working models.

Skeletons are generated by the indifference-interval recursion under the
power model ``p ** exp(a)``: adjacent skeleton values are spaced so that a
single parameter value makes one dose sit at ``phi - half_width`` exactly
when its neighbour sits at ``phi + half_width``.  The entry at
``mtd_position`` equals the target ``phi`` exactly and the vector is
strictly increasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SkeletonSpec:
    half_width: float
    mtd_position: int  # 1-based
    n_levels: int
    phi: float

    def __post_init__(self):
        if not 1 <= self.mtd_position <= self.n_levels:
            raise ValueError(
                f"mtd_position must be in [1, {self.n_levels}], got {self.mtd_position}"
            )
        if not 0.0 < self.half_width < self.phi:
            raise ValueError(
                f"half_width must be in (0, phi={self.phi}), got {self.half_width}"
            )
        if not 0.0 < self.phi < 1.0:
            raise ValueError("phi must be in (0, 1)")


def crm_skeleton(spec: SkeletonSpec) -> list[float]:
    """Skeleton probabilities for ``spec.n_levels`` doses under the power model."""
    phi = spec.phi
    lo = phi - spec.half_width
    hi = phi + spec.half_width
    if hi >= 1.0:
        raise ValueError("phi + half_width must stay below 1")
    vals = [0.0] * spec.n_levels
    pos = spec.mtd_position - 1
    vals[pos] = phi
    for k in range(pos, spec.n_levels - 1):
        # slope that puts dose k exactly at phi - half_width
        power = math.log(lo) / math.log(vals[k])
        vals[k + 1] = math.exp(math.log(hi) / power)
    for k in range(pos, 0, -1):
        power = math.log(hi) / math.log(vals[k])
        vals[k - 1] = math.exp(math.log(lo) / power)
    for i, v in enumerate(vals):
        if not 0.0 < v < 1.0:
            raise ValueError(f"skeleton entry {i + 1} escaped (0, 1): {v}")
        if i and vals[i] <= vals[i - 1]:
            raise ValueError("skeleton failed to be strictly increasing")
    return vals
