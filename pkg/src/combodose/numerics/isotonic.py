"""Weighted isotonic regression in one and two dimensions.

``pava_2d`` projects a matrix onto the cone of matrices that are
non-decreasing along every row and every column, in the weighted
least-squares sense.  Alternating row/column PAVA alone converges to a
feasible point that is not in general the projection, so we run Dykstra's
scheme: each sweep projects the current iterate *plus a carried correction*
onto the row-monotone cone, then onto the column-monotone cone, updating the
corrections after each projection.  For intersections of closed convex cones
this converges to the exact weighted projection.
"""

from __future__ import annotations

import numpy as np

from ._jit import maybe_njit


@maybe_njit
def _pava_1d(y, w, out):
    """Weighted PAVA for a non-decreasing fit; fills ``out`` in place."""
    n = y.shape[0]
    level_val = np.empty(n)
    level_w = np.empty(n)
    level_len = np.empty(n, dtype=np.int64)
    top = -1
    for i in range(n):
        top += 1
        level_val[top] = y[i]
        level_w[top] = w[i]
        level_len[top] = 1
        while top > 0 and level_val[top - 1] > level_val[top]:
            tot = level_w[top - 1] + level_w[top]
            level_val[top - 1] = (
                level_w[top - 1] * level_val[top - 1] + level_w[top] * level_val[top]
            ) / tot
            level_w[top - 1] = tot
            level_len[top - 1] += level_len[top]
            top -= 1
    pos = 0
    for blk in range(top + 1):
        for _ in range(level_len[blk]):
            out[pos] = level_val[blk]
            pos += 1


@maybe_njit
def _dykstra_2d(values, weights, tol, max_sweeps):
    rows, cols = values.shape
    x = values.copy()
    inc_r = np.zeros((rows, cols))
    inc_c = np.zeros((rows, cols))
    buf = np.empty(max(rows, cols))
    for _ in range(max_sweeps):
        prev = x.copy()
        # project (x + row corrections) onto row-monotone cone
        z = x + inc_r
        for i in range(rows):
            _pava_1d(z[i], weights[i], buf[:cols])
            for j in range(cols):
                x[i, j] = buf[j]
        inc_r = z - x
        # project (x + column corrections) onto column-monotone cone
        z = x + inc_c
        for j in range(cols):
            col = np.empty(rows)
            wcol = np.empty(rows)
            for i in range(rows):
                col[i] = z[i, j]
                wcol[i] = weights[i, j]
            _pava_1d(col, wcol, buf[:rows])
            for i in range(rows):
                x[i, j] = buf[i]
        inc_c = z - x
        delta = 0.0
        for i in range(rows):
            for j in range(cols):
                d = abs(x[i, j] - prev[i, j])
                if d > delta:
                    delta = d
        if delta < tol:
            break
    return x


def pava_1d(values, weights=None) -> np.ndarray:
    """Weighted least-squares non-decreasing fit of a vector."""
    y = np.asarray(values, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if y.shape != w.shape:
        raise ValueError("values and weights must have matching shapes")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    out = np.empty_like(y)
    _pava_1d(y, w, out)
    return out


def pava_2d(values, weights=None, tol: float = 1e-12, max_sweeps: int = 10000) -> np.ndarray:
    """Project a matrix onto the row- and column-monotone cone.

    Returns the weighted least-squares projection; ``weights`` defaults to
    all ones and must be strictly positive.
    """
    y = np.asarray(values, dtype=float)
    if y.ndim != 2:
        raise ValueError("pava_2d expects a matrix")
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if y.shape != w.shape:
        raise ValueError("values and weights must have matching shapes")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    if 1 in y.shape:
        flat = pava_1d(y.ravel(), w.ravel())
        return flat.reshape(y.shape)
    return _dykstra_2d(np.ascontiguousarray(y), np.ascontiguousarray(w), tol, max_sweeps)
