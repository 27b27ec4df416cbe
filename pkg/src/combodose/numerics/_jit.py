"""Optional numba acceleration.

Every jitted kernel in this package is plain numpy/scalar code that runs
unchanged without numba; the decorator is a no-op when numba is missing.
"""

from __future__ import annotations

try:
    from numba import njit

    HAVE_NUMBA = True

    def maybe_njit(func):
        return njit(cache=True)(func)

except ImportError:  # pragma: no cover - exercised only on numba-free installs

    HAVE_NUMBA = False

    def maybe_njit(func):
        return func
