"""Hot numeric kernels: complex128 trajectory and residual evaluation.

The Newton solver evaluates thousands of short cluster trajectories while
hunting for periodic seeds, so the closed-form braiding maps are compiled
with numba when available.  Setting the environment variable
``BRAIDVOL_DISABLE_NUMBA=1`` (or a missing numba install) selects the pure
numpy fallback -- the exact same source, just not jitted.  See
``benchmarks/bench_kernels.py`` for a comparison of the two paths.

Degeneracies are not raised here: a vanishing denominator produces inf/nan
entries, which callers detect with ``np.isfinite``.  The field-generic (and
error-raising) implementations live in :mod:`braidvol.braid`.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["USING_NUMBA", "trajectory_arrays", "residual_arrays", "letters_to_arrays"]


def _trajectory_impl(x0, gens, signs):
    """Seeds (m+1, N) and window centers (m,) for letters (gens[j], signs[j])."""
    m = gens.shape[0]
    N = x0.shape[0]
    xs = np.empty((m + 1, N), dtype=np.complex128)
    centers = np.empty(m, dtype=np.complex128)
    xs[0, :] = x0
    for j in range(m):
        lo = 3 * gens[j] - 3
        for k in range(N):
            xs[j + 1, k] = xs[j, k]
        x1 = xs[j, lo]
        x2 = xs[j, lo + 1]
        x3 = xs[j, lo + 2]
        x4 = xs[j, lo + 3]
        x5 = xs[j, lo + 4]
        x6 = xs[j, lo + 5]
        x7 = xs[j, lo + 6]
        centers[j] = (x2 * x6 + x3 * x5) / x4
        if signs[j] == 1:
            xs[j + 1, lo + 1] = x5
            xs[j + 1, lo + 2] = (x1 * x3 * x5 + x3 * x4 * x5 + x1 * x2 * x6) / (x2 * x4)
            xs[j + 1, lo + 3] = (
                x1 * x3 * x4 * x5 + x3 * x4 * x4 * x5 + x1 * x3 * x5 * x7
                + x3 * x4 * x5 * x7 + x1 * x2 * x6 * x7
            ) / (x2 * x4 * x6)
            xs[j + 1, lo + 4] = (x3 * x4 * x5 + x3 * x5 * x7 + x2 * x6 * x7) / (x4 * x6)
            xs[j + 1, lo + 5] = x3
        else:
            xs[j + 1, lo + 1] = (x1 * x3 * x5 + x1 * x2 * x6 + x2 * x4 * x6) / (x3 * x4)
            xs[j + 1, lo + 2] = x6
            xs[j + 1, lo + 3] = (
                x1 * x2 * x4 * x6 + x2 * x4 * x4 * x6 + x1 * x3 * x5 * x7
                + x1 * x2 * x6 * x7 + x2 * x4 * x6 * x7
            ) / (x3 * x4 * x5)
            xs[j + 1, lo + 4] = x2
            xs[j + 1, lo + 5] = (x2 * x4 * x6 + x3 * x5 * x7 + x2 * x6 * x7) / (x4 * x5)
    return xs, centers


def _want_numba() -> bool:
    return os.environ.get("BRAIDVOL_DISABLE_NUMBA", "0") not in ("1", "true", "yes")


USING_NUMBA = False
if _want_numba():
    try:
        from numba import njit

        _trajectory_impl = njit(cache=True)(_trajectory_impl)
        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False


def trajectory_arrays(x0: np.ndarray, gens: np.ndarray, signs: np.ndarray):
    """Run the braid trajectory on a complex128 vector; no error raising,
    degenerate steps propagate as non-finite entries."""
    x0 = np.ascontiguousarray(x0, dtype=np.complex128)
    gens = np.ascontiguousarray(gens, dtype=np.int64)
    signs = np.ascontiguousarray(signs, dtype=np.int64)
    try:
        with np.errstate(all="ignore"):
            return _trajectory_impl(x0, gens, signs)
    except ZeroDivisionError:
        # the jitted path raises on exact complex zero denominators where the
        # numpy path yields inf/nan; normalize to the non-finite convention
        m = gens.shape[0]
        xs = np.full((m + 1, x0.shape[0]), np.nan + 1j * np.nan, dtype=np.complex128)
        xs[0, :] = x0
        return xs, np.full(m, np.nan + 1j * np.nan, dtype=np.complex128)


def residual_arrays(x0: np.ndarray, gens: np.ndarray, signs: np.ndarray) -> np.ndarray:
    xs, _ = trajectory_arrays(x0, gens, signs)
    return xs[-1, :] - xs[0, :]


def letters_to_arrays(letters) -> tuple[np.ndarray, np.ndarray]:
    """Split (index, sign) letter pairs into the int64 arrays the kernels take."""
    if len(letters) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.asarray(letters, dtype=np.int64)
    return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])
