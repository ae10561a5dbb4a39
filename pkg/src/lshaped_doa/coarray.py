"""Difference co-array pseudo-snapshots, subarray stacking and DOF sizing.

Lag ``l`` in ``[-(S-1), S-1]`` is stored at 0-based index ``l + S - 1`` of the
co-array vector. The subarray stack is the ``Q x M`` Hankel arrangement
``stack[q, m] = y[q + m]`` (0-based), so the reference subarray covers lags
``-S+1 .. -S+Q`` and column ``m`` is shifted by ``m`` lags.
"""

import math
from dataclasses import dataclass

import numpy as np

DEDUP_MODES = ("average", "first")


@dataclass(frozen=True)
class CoarrayMap:
    """For every lag, the element index pairs ``(i, j)`` with ``xi_i - xi_j = lag``."""

    s_value: int
    n_elements: int
    pairs: dict

    @classmethod
    def from_positions(cls, positions, s_value):
        positions = np.asarray(positions)
        pairs = {lag: [] for lag in range(-(s_value - 1), s_value)}
        for i, pi in enumerate(positions):
            for j, pj in enumerate(positions):
                lag = int(pi - pj)
                if lag in pairs:
                    pairs[lag].append((i, j))
        missing = [lag for lag, p in pairs.items() if not p]
        if missing:
            raise ValueError(f"co-array is missing lags {missing}")
        return cls(s_value, len(positions), pairs)

    @classmethod
    def from_geometry(cls, geometry):
        return cls.from_positions(geometry.positions, geometry.s_value)


def coarray_pseudosnapshot(cov, cmap, dedup="average"):
    """Sorted, de-duplicated vectorized covariance of length ``2S - 1``.

    ``dedup="average"`` averages all redundant entries of a lag; ``"first"``
    keeps the lexicographically first ``(i, j)`` pair.
    """
    cov = np.asarray(cov, dtype=np.complex128)
    if cov.shape != (cmap.n_elements, cmap.n_elements):
        raise ValueError(f"covariance shape {cov.shape} does not match the geometry")
    if dedup not in DEDUP_MODES:
        raise ValueError(f"dedup must be one of {DEDUP_MODES}")
    s = cmap.s_value
    y = np.empty(2 * s - 1, dtype=np.complex128)
    for lag, pairs in cmap.pairs.items():
        if dedup == "average":
            rows, cols = zip(*pairs)
            y[lag + s - 1] = cov[list(rows), list(cols)].mean()
        else:
            y[lag + s - 1] = cov[min(pairs)]
    return y


def identifiability_bound(q, m):
    """Largest resolvable target count ``min(2(Q^2 - 1), M^2)``."""
    if q < 2 or m < 2:
        raise ValueError("Q and M must both be at least 2")
    return min(2 * (q * q - 1), m * m)


def optimal_subarray_size(s_value):
    """Subarray length ``Q`` maximizing the identifiability bound under ``Q + M = 2S``.

    The continuous optimum ``sqrt(8 S^2 + 2) - 2S`` is evaluated and the better
    of its two integer neighbours is returned (plain rounding misses the
    integer optimum for some ``S``, e.g. 9 and 15).
    """
    if s_value < 2:
        raise ValueError("S must be at least 2")
    q_star = math.sqrt(8 * s_value ** 2 + 2) - 2 * s_value
    lo, hi = 2, 2 * s_value - 2
    candidates = sorted({min(max(c, lo), hi)
                         for c in (math.floor(q_star), math.ceil(q_star))},
                        key=lambda q: abs(q - q_star))
    return max(candidates, key=lambda q: identifiability_bound(q, 2 * s_value - q))


def optimal_dof_value(s_value):
    """Closed-form optimal DOF ``24 S^2 - 8 S sqrt(8 S^2 + 2) + 2`` (continuous)."""
    return 24 * s_value ** 2 - 8 * s_value * math.sqrt(8 * s_value ** 2 + 2) + 2


@dataclass(frozen=True)
class SubarrayStack:
    x_stack: np.ndarray
    z_stack: np.ndarray
    q: int
    m: int
    s_value: int


def hankel_stack(y, q):
    """``Q x M`` matrix with ``[q, m] = y[q + m]``, ``M = len(y) + 1 - Q``."""
    y = np.asarray(y)
    m = y.size + 1 - q
    return y[np.arange(q)[:, None] + np.arange(m)[None, :]]


def subarray_stack(y_x, y_z, q):
    y_x = np.asarray(y_x, dtype=np.complex128)
    y_z = np.asarray(y_z, dtype=np.complex128)
    if y_x.shape != y_z.shape or y_x.ndim != 1 or y_x.size % 2 == 0:
        raise ValueError("co-array vectors must share an odd length 2S - 1")
    s = (y_x.size + 1) // 2
    if not 2 <= q <= 2 * s - 2:
        raise ValueError(f"Q={q} outside [2, {2 * s - 2}]")
    return SubarrayStack(hankel_stack(y_x, q), hankel_stack(y_z, q), q, 2 * s - q, s)


def noise_locator_matrix(q, m, s_value):
    """0/1 matrix marking the zero-lag stripe ``q + m = S - 1`` (0-based)."""
    if q + m != 2 * s_value:
        raise ValueError("Q + M must equal 2S")
    rows = np.arange(q)[:, None]
    cols = np.arange(m)[None, :]
    return (rows + cols == s_value - 1).astype(float)


def unit_lag_vector(s_value):
    """Co-array image of the identity covariance (1 at lag 0)."""
    e = np.zeros(2 * s_value - 1)
    e[s_value - 1] = 1.0
    return e
