"""Comparison estimators sharing the proposed method's co-array front end.

``ss_subspace_estimate`` is the spatially smoothed co-array subspace method
(square ``S x S`` smoothing per axis, shift-invariance solve, pairing against
the sample cross-covariance). ``als_estimate`` fits a complex CP model to the
order-3 tensor by alternating least squares and reads both generators off
each component, so its pairing comes for free.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .array_model import steering_matrix
from .coarray import hankel_stack
from .estimator import cross_covariance_residual, estimate_source_powers, generators_to_angles
from .numerics import evd_general, lstsq
from .pipeline import order3_tensor
from .tensor import KruskalModel, khatri_rao, kruskal_to_dense

EXHAUSTIVE_PAIRING_LIMIT = 7


@dataclass(frozen=True)
class BaselineResult:
    method: str
    azimuth_deg: np.ndarray
    elevation_deg: np.ndarray
    powers: np.ndarray
    iterations_used: int = 1
    converged: bool = True
    pairing: str = ""
    fit_history: tuple = field(default=(), repr=False)


# ------------------------------------------------------- spatial smoothing

def smoothed_covariance(y):
    """``(1/S) sum_m y_m y_m^H`` over the ``S`` length-``S`` co-array windows."""
    y = np.asarray(y)
    s = (y.size + 1) // 2
    windows = hankel_stack(y, s)
    return windows @ windows.conj().T / s


def shift_invariance_generators(u_sig):
    """Eigenvalues of the LS shift matrix of a Vandermonde-structured basis."""
    return evd_general(lstsq(u_sig[:-1], u_sig[1:]))[0]


def _smoothed_axis(y, k):
    r_ss = smoothed_covariance(y)
    _, vecs = np.linalg.eigh(0.5 * (r_ss + r_ss.conj().T))
    return shift_invariance_generators(vecs[:, ::-1][:, :k])


def pair_by_cross_covariance(azimuth_deg, elevation_deg, cross_cov, positions):
    """Permutation ``perm`` so that ``(azimuth[k], elevation[perm[k]])`` are the targets.

    Exhaustive over permutations up to seven targets; beyond that a Hungarian
    assignment on per-pair beamformed cross-covariance magnitude.
    """
    k = len(azimuth_deg)
    if k <= EXHAUSTIVE_PAIRING_LIMIT:
        best = min(itertools.permutations(range(k)), key=lambda p: cross_covariance_residual(
            cross_cov, positions, azimuth_deg, np.asarray(elevation_deg)[list(p)]))
        return np.array(best)
    a_x = steering_matrix(positions, np.cos(np.deg2rad(azimuth_deg)))
    a_z = steering_matrix(positions, np.cos(np.deg2rad(elevation_deg)))
    score = np.abs(a_x.conj().T @ cross_cov @ a_z)
    rows, cols = linear_sum_assignment(-score)
    return cols[np.argsort(rows)]


def ss_subspace_estimate(meas, k):
    """Spatial-smoothing subspace baseline on the shared co-array vectors.

    Raises:
        ValueError: if ``k >= S`` (the smoothed covariance has only ``S`` rows).
    """
    s = meas.s_value
    if not 1 <= k <= s - 1:
        raise ValueError(f"smoothing baseline resolves at most S-1={s - 1} targets, got K={k}")
    kx = _smoothed_axis(meas.y_x, k)
    kz = _smoothed_axis(meas.y_z, k)
    # Both axes share the steering convention exp(-j pi u l).
    az, _ = generators_to_angles(kx, np.ones(k), check=False)
    el, _ = generators_to_angles(kz, np.ones(k), check=False)
    if meas.cross_cov is not None and k > 1:
        el = el[pair_by_cross_covariance(az, el, meas.cross_cov, meas.geometry.positions)]
    powers = estimate_source_powers(meas.y_x, az, s).powers
    return BaselineResult("ss", az, el, powers, pairing="cross_covariance_residual")


# -------------------------------------------------------------- CP-ALS

@dataclass(frozen=True)
class AlsFit:
    model: KruskalModel
    iterations: int
    converged: bool
    objective_history: tuple
    restarts_converged: int


def _solve_factor(t_mode, f1, f2):
    # Factor minimizing ||t_mode - F khatri_rao(f1, f2)^T||_F via normal equations.
    gram = (f1.T @ f1.conj()) * (f2.T @ f2.conj())
    rhs = t_mode @ khatri_rao(f1, f2).conj()
    return lstsq(gram.T, rhs.T).T


def als_cpd(tensor, rank, max_iters=1000, tol=1e-8, restarts=5, rng=None):
    """Complex rank-``rank`` CP decomposition of an order-3 tensor by ALS.

    Each restart starts from circular Gaussian factors. The objective
    ``||T - [[A, B, C]]||_F^2`` is recorded per sweep and checked to be
    nonincreasing. A restart converges when the relative objective decrease
    drops below ``tol``; the best restart by final objective is returned.
    """
    tensor = np.asarray(tensor, dtype=np.complex128)
    if tensor.ndim != 3:
        raise ValueError("als_cpd expects an order-3 tensor")
    i, j, kk = tensor.shape
    if not 1 <= rank <= min(i * j, j * kk, i * kk):
        raise ValueError(f"rank {rank} exceeds an unfolding's column dimension")
    rng = np.random.default_rng(0) if rng is None else rng
    t0 = tensor.reshape(i, j * kk)
    t1 = tensor.transpose(1, 0, 2).reshape(j, i * kk)
    t2 = tensor.transpose(2, 0, 1).reshape(kk, i * j)
    norm2 = np.linalg.norm(tensor) ** 2
    best = None
    n_converged = 0
    for _ in range(restarts):
        def draw(n):
            return rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
        a, b, c = draw(i), draw(j), draw(kk)
        history = []
        converged = False
        for it in range(1, max_iters + 1):
            a = _solve_factor(t0, b, c)
            b = _solve_factor(t1, a, c)
            c = _solve_factor(t2, a, b)
            obj = float(np.linalg.norm(t2 - c @ khatri_rao(a, b).T) ** 2)
            if history and obj > history[-1] * (1 + 1e-9) + 1e-12 * norm2:
                raise ArithmeticError(f"ALS objective increased at sweep {it}")
            history.append(obj)
            if len(history) > 1 and history[-2] - obj <= tol * max(history[-2], 1e-300):
                converged = True
                break
        n_converged += converged
        if best is None or history[-1] < best[3][-1]:
            best = (a, b, c, history, it, converged)
    a, b, c, history, iters, converged = best
    weights = np.linalg.norm(a, axis=0) * np.linalg.norm(b, axis=0) * np.linalg.norm(c, axis=0)
    model = KruskalModel(weights, (a / np.linalg.norm(a, axis=0), b / np.linalg.norm(b, axis=0),
                                   c / np.linalg.norm(c, axis=0)))
    return AlsFit(model, iters, n_converged > 0, tuple(history), n_converged)


def shift_ratio(blocks, axis):
    """LS generator of a stack of Vandermonde-structured arrays along ``axis``.

    ``blocks`` is a list of arrays; the ratio ``<f[:-1], f[1:]> / ||f[:-1]||^2``
    is pooled across all of them.
    """
    num = den = 0.0
    for f in blocks:
        f = np.moveaxis(np.asarray(f), axis, 0)
        num = num + np.vdot(f[:-1], f[1:])
        den = den + np.vdot(f[:-1], f[:-1]).real
    return num / den


def als_generators(model, q, m):
    """Per-component ``(kappa_x, kappa_z_conj)`` from the steering and shift factors.

    The steering factor column reshapes to ``Q x Q`` (x slowest) and the shift
    factor column to ``M x M``; both carry the same generators along their two
    axes.
    """
    a, b = model.factors[0], model.factors[1]
    kx, kz = [], []
    for r in range(model.rank):
        ar = a[:, r].reshape(q, q)
        br = b[:, r].reshape(m, m)
        kx.append(shift_ratio([ar, br], 0))
        kz.append(shift_ratio([ar, br], 1))
    kx, kz = np.array(kx), np.array(kz)
    return kx / np.abs(kx), kz / np.abs(kz)


def als_estimate(meas, k, rank=None, max_iters=1000, tol=1e-8, restarts=5, rng=None):
    """ALS-based CP baseline on the ``(Q^2, M^2, 2)`` tensor.

    ``rank`` defaults to ``k``: one CP component per target.
    """
    rank = k if rank is None else rank
    fit = als_cpd(order3_tensor(meas.obs), rank, max_iters, tol, restarts, rng)
    kx, kz = als_generators(fit.model, meas.q, meas.m)
    az, el = generators_to_angles(kx, kz, check=False)
    if rank > k:
        order = np.argsort(-fit.model.weights, kind="stable")[:k]
        az, el = az[order], el[order]
    powers = estimate_source_powers(meas.y_x, az, meas.s_value).powers
    return BaselineResult("als", az, el, powers, iterations_used=fit.iterations,
                          converged=fit.converged, pairing="joint_factor",
                          fit_history=fit.objective_history)


def als_reconstruction(fit):
    return kruskal_to_dense(fit.model)


__all__ = [name for name in dir() if not name.startswith("_")]
