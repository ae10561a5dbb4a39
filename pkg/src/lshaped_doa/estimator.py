"""Two-step iterative 2-D DOA estimator on the unfolded co-array tensor.

Step 1 takes a truncated SVD of the unfolded observation, forms the x-shift,
z-shift and symmetry-mode selections of the left singular basis, and reads the
Vandermonde generators off the eigenvalues of the three least-squares shift
matrices. Step 2 estimates source and noise powers, rebuilds the
signal/noise cross term through the same tensor pipeline as the data, and
subtracts a damped copy from the original observation. The two steps repeat
until the removed energy stops changing.

The signal part of the unfolded observation is the Kronecker product of the x
and z stacks, so its rank is ``r_x * r_z`` (distinct azimuths times distinct
elevations) and its dominant subspace holds every (azimuth, elevation)
combination. The default decomposition uses that rank, pairs generators by
joint diagonalization of the two shift matrices, and keeps the ``K``
combinations that best explain the x/z cross-covariance.
"""

import cmath
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .array_model import ArrayGeometry, Scene, steering_matrix
from .coarray import identifiability_bound, noise_locator_matrix
from .errors import DegenerateInputError, PairingError, UnreliableGeneratorError
from .measurements import Measurements
from .numerics import eigh_ascending, evd_general, lstsq, tsvd
from .pipeline import (conjugate_symmetric_stack, contract_and_unfold, cross_outer)

PAIRING_BACKENDS = ("gamma", "shared_basis", "subspace_residual")
RANK_DEFICIENCY_TOL = 1e-12
GENERATOR_MAGNITUDE_RANGE = (0.5, 2.0)
CONDITION_LIMIT = 1e12
RECON_RCOND = 1e-3
# Generic complex weight for the joint-diagonalization pencil psi_x + c psi_z.
JOINT_MIX = 0.5 * cmath.exp(0.7j)


@dataclass(frozen=True)
class GeneratorEstimates:
    kappa_x: np.ndarray
    kappa_z_conj: np.ndarray
    gamma: np.ndarray
    u_basis: np.ndarray
    psi_x: np.ndarray = field(repr=False)
    psi_z: np.ndarray = field(repr=False)
    psi_g: np.ndarray = field(repr=False)
    singular_values: np.ndarray = field(repr=False)
    s_value: int = 0

    @property
    def rank(self):
        return self.kappa_x.size


@dataclass(frozen=True)
class PowerEstimate:
    powers: np.ndarray
    raw: np.ndarray
    n_clipped: int
    condition: float

    @property
    def ill_conditioned(self):
        return self.condition > CONDITION_LIMIT


@dataclass(frozen=True)
class PassResult:
    """Outcome of one Step-1 pass (angles in degrees, paired)."""

    azimuth_deg: np.ndarray
    elevation_deg: np.ndarray
    powers: np.ndarray
    raw_powers_x: np.ndarray
    raw_powers_z: np.ndarray
    n_clipped: int
    ill_conditioned: bool


@dataclass(frozen=True)
class DoaEstimate:
    azimuth_deg: np.ndarray
    elevation_deg: np.ndarray
    powers: np.ndarray
    iterations_used: int
    epsilon_history: tuple
    pairing_backend_used: str
    axis_ranks: tuple
    noise_power: float
    passes: tuple = field(repr=False, default=())
    degraded: bool = False
    n_clipped: int = 0
    ill_conditioned: bool = False
    converged: bool = True

    @property
    def first_pass(self):
        """Step-1-only result (before any cross-term removal)."""
        return self.passes[0]


# ---------------------------------------------------------------- Step 1

def shift_selections(u, q):
    """Row selections of a ``2Q^2 x r`` basis: x-shift, z-shift and symmetry pairs.

    Returns ``((u_x1, u_x2), (u_z1, u_z2), (u_g1, u_g2))``. The row order
    ``(q_x, q_z, g)`` with g fastest is the unfolding convention of
    :mod:`.pipeline`; dropping the last/first x block, the last/first z pair in
    every x block, and taking odd/even rows follow from it directly.
    """
    r = u.shape[1]
    u4 = u.reshape(q, q, 2, r)
    return ((u4[:-1].reshape(-1, r), u4[1:].reshape(-1, r)),
            (u4[:, :-1].reshape(-1, r), u4[:, 1:].reshape(-1, r)),
            (u4[:, :, 0].reshape(-1, r), u4[:, :, 1].reshape(-1, r)))


def mode_bases(t2, q, m, ranks):
    """Leading left singular vectors of the x-row and z-row mode unfoldings of ``t2``."""
    t5 = t2.reshape(q, q, 2, m, m)
    x_unf = t5.reshape(q, -1)
    z_unf = np.moveaxis(t5, 1, 0).reshape(q, -1)
    return tsvd(x_unf, ranks[0])[0], tsvd(z_unf, ranks[1])[0]


def _tucker_basis(t2, q, m, rank, ranks):
    # Project onto kron(U_x, U_z, I_2), then keep the dominant rank-r part.
    u_x, u_z = mode_bases(t2, q, m, ranks)
    core_basis = np.kron(np.kron(u_x, u_z), np.eye(2))
    u, s, _ = tsvd(core_basis.conj().T @ t2, rank)
    return core_basis @ u, s


def step1_decompose(obs, k, rank=None, s_value=None, subspace="tucker", mode_ranks=None):
    """Vandermonde-structured decomposition of ``obs.t2``.

    Args:
        obs: :class:`UnfoldedObservation`.
        k: number of targets (checked against the identifiability bound).
        rank: truncation rank of the SVD; defaults to ``k``.
        s_value: co-array constant ``S``; defaults to ``(Q + M) / 2``.
        subspace: ``"tucker"`` restricts the signal subspace to the span of the
            leading x-row and z-row mode singular vectors before truncating;
            ``"svd"`` truncates the unfolding directly.
        mode_ranks: ``(r_x, r_z)`` for the Tucker step; defaults to ``(rank, 1)``.
    """
    q, m = obs.q, obs.m
    if k < 1 or k > identifiability_bound(q, m):
        raise ValueError(f"K={k} outside [1, {identifiability_bound(q, m)}]")
    rank = k if rank is None else int(rank)
    if not 1 <= rank <= min(2 * q * (q - 1), m * m):
        raise ValueError(f"decomposition rank {rank} too large for Q={q}, M={m}")
    if subspace == "tucker":
        u, s = _tucker_basis(obs.t2, q, m, rank, mode_ranks or (rank, 1))
    elif subspace == "svd":
        u, s, _ = tsvd(obs.t2, rank)
    else:
        raise ValueError("subspace must be 'tucker' or 'svd'")
    if s[0] == 0 or s[-1] / s[0] < RANK_DEFICIENCY_TOL:
        raise DegenerateInputError("observation has no rank-%d signal subspace" % rank)
    (x1, x2), (z1, z2), (g1, g2) = shift_selections(u, q)
    psi_x, psi_z, psi_g = lstsq(x1, x2), lstsq(z1, z2), lstsq(g1, g2)
    return GeneratorEstimates(
        kappa_x=evd_general(psi_x)[0], kappa_z_conj=evd_general(psi_z)[0],
        gamma=evd_general(psi_g)[0], u_basis=u, psi_x=psi_x, psi_z=psi_z,
        psi_g=psi_g, singular_values=s, s_value=(q + m) // 2 if s_value is None else s_value)


def generators_to_angles(kappa_x, kappa_z_conj, check=True):
    """Map generators to degrees: ``cos(theta) = -arg(kx)/pi``, ``cos(phi) = arg(kz*)/pi``."""
    kappa_x = np.atleast_1d(kappa_x)
    kappa_z_conj = np.atleast_1d(kappa_z_conj)
    if check:
        lo, hi = GENERATOR_MAGNITUDE_RANGE
        mags = np.abs(np.concatenate([kappa_x, kappa_z_conj]))
        bad = np.flatnonzero((mags < lo) | (mags > hi))
        if bad.size:
            raise UnreliableGeneratorError(
                f"generator magnitudes outside [{lo}, {hi}] at {bad.tolist()}", bad)
    cos_t = np.clip(-np.angle(kappa_x) / np.pi, -1, 1)
    cos_p = np.clip(np.angle(kappa_z_conj) / np.pi, -1, 1)
    return np.rad2deg(np.arccos(cos_t)), np.rad2deg(np.arccos(cos_p))


def _assign(cost):
    rows, cols = linear_sum_assignment(cost)
    return rows, cols


def joint_generators(g, mix=JOINT_MIX):
    """Paired generators from a common eigenbasis of both shift matrices.

    The basis comes from the pencil ``psi_x + mix * psi_z`` so that repeated
    azimuth (or elevation) generators do not leave it undetermined; with
    ``mix=0`` this is the x-shift eigenbasis.
    """
    _, xi = evd_general(g.psi_x + mix * g.psi_z)
    try:
        xi_inv = np.linalg.inv(xi)
    except np.linalg.LinAlgError as exc:
        raise PairingError("shared eigenbasis is singular") from exc
    kx = np.einsum("ij,jk,ki->i", xi_inv, g.psi_x, xi)
    kz = np.einsum("ij,jk,ki->i", xi_inv, g.psi_z, xi)
    return kx, kz


def _pair_gamma(g):
    r = g.rank
    free_i, free_j = list(range(r)), list(range(r))
    pairs = []
    for gamma_k in g.gamma:
        if not free_i:
            raise PairingError("ran out of candidates")
        prod = g.kappa_x[free_i][:, None] * g.kappa_z_conj[free_j][None, :]
        cost = np.abs(gamma_k - prod ** (-2 * g.s_value)) ** 2
        a, b = np.unravel_index(np.argmin(cost), cost.shape)
        pairs.append((free_i.pop(a), free_j.pop(b)))
    return np.array(pairs)


def _model_columns(g, kx, kzc, informative_gamma):
    q = int(round(np.sqrt(g.u_basis.shape[0] // 2)))
    rows = np.arange(q) - g.s_value + 1
    a_x = kx[None, :] ** rows[:, None]
    a_zc = kzc[None, :] ** rows[:, None]
    sym = (kx * kzc) ** (-2 * g.s_value) if informative_gamma else np.ones_like(kx)
    g_rows = np.stack([np.ones_like(sym), sym])
    cols = a_x[:, None, None, :] * a_zc[None, :, None, :] * g_rows[None, None, :, :]
    return cols.reshape(-1, kx.size)


def _distinct(values, tol=1e-6):
    """Cluster representatives (means) of nearly equal generator values."""
    reps, members = [], []
    for v in values:
        for i, r in enumerate(reps):
            if abs(v - r) <= tol * max(1.0, abs(r)):
                members[i].append(v)
                reps[i] = np.mean(members[i])
                break
        else:
            reps.append(v)
            members.append([v])
    return np.array(reps)


def _residual_candidates(g, informative_gamma=False):
    # Every distinct (x, z) generator combination, scored by its distance from
    # the signal subspace; the ``rank`` best combinations are kept.
    unit_x = _distinct(g.kappa_x / np.abs(g.kappa_x))
    unit_z = _distinct(g.kappa_z_conj / np.abs(g.kappa_z_conj))
    ii, jj = np.meshgrid(np.arange(unit_x.size), np.arange(unit_z.size), indexing="ij")
    kx, kzc = unit_x[ii.ravel()], unit_z[jj.ravel()]
    cols = _model_columns(g, kx, kzc, informative_gamma)
    u = g.u_basis
    resid = cols - u @ (u.conj().T @ cols)
    score = np.linalg.norm(resid, axis=0) ** 2 / np.linalg.norm(cols, axis=0) ** 2
    keep = np.sort(np.argsort(score, kind="stable")[:g.rank])
    return kx[keep], kzc[keep]


def pair_targets(g, backend="shared_basis", informative_gamma=False):
    """One-to-one index pairs ``(i, j)`` into ``kappa_x`` and ``kappa_z_conj``."""
    if backend not in PAIRING_BACKENDS:
        raise ValueError(f"backend must be one of {PAIRING_BACKENDS}")
    if g.rank == 1:
        return np.array([[0, 0]])
    if backend == "gamma":
        return _pair_gamma(g)
    if backend == "subspace_residual":
        raise ValueError("the residual backend scores combinations, not index pairs;"
                         " use paired_generators")
    kx, kz = joint_generators(g)
    rows_x, cols_x = _assign(np.abs(kx[:, None] - g.kappa_x[None, :]))
    rows_z, cols_z = _assign(np.abs(kz[:, None] - g.kappa_z_conj[None, :]))
    return np.column_stack([cols_x[np.argsort(rows_x)], cols_z[np.argsort(rows_z)]])


def paired_generators(g, backend="shared_basis", informative_gamma=False):
    """Paired ``(kappa_x, kappa_z_conj)`` arrays, one entry per decomposed component."""
    if backend == "shared_basis" and g.rank > 1:
        return joint_generators(g)
    if backend == "subspace_residual":
        return _residual_candidates(g, informative_gamma)
    pairs = pair_targets(g, backend, informative_gamma)
    return g.kappa_x[pairs[:, 0]], g.kappa_z_conj[pairs[:, 1]]


# --------------------------------------------------- pair-generator probe

@dataclass(frozen=True)
class PairGenerator:
    """Per-target slab-2 / slab-1 scaling and how well one scalar explains it."""

    values: np.ndarray
    residuals: np.ndarray

    @property
    def separable(self):
        return bool(np.all(self.residuals < 1e-8))

    @property
    def informative(self):
        return self.separable and bool(np.any(np.abs(self.values - 1) > 1e-6))


def empirical_pair_generator(geometry, scene, convention="flip_all", q=None):
    """Run the noiseless pipeline per target and fit ``slab2 = g * slab1``."""
    values, residuals = [], []
    for az, el, p in zip(scene.azimuth_deg, scene.elevation_deg, scene.powers):
        single = Scene((az,), (el,), (p,), 0.0, scene.snapshots, scene.seed)
        meas = Measurements.analytic(geometry, single, q=q, convention=convention)
        stack = conjugate_symmetric_stack(
            cross_outer(meas.stack.x_stack, meas.stack.z_stack),
            cross_outer(meas.stack.z_stack, meas.stack.x_stack), convention)
        s1, s2 = stack[..., 0].ravel(), stack[..., 1].ravel()
        gval = np.vdot(s1, s2) / np.vdot(s1, s1)
        values.append(gval)
        residuals.append(np.linalg.norm(s2 - gval * s1) / np.linalg.norm(s2))
    return PairGenerator(np.array(values), np.array(residuals))


@lru_cache(maxsize=None)
def gamma_is_informative(convention, n_elements=6):
    """Certify on a probe scene whether the symmetry mode carries pairing data."""
    probe = Scene((40.0, 75.0), (60.0, 110.0), noise_power=0.0)
    return empirical_pair_generator(ArrayGeometry.nested(n_elements), probe,
                                    convention).informative


def resolve_backend(pairing, convention):
    if pairing in (None, "auto"):
        return "gamma" if gamma_is_informative(convention) else "subspace_residual"
    aliases = {"shared-basis": "shared_basis", "residual": "subspace_residual"}
    backend = aliases.get(pairing, pairing)
    if backend not in PAIRING_BACKENDS:
        raise ValueError(f"unknown pairing backend {pairing!r}")
    if backend == "gamma" and not gamma_is_informative(convention):
        raise ValueError(f"the symmetry generator is identically 1 under {convention!r};"
                         " it cannot pair targets")
    return backend


# ------------------------------------------------------------- selection

def select_targets(azimuth_deg, elevation_deg, k, cross_cov, positions):
    """Indices of the ``k`` candidate directions best explaining ``cross_cov``.

    Fits ``cross_cov ~ sum_c p_c a_x(theta_c) a_z(phi_c)^H`` by least squares
    over all candidates and keeps the ``k`` largest real coefficients.
    """
    n_cand = len(azimuth_deg)
    if n_cand == k:
        return np.arange(k)
    if n_cand < k:
        raise PairingError(f"only {n_cand} candidate directions for K={k}")
    if cross_cov is None:
        raise PairingError("more candidates than targets and no cross-covariance to select with")
    a_x = steering_matrix(positions, np.cos(np.deg2rad(azimuth_deg)))
    a_z = steering_matrix(positions, np.cos(np.deg2rad(elevation_deg)))
    basis = (a_x[:, None, :] * a_z.conj()[None, :, :]).reshape(-1, n_cand)
    coef = lstsq(basis, np.asarray(cross_cov).reshape(-1)).real
    return np.sort(np.argsort(-coef, kind="stable")[:k])


# ---------------------------------------------------------------- Step 2

def coarray_steering(angles_deg, s_value):
    lags = np.arange(-(s_value - 1), s_value)
    return steering_matrix(lags, np.cos(np.deg2rad(angles_deg)))


def estimate_source_powers(y, angles_deg, s_value, rcond=None):
    """Least-squares source powers from a co-array vector; clipped at zero.

    ``rcond`` truncates the fit so that (nearly) coincident directions share
    their power instead of blowing up with opposite signs.
    """
    angles_deg = np.atleast_1d(angles_deg)
    if angles_deg.size > 2 * s_value - 1:
        raise ValueError("more targets than co-array lags")
    a = coarray_steering(angles_deg, s_value)
    return _power_result(lstsq(a, y, rcond=rcond).real, a)


def _power_result(raw, a):
    sv = np.linalg.svd(a, compute_uv=False)
    condition = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
    return PowerEstimate(np.clip(raw, 0, None), raw, int(np.sum(raw < 0)), float(condition))


def cross_covariance_powers(cross_cov, azimuth_deg, elevation_deg, positions):
    """Powers as LS coefficients of ``cross_cov`` on ``a_x a_z^H`` (any K up to N^2)."""
    a_x = steering_matrix(positions, np.cos(np.deg2rad(azimuth_deg)))
    a_z = steering_matrix(positions, np.cos(np.deg2rad(elevation_deg)))
    basis = (a_x[:, None, :] * a_z.conj()[None, :, :]).reshape(-1, len(azimuth_deg))
    return _power_result(lstsq(basis, np.asarray(cross_cov).reshape(-1)).real, basis)


def cross_covariance_residual(cross_cov, positions, azimuth_deg, elevation_deg):
    """Relative LS residual of ``cross_cov`` on columns ``a_x(theta_k) a_z(phi_k)^H``."""
    a_x = steering_matrix(positions, np.cos(np.deg2rad(azimuth_deg)))
    a_z = steering_matrix(positions, np.cos(np.deg2rad(elevation_deg)))
    basis = (a_x[:, None, :] * a_z.conj()[None, :, :]).reshape(-1, len(azimuth_deg))
    c = np.asarray(cross_cov).reshape(-1)
    resid = c - basis @ lstsq(basis, c)
    return float(np.linalg.norm(resid) / np.linalg.norm(c))


def axis_power_fit(y, angles_deg, s_value):
    """Truncated LS fit of one axis' co-array vector; duplicates share power."""
    return lstsq(coarray_steering(angles_deg, s_value), y, rcond=RECON_RCOND).real


def estimate_noise_power(cov, k):
    """Mean of the ``N - K`` smallest covariance eigenvalues."""
    n = cov.shape[0]
    if k >= n:
        raise ValueError(f"K={k} must be smaller than N={n}")
    return float(np.mean(eigh_ascending(cov)[: n - k]))


def estimate_noise_power_coarray(y, r, s_value):
    """Noise power from the ``S x S`` Toeplitz co-array matrix (for ``r >= N``)."""
    if r >= s_value:
        raise ValueError(f"rank {r} must be smaller than S={s_value}")
    idx = np.arange(s_value)
    toep = np.asarray(y)[idx[:, None] - idx[None, :] + s_value - 1]
    toep = 0.5 * (toep + toep.conj().T)
    return max(float(np.mean(eigh_ascending(toep)[: s_value - r])), 0.0)


def signal_stack(angles_deg, powers, s_value, q):
    """Noise-free ``Q x M`` subarray stack ``A^(1) diag(p) K^T``."""
    m = 2 * s_value - q
    u = np.cos(np.deg2rad(np.atleast_1d(angles_deg)))
    ref = np.exp(-1j * np.pi * np.outer(np.arange(q) - s_value + 1, u))
    shifts = np.exp(-1j * np.pi * np.outer(np.arange(m), u))
    return (ref * np.asarray(powers)) @ shifts.T


def reconstruct_cross_term(azimuth_deg, elevation_deg, powers_x, powers_z, noise_power,
                           s_value, q, convention="flip_all"):
    """Unfolded signal/noise cross term, pushed through the data pipeline.

    ``powers_z`` may differ from ``powers_x`` (each axis fitted on its own
    co-array vector); pass the same array to use one power vector for both.
    """
    m = 2 * s_value - q
    if noise_power == 0:
        return np.zeros((2 * q * q, m * m), dtype=np.complex128)
    x_sig = signal_stack(azimuth_deg, powers_x, s_value, q)
    z_sig = signal_stack(elevation_deg, powers_z, s_value, q)
    w = noise_locator_matrix(q, m, s_value)
    r_xz = noise_power * (cross_outer(x_sig, w) + cross_outer(w, z_sig))
    r_zx = noise_power * (cross_outer(z_sig, w) + cross_outer(w, x_sig))
    return contract_and_unfold(conjugate_symmetric_stack(r_xz, r_zx, convention)).t2


# ------------------------------------------------------------ iteration

def axis_ranks(meas, k):
    """Decomposition ranks ``(r_x, r_z)`` of the x and z stacks.

    Up to ``Q - 1`` targets are assumed distinct on each axis (rank ``K``).
    Beyond that the rank of each stack is read from its largest singular-value
    gap, then raised until ``r_x * r_z >= K``.
    """
    q = meas.q
    if k <= q - 1:
        return k, k

    def gap_rank(stack):
        s = np.linalg.svd(stack, compute_uv=False)[:q]
        s = np.maximum(s, np.finfo(float).tiny)
        return int(np.argmax(s[:-1] / s[1:])) + 1

    r_x, r_z = gap_rank(meas.stack.x_stack), gap_rank(meas.stack.z_stack)
    while r_x * r_z < k:
        if r_x <= r_z and r_x < q - 1:
            r_x += 1
        elif r_z < q - 1:
            r_z += 1
        else:
            raise ValueError(f"K={k} exceeds what Q={q} subarrays can separate")
    return r_x, r_z


def _noise_power(meas, r_x, r_z):
    n = meas.geometry.n_elements
    est = []
    for cov, y, r in ((meas.cov_x, meas.y_x, r_x), (meas.cov_z, meas.y_z, r_z)):
        if r < n:
            est.append(estimate_noise_power(cov, r))
        else:
            est.append(estimate_noise_power_coarray(y, r, meas.s_value))
    return max(float(np.mean(est)), 0.0)


def single_pass(meas, t2, k, rank, mode_ranks, backend, informative_gamma=False,
                check=True, subspace="tucker"):
    """Step 1 plus power estimation on an (optionally cleaned) unfolding."""
    obs = type(meas.obs)(t2, meas.q, meas.m)
    g = step1_decompose(obs, k, rank=rank, s_value=meas.s_value,
                        subspace=subspace, mode_ranks=mode_ranks)
    kx, kzc = paired_generators(g, backend, informative_gamma)
    az, el = generators_to_angles(kx, kzc, check=False)
    keep = select_targets(az, el, k, meas.cross_cov, meas.geometry.positions)
    # Only the retained combinations have to be trustworthy.
    az, el = generators_to_angles(kx[keep], kzc[keep], check=check)
    if k <= 2 * meas.s_value - 1:
        px = estimate_source_powers(meas.y_x, az, meas.s_value)
    else:
        px = cross_covariance_powers(meas.cross_cov, az, el, meas.geometry.positions)
    # The cross term only sees the total power per direction on each axis, so
    # truncated fits (shared among coincident angles) are enough and stay bounded.
    rx = axis_power_fit(meas.y_x, az, meas.s_value)
    rz = axis_power_fit(meas.y_z, el, meas.s_value)
    return PassResult(az, el, px.powers, rx, rz, px.n_clipped, px.ill_conditioned)


def iterate_estimate(meas, k, mu=0.9, max_iter=20, delta=1e-5, pairing="auto",
                     rank="auto", check_generators=True, subspace="tucker"):
    """Alternate Step 1 and cross-term removal until the removed energy settles.

    The cleaned observation is always ``T - mu * H_l`` with ``T`` the original
    unfolding. ``eps_l = ||T - T_l||_F^2`` starts from ``eps_0 = 0`` and the loop
    stops once ``|eps_l - eps_{l-1}| <= delta * ||T||_F^2`` or after
    ``max_iter`` passes. Without convergence the iteration has usually
    settled into a two-state cycle; of the last two passes the one whose
    directions better explain the x/z cross-covariance is returned. If a pass
    fails after the first, the best earlier pass by the same measure is
    returned and the result is flagged ``degraded``.

    Args:
        meas: :class:`Measurements`.
        k: number of targets.
        mu: damping of the removed cross term, in ``[0, 1]``.
        max_iter: iteration cap ``L``.
        delta: relative convergence threshold.
        pairing: ``"auto"``, ``"gamma"``, ``"shared_basis"`` or
            ``"subspace_residual"``.
        rank: ``"auto"`` (Kronecker rank ``r_x * r_z``), ``"k"`` (rank ``K``)
            or an explicit integer.
        subspace: see :func:`step1_decompose`.
    """
    if not 0 <= mu <= 1:
        raise ValueError("mu must lie in [0, 1]")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    backend = resolve_backend(pairing, meas.convention)
    informative = gamma_is_informative(meas.convention, meas.geometry.n_elements)
    if rank == "auto":
        r_x, r_z = axis_ranks(meas, k)
        total = r_x * r_z
    else:
        total = k if rank == "k" else int(rank)
        r_x = r_z = min(total, meas.q - 1)
    noise = _noise_power(meas, min(r_x, k), min(r_z, k))
    t2 = meas.obs.t2
    scale = np.linalg.norm(t2) ** 2
    current = t2
    passes, history = [], []
    eps_prev = 0.0
    degraded = False
    converged = False
    for _ in range(max_iter):
        try:
            result = single_pass(meas, current, k, total, (r_x, r_z), backend,
                                 informative, check_generators, subspace)
        except (PairingError, UnreliableGeneratorError, DegenerateInputError):
            if not passes:
                raise
            degraded = True
            break
        passes.append(result)
        h = reconstruct_cross_term(result.azimuth_deg, result.elevation_deg,
                                   result.raw_powers_x, result.raw_powers_z, noise,
                                   meas.s_value, meas.q, meas.convention)
        current = t2 - mu * h
        eps = float(np.linalg.norm(t2 - current) ** 2)
        history.append(eps)
        if abs(eps - eps_prev) <= delta * scale:
            converged = True
            break
        eps_prev = eps
    last = passes[-1]
    if not converged and len(passes) >= 2 and meas.cross_cov is not None:
        # A failed pass falls back to the best earlier iterate; a capped run
        # chooses between the two states of its final cycle.
        pool = passes if degraded else passes[-2:]
        last = min(pool, key=lambda p: cross_covariance_residual(
            meas.cross_cov, meas.geometry.positions, p.azimuth_deg, p.elevation_deg))
    return DoaEstimate(
        azimuth_deg=last.azimuth_deg, elevation_deg=last.elevation_deg, powers=last.powers,
        iterations_used=len(passes), epsilon_history=tuple(history[:len(passes)]),
        pairing_backend_used=backend, axis_ranks=(r_x, r_z), noise_power=noise,
        passes=tuple(passes), degraded=degraded, n_clipped=last.n_clipped,
        ill_conditioned=last.ill_conditioned, converged=converged)


def estimate(geometry, x, z, k, q=None, dedup="average", convention="flip_all", **kwargs):
    """Convenience wrapper: snapshots in, :class:`DoaEstimate` out."""
    meas = Measurements.from_snapshots(geometry, x, z, q=q, dedup=dedup,
                                       convention=convention)
    return iterate_estimate(meas, k, **kwargs)


__all__ = [name for name in dir() if not name.startswith("_")]
