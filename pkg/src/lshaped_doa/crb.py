"""Cramer-Rao bound for the angles under the tensor observation model.

The model vector stacks every entry of the noise-free order-5 cross tensor:
``r = sum_k p_k^2 c_x(theta_k) kron conj(c_z(phi_k))`` where ``c(.)`` is the
steering/shift/symmetry signature ``a^(1) kron k kron g`` of one axis. The
Slepian-Bangs bound is formed with a kernel ``R^T kron R`` that is never
materialized: ``(A kron B) vec(V)`` is evaluated as ``A V B^T`` on the
``nA x nB`` reshaping of the vector.
"""

from dataclasses import dataclass, field

import numpy as np

from .coarray import optimal_subarray_size
from .errors import CrbRankError

RANK_TOL = 1e-12


@dataclass(frozen=True)
class CrbReport:
    """Angle block of the bound (degrees squared) plus bookkeeping.

    ``psi`` labels the full parameter vector ``(theta_1..K, phi_1..K, p_1..K)``;
    ``crb_matrix`` is the ``2K x 2K`` angle block in that order.
    """

    psi: tuple
    crb_matrix: np.ndarray
    epsilon: float
    snapshots: int
    fim: np.ndarray = field(repr=False, default=None)

    @property
    def std_deg(self):
        return np.sqrt(np.clip(np.diag(self.crb_matrix), 0, None))

    def axis_mean(self, axis):
        """Average bound over targets for ``"azimuth"`` or ``"elevation"``."""
        k = self.crb_matrix.shape[0] // 2
        diag = np.diag(self.crb_matrix)
        return float(np.mean(diag[:k] if axis == "azimuth" else diag[k:]))


def _exponents(q, m, s_value):
    # Phase multiplier e of cos(angle) for each (row, shift, slab) entry.
    rows = np.arange(q) - s_value + 1
    shifts = np.arange(m)
    slabs = np.array([0, -2 * s_value])
    return (rows[:, None, None] + shifts[None, :, None] + slabs[None, None, :]).ravel()


def signature(angle_rad, q, m, s_value):
    """``c(angle)`` and its derivative with respect to the angle (radians)."""
    e = _exponents(q, m, s_value)
    c = np.exp(-1j * np.pi * np.cos(angle_rad) * e)
    return c, 1j * np.pi * np.sin(angle_rad) * e * c


def kron_apply(a, b, v):
    """``(a kron b) @ v`` without forming the Kronecker product (``v`` may be 2-D)."""
    v = np.asarray(v)
    cols = v.reshape(a.shape[1], b.shape[1], -1)
    tmp = np.tensordot(a, cols, axes=(1, 0))  # (ia, jb, n)
    out = np.tensordot(tmp, b, axes=(1, 1))   # (ia, n, lb)
    return out.transpose(0, 2, 1).reshape(a.shape[0] * b.shape[0], *v.shape[1:])


def model_vector_and_jacobian(geometry, scene, q=None):
    """Model vector ``r`` (length ``4 Q^2 M^2``) and its ``4Q^2M^2 x 3K`` Jacobian.

    Columns are ordered ``theta_1..K, phi_1..K, p_1..K`` with angles in radians.
    """
    s = geometry.s_value
    q = optimal_subarray_size(s) if q is None else q
    m = 2 * s - q
    theta = np.deg2rad(scene.azimuth_deg)
    phi = np.deg2rad(scene.elevation_deg)
    p = np.asarray(scene.powers)
    k = len(theta)
    n = (2 * q * m) ** 2
    r = np.zeros(n, dtype=np.complex128)
    jac = np.zeros((n, 3 * k), dtype=np.complex128)
    for i in range(k):
        cx, dcx = signature(theta[i], q, m, s)
        cz, dcz = signature(phi[i], q, m, s)
        base = np.kron(cx, cz.conj())
        r += p[i] ** 2 * base
        jac[:, i] = p[i] ** 2 * np.kron(dcx, cz.conj())
        jac[:, k + i] = p[i] ** 2 * np.kron(cx, dcz.conj())
        jac[:, 2 * k + i] = 2 * p[i] * base
    return r, jac


def covariance_kernel(geometry, scene, q=None, include_noise=True, epsilon=None):
    """Hermitian positive-definite ``2QM x 2QM`` kernel ``R`` and the ridge used.

    ``R = |R_sig| (+ noise^2 I) + eps I`` with ``R_sig = sum_k p_k^2 c_x c_z^H``
    and ``|.|`` the positive polar factor ``(R_sig R_sig^H)^(1/2)``.
    """
    s = geometry.s_value
    q = optimal_subarray_size(s) if q is None else q
    m = 2 * s - q
    dim = 2 * q * m
    r_sig = np.zeros((dim, dim), dtype=np.complex128)
    for th, ph, p in zip(np.deg2rad(scene.azimuth_deg), np.deg2rad(scene.elevation_deg),
                         scene.powers):
        cx = signature(th, q, m, s)[0]
        cz = signature(ph, q, m, s)[0]
        r_sig += p ** 2 * np.outer(cx, cz.conj())
    u, sv, _ = np.linalg.svd(r_sig)
    kernel = (u * sv) @ u.conj().T
    if include_noise:
        kernel += scene.noise_power ** 2 * np.eye(dim)
    if epsilon is None:
        epsilon = 1e-10 * np.trace(kernel).real / dim
    kernel += epsilon * np.eye(dim)
    return 0.5 * (kernel + kernel.conj().T), float(epsilon)


def _inverse_sqrt(h):
    w, v = np.linalg.eigh(h)
    return (v / np.sqrt(w)) @ v.conj().T


def crb_matrix(geometry, scene, q=None, include_noise=True, epsilon=None):
    """Slepian-Bangs bound ``(1/T) Re(J1^H P_perp(J2) J1)^-1`` on the angles.

    ``J1`` holds the whitened angle derivatives, ``J2`` the whitened power
    derivatives (nuisance). The angle block is returned in degrees squared.

    Raises:
        CrbRankError: if the reduced information matrix is singular.
    """
    _, jac = model_vector_and_jacobian(geometry, scene, q)
    kernel, eps = covariance_kernel(geometry, scene, q, include_noise, epsilon)
    w = _inverse_sqrt(kernel)
    whitened = kron_apply(w.T, w, jac)
    k = scene.n_targets
    j1, j2 = whitened[:, :2 * k], whitened[:, 2 * k:]
    qj, _ = np.linalg.qr(j2)
    j1_perp = j1 - qj @ (qj.conj().T @ j1)
    fim = (j1.conj().T @ j1_perp).real
    fim = 0.5 * (fim + fim.T)
    vals, vecs = np.linalg.eigh(fim)
    if vals[0] <= RANK_TOL * max(vals[-1], np.finfo(float).tiny):
        names = [f"theta_{i + 1}" for i in range(k)] + [f"phi_{i + 1}" for i in range(k)]
        weak = np.abs(vecs[:, 0]) > 0.1
        raise CrbRankError(f"information matrix is singular along {np.array(names)[weak].tolist()}",
                           [n for n, flag in zip(names, weak) if flag])
    crb = np.linalg.inv(fim) / scene.snapshots * np.rad2deg(1.0) ** 2
    psi = tuple([f"theta_{i + 1}" for i in range(k)] + [f"phi_{i + 1}" for i in range(k)]
                + [f"p_{i + 1}" for i in range(k)])
    return CrbReport(psi, 0.5 * (crb + crb.T), eps, scene.snapshots, fim)
