"""Dense complex matrix kernels used by every other module.

Thin, contract-checked wrappers around LAPACK (through numpy). All inputs are
promoted to complex128; tolerances are relative to Frobenius norms.
"""

import numpy as np

from .errors import NumericError

EVD_RESIDUAL_TOL = 1e-8
HERMITIAN_TOL = 1e-10


def _as_complex_matrix(a, name="a"):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    return a


def _require_finite(a, name="a"):
    if not np.all(np.isfinite(a)):
        raise NumericError(f"{name} contains non-finite entries")


def tsvd(a, k):
    """Truncated SVD returning the ``k`` dominant singular triplets.

    Args:
        a: ``m x n`` matrix.
        k: number of triplets, ``1 <= k <= min(m, n)``.

    Returns:
        ``(u, s, v)`` with ``u`` of shape ``(m, k)``, ``s`` nonnegative and
        descending, ``v`` of shape ``(n, k)``, so that ``u @ diag(s) @ v^H``
        is the best rank-``k`` Frobenius approximation of ``a``.
    """
    a = _as_complex_matrix(a)
    m, n = a.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"rank k={k} outside [1, {min(m, n)}]")
    _require_finite(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc
    return u[:, :k], s[:k], vh[:k].conj().T


def evd_general(a):
    """Eigen-decomposition of a general square matrix.

    No ordering of the eigenvalues is promised. Callers that pair eigenvalues
    across decompositions must carry indices explicitly.

    Returns:
        ``(eigenvalues, eigenvectors)`` with ``a @ v[:, i] ~= w[i] * v[:, i]``.
    """
    a = _as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    _require_finite(a)
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        # LAPACK's QR iteration budget is 30 sweeps per eigenvalue.
        raise NumericError(f"eigen-decomposition did not converge: {exc}",
                           iterations=30 * a.shape[0]) from exc
    scale = np.linalg.norm(a)
    if scale > 0:
        residual = np.linalg.norm(a @ v - v * w, axis=0)
        if np.any(residual > EVD_RESIDUAL_TOL * scale):
            raise NumericError(
                f"eigenpair residual {residual.max():.3e} exceeds tolerance")
    return w, v


def lstsq(a, b, rcond=None):
    """Minimum-norm least-squares solution of ``a @ x = b``.

    This is the pseudo-inverse product ``pinv(a) @ b``. A 1-D ``b`` gives a
    1-D result. Singular values below ``rcond * s_max`` are treated as zero
    (``None`` keeps numpy's machine-precision cutoff).
    """
    a = _as_complex_matrix(a)
    b = np.asarray(b, dtype=np.complex128)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    if b.ndim != 2 or b.shape[0] != a.shape[0]:
        raise ValueError(f"dimension mismatch: a {a.shape}, b {b.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("a must have at least one row and one column")
    _require_finite(a)
    _require_finite(b, "b")
    x = np.linalg.lstsq(a, b, rcond=rcond)[0]
    return x[:, 0] if vector else x


def eigh_ascending(a):
    """Real eigenvalues of a Hermitian matrix, sorted ascending.

    The input is symmetrized before decomposition; a departure from Hermitian
    symmetry larger than ``1e-10 * ||a||_F`` is rejected.
    """
    a = _as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    _require_finite(a)
    skew = np.linalg.norm(a - a.conj().T)
    if skew > HERMITIAN_TOL * max(np.linalg.norm(a), np.finfo(float).tiny):
        raise ValueError(f"matrix is not Hermitian (skew norm {skew:.3e})")
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))
