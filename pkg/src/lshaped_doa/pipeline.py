"""Cross-correlation tensors, the conjugate-symmetric order-5 stack and its unfolding.

Stack layout is ``(x_row, x_shift, z_row, z_shift, g)`` with shape
``(Q, M, Q, M, 2)``. The unfolded observation ``t2`` has ``2 Q^2`` rows indexed
``(q_x * Q + q_z) * 2 + g`` (x slowest, g fastest) and ``M^2`` columns indexed
``m_x * M + m_z``, matching the Kronecker row convention of :mod:`.tensor`.
"""

from dataclasses import dataclass

import numpy as np

from .tensor import reshape_modes, unfold

SLAB_CONVENTIONS = ("flip_all", "flip_steering", "flip_shift")


@dataclass(frozen=True)
class UnfoldedObservation:
    t2: np.ndarray
    q: int
    m: int

    def __post_init__(self):
        if self.t2.shape != (2 * self.q ** 2, self.m ** 2):
            raise ValueError(f"t2 shape {self.t2.shape} inconsistent with Q={self.q}, M={self.m}")
        if not np.all(np.isfinite(self.t2)):
            raise ValueError("t2 has non-finite entries")


def cross_outer(a, b):
    """Order-4 outer product ``a o conj(b)``: entry ``a[i, j] * conj(b[k, l])``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return np.einsum("ij,kl->ijkl", a, b.conj())


def conjugate_symmetric_stack(r_xz, r_zx, convention="flip_all"):
    """Concatenate ``r_xz`` and the index-reversed ``r_zx`` along a new size-2 mode.

    ``r_zx`` is ordered ``(z_row, z_shift, x_row, x_shift)`` as produced by
    ``cross_outer(z_stack, x_stack)``. It is permuted to x-first, then reversed
    along every mode (``flip_all``), only the steering modes
    (``flip_steering``) or only the shift modes (``flip_shift``).
    """
    r_xz = np.asarray(r_xz)
    r_zx = np.asarray(r_zx)
    if r_xz.ndim != 4 or r_xz.shape != r_zx.shape or r_xz.shape[:2] != r_xz.shape[2:]:
        raise ValueError(f"expected matching (Q, M, Q, M) tensors, got {r_xz.shape}, {r_zx.shape}")
    if convention not in SLAB_CONVENTIONS:
        raise ValueError(f"convention must be one of {SLAB_CONVENTIONS}")
    slab2 = r_zx.transpose(2, 3, 0, 1)
    flip = {"flip_all": (0, 1, 2, 3), "flip_steering": (0, 2), "flip_shift": (1, 3)}
    slab2 = np.flip(slab2, axis=flip[convention])
    return np.stack([r_xz, slab2], axis=-1)


def contract_and_unfold(stack):
    """Merge ``{x_row, z_row}`` and ``{x_shift, z_shift}`` and unfold on the shift mode."""
    stack = np.asarray(stack)
    q, m = stack.shape[0], stack.shape[1]
    if stack.shape != (q, m, q, m, 2):
        raise ValueError(f"stack shape {stack.shape} is not (Q, M, Q, M, 2)")
    # Modes 0..4 = (x_row, x_shift, z_row, z_shift, g); first-listed is fastest.
    order3 = reshape_modes(stack, [[2, 0], [3, 1], [4]])
    t2 = unfold(order3, kept=[1], rows=[2, 0])
    return UnfoldedObservation(np.ascontiguousarray(t2), q, m)


def order3_tensor(obs):
    """The ``(Q^2, M^2, 2)`` order-3 tensor whose mode-2 unfolding is ``obs.t2``."""
    q2, m2 = obs.q ** 2, obs.m ** 2
    return obs.t2.reshape(q2, 2, m2).transpose(0, 2, 1)


def build_observation(x_stack, z_stack, convention="flip_all"):
    """Full pipeline from subarray stacks to the unfolded observation."""
    r_xz = cross_outer(x_stack, z_stack)
    r_zx = cross_outer(z_stack, x_stack)
    return contract_and_unfold(conjugate_symmetric_stack(r_xz, r_zx, convention))
