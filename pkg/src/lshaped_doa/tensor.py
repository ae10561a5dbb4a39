"""Dense complex tensors: Kruskal evaluation, mode reshaping, unfolding, KR/Kronecker.

Tensors are plain ``numpy.ndarray`` objects indexed ``t[i1, ..., iN]``. The
vectorization ``vec(t)`` enumerates mode 1 fastest (Fortran order); this single
convention defines ``reshape_modes`` and ``unfold``. Modes are 0-based.

Kronecker and Khatri-Rao products use the ``numpy.kron`` row order: row index
``i * J + j`` for operands of ``I`` and ``J`` rows, i.e. the second operand
varies fastest. Under the vec convention above, merging modes ``[a, b]`` (``a``
fastest) therefore corresponds to the KR product ``A_b (.) A_a``.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np


@dataclass(frozen=True)
class KruskalModel:
    """``sum_k weights[k] * factors[0][:, k] o factors[1][:, k] o ...``."""

    weights: np.ndarray
    factors: tuple

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.complex128).reshape(-1)
        factors = tuple(np.asarray(f, dtype=np.complex128) for f in self.factors)
        if not factors:
            raise ValueError("a Kruskal model needs at least one factor")
        for n, f in enumerate(factors):
            if f.ndim != 2 or f.shape[1] != weights.size:
                raise ValueError(
                    f"factor {n} has shape {f.shape}, expected (I, {weights.size})")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "factors", factors)

    @property
    def rank(self):
        return self.weights.size

    @property
    def shape(self):
        return tuple(f.shape[0] for f in self.factors)


def kruskal_to_dense(model):
    """Evaluate a Kruskal model entrywise into a dense tensor."""
    letters = "abcdefghijklmnopqrstuvwxy"
    order = len(model.factors)
    if order > len(letters):
        raise ValueError(f"order {order} not supported")
    spec = ",".join(f"{letters[n]}z" for n in range(order))
    return np.einsum(f"z,{spec}->{letters[:order]}", model.weights, *model.factors)


def vec(t):
    """Vectorize with mode 1 varying fastest."""
    return np.asarray(t).reshape(-1, order="F")


def _check_partition(partition, order):
    flat = [m for group in partition for m in group]
    if any(len(group) == 0 for group in partition):
        raise ValueError("partition contains an empty subset")
    if sorted(flat) != list(range(order)):
        raise ValueError(f"{partition} is not a partition of modes 0..{order - 1}")
    return flat


def reshape_modes(t, partition):
    """Merge groups of modes into single modes.

    Args:
        t: dense tensor.
        partition: ordered list of mode groups covering every mode exactly
            once. Within a group the first-listed mode varies fastest.

    Returns:
        Tensor with one mode per group whose vec equals vec of ``t`` after its
        modes are permuted into the concatenated partition order.
    """
    t = np.asarray(t)
    flat = _check_partition(partition, t.ndim)
    shape = tuple(int(np.prod([t.shape[m] for m in group])) for group in partition)
    return np.transpose(t, flat).reshape(shape, order="F")


def unfold(t, kept, rows=None):
    """Matricize ``t``: ``rows`` modes index rows, ``kept`` modes index columns.

    Both groups are ordered with the first-listed mode varying fastest.
    ``rows`` defaults to the complementary modes in ascending order, which for
    a Kruskal tensor yields ``(A_N (.) ... (.) A_1) diag(w) A_kept^T``.
    """
    t = np.asarray(t)
    kept = [kept] if np.isscalar(kept) else list(kept)
    if rows is None:
        rows = [m for m in range(t.ndim) if m not in kept]
    return reshape_modes(t, [list(rows), kept])


def khatri_rao(a, b):
    """Column-wise Kronecker product; column k is ``kron(a[:, k], b[:, k])``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError(f"column mismatch: {a.shape} vs {b.shape}")
    return (a[:, None, :] * b[None, :, :]).reshape(a.shape[0] * b.shape[0], a.shape[1])


def kron(a, b):
    return np.kron(a, b)


def merge_factors(model, partition):
    """Kruskal model of ``reshape_modes(kruskal_to_dense(model), partition)``."""
    _check_partition(partition, len(model.factors))
    merged = []
    for group in partition:
        # First-listed mode fastest, so it is the last KR operand.
        merged.append(reduce(khatri_rao, [model.factors[m] for m in reversed(group)]))
    return KruskalModel(model.weights, tuple(merged))
