import numpy as np
import pytest
from hypothesis import given, strategies as st

from lshaped_doa.tensor import (KruskalModel, khatri_rao, kron, kruskal_to_dense,
                                merge_factors, reshape_modes, unfold, vec)

from conftest import crandn


def random_model(seed, shape, rank):
    rng = np.random.default_rng(seed)
    return KruskalModel(crandn(rng, rank), tuple(crandn(rng, n, rank) for n in shape))


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 3), st.integers(0, 2 ** 31))
def test_khatri_rao_columns_are_kron(i, j, r, seed):
    rng = np.random.default_rng(seed)
    a, b = crandn(rng, i, r), crandn(rng, j, r)
    kr = khatri_rao(a, b)
    for c in range(r):
        assert np.allclose(kr[:, c], np.kron(a[:, c], b[:, c]))


@given(st.integers(0, 2 ** 31))
def test_kron_mixed_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = crandn(rng, 2, 3), crandn(rng, 3, 2), crandn(rng, 3, 2), crandn(rng, 2, 4)
    assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))


@given(st.integers(0, 2 ** 31))
def test_khatri_rao_gram_identity(seed):
    rng = np.random.default_rng(seed)
    a, b = crandn(rng, 4, 3), crandn(rng, 5, 3)
    kr = khatri_rao(a, b)
    assert np.allclose(kr.conj().T @ kr, (a.conj().T @ a) * (b.conj().T @ b))


@given(st.integers(0, 2 ** 31), st.integers(1, 3))
def test_unfolding_matches_kruskal_structure(seed, rank):
    model = random_model(seed, (2, 3, 4), rank)
    t = kruskal_to_dense(model)
    a1, a2, a3 = model.factors
    expected = khatri_rao(a3, a1) * model.weights @ a2.T
    assert np.allclose(unfold(t, 1), expected)


@given(st.integers(0, 2 ** 31))
def test_merge_factors_commutes_with_reshape(seed):
    model = random_model(seed, (2, 3, 2, 3, 2), 2)
    partition = [[2, 0], [3, 1], [4]]
    dense = reshape_modes(kruskal_to_dense(model), partition)
    assert np.allclose(dense, kruskal_to_dense(merge_factors(model, partition)))


@given(st.integers(0, 2 ** 31))
def test_reshape_preserves_vec_and_norm(seed):
    t = crandn(np.random.default_rng(seed), 2, 3, 4)
    merged = reshape_modes(t, [[0, 1], [2]])
    assert np.array_equal(vec(merged), vec(t))
    assert np.linalg.norm(unfold(t, [0, 2])) == pytest.approx(np.linalg.norm(t))


def test_bad_partition_rejected():
    t = np.zeros((2, 2, 2))
    with pytest.raises(ValueError):
        reshape_modes(t, [[0], [0, 1, 2]])
    with pytest.raises(ValueError):
        reshape_modes(t, [[0, 1], []])


def test_matrix_unfolding_conventions():
    a = np.arange(6.0).reshape(2, 3)
    # Columns follow the kept mode, so keeping mode 1 of a matrix returns it.
    assert np.array_equal(unfold(a, 1), a)
    assert np.array_equal(unfold(a, 0), a.T)
    assert not np.any(unfold(np.zeros((2, 3, 4)), 2))
