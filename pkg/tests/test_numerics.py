import numpy as np
import pytest
from hypothesis import given, strategies as st

from lshaped_doa.errors import NumericError
from lshaped_doa.numerics import eigh_ascending, evd_general, lstsq, tsvd

from conftest import crandn


@given(st.integers(2, 7), st.integers(2, 7), st.integers(0, 2 ** 31))
def test_tsvd_best_approximation(m, n, seed):
    a = crandn(np.random.default_rng(seed), m, n)
    k = min(m, n) - 1
    u, s, v = tsvd(a, k)
    assert np.all(np.diff(s) <= 1e-12)
    full = np.linalg.svd(a, compute_uv=False)
    err = np.linalg.norm(a - (u * s) @ v.conj().T)
    assert err == pytest.approx(np.sqrt(np.sum(full[k:] ** 2)), rel=1e-9, abs=1e-12)


def test_tsvd_rejects_bad_rank_and_nan():
    with pytest.raises(ValueError):
        tsvd(np.eye(3), 4)
    with pytest.raises(NumericError):
        tsvd(np.array([[np.nan, 1.0], [0.0, 1.0]]), 1)


@given(st.integers(1, 6), st.integers(0, 2 ** 31))
def test_evd_residual(n, seed):
    a = crandn(np.random.default_rng(seed), n, n)
    w, v = evd_general(a)
    assert np.allclose(a @ v, v * w, atol=1e-9 * np.linalg.norm(a))


def test_lstsq_matches_pinv():
    rng = np.random.default_rng(1)
    a, b = crandn(rng, 7, 3), crandn(rng, 7)
    assert np.allclose(lstsq(a, b), np.linalg.pinv(a) @ b)
    # Rank-deficient case gives the minimum-norm solution.
    a[:, 2] = a[:, 0]
    assert np.allclose(lstsq(a, b), np.linalg.pinv(a) @ b)


def test_eigh_ascending_checks_symmetry():
    h = np.array([[2.0, 1j], [-1j, 1.0]])
    assert np.all(np.diff(eigh_ascending(h)) >= 0)
    with pytest.raises(ValueError):
        eigh_ascending(np.array([[1.0, 2.0], [0.0, 1.0]]))
