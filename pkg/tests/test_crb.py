import numpy as np
import pytest
from hypothesis import given, strategies as st

from lshaped_doa.array_model import Scene
from lshaped_doa.crb import (covariance_kernel, crb_matrix, kron_apply,
                             model_vector_and_jacobian)
from lshaped_doa.errors import CrbRankError

from conftest import crandn

SCENE = Scene((15.0, 25.0, 35.0), (50.0, 40.0, 30.0)).with_snr(10.0)


def test_jacobian_matches_central_differences(geometry):
    _, jac = model_vector_and_jacobian(geometry, SCENE)
    h = 1e-6
    params = [("azimuth_deg", i) for i in range(3)] + [("elevation_deg", i) for i in range(3)] \
        + [("powers", i) for i in range(3)]
    for col, (name, i) in enumerate(params):
        step = np.rad2deg(h) if name != "powers" else h
        vals = []
        for sign in (1, -1):
            v = list(getattr(SCENE, name))
            v[i] += sign * step
            vals.append(model_vector_and_jacobian(geometry, SCENE.replace(**{name: tuple(v)}))[0])
        fd = (vals[0] - vals[1]) / (2 * h)
        assert np.linalg.norm(fd - jac[:, col]) <= 1e-6 * np.linalg.norm(jac[:, col])


def test_crb_symmetric_psd_and_scales_with_snapshots(geometry):
    rep = crb_matrix(geometry, SCENE)
    c = rep.crb_matrix
    assert c.shape == (6, 6)
    assert np.allclose(c, c.T, rtol=1e-10, atol=0)
    assert np.min(np.linalg.eigvalsh(0.5 * (c + c.T))) >= 0
    double = crb_matrix(geometry, SCENE.replace(snapshots=2 * SCENE.snapshots)).crb_matrix
    assert np.allclose(double, c / 2, rtol=1e-10)


def test_kernel_is_hermitian_positive_definite(geometry):
    kernel, eps = covariance_kernel(geometry, SCENE)[:2]
    assert np.allclose(kernel, kernel.conj().T)
    assert np.min(np.linalg.eigvalsh(kernel)) > 0 and eps > 0


@given(st.integers(0, 2 ** 31))
def test_kron_apply_matches_kron(seed):
    rng = np.random.default_rng(seed)
    a, b, v = crandn(rng, 3, 4), crandn(rng, 2, 5), crandn(rng, 20, 3)
    assert np.allclose(kron_apply(a, b, v), np.kron(a, b) @ v)
    assert np.allclose(kron_apply(a, b, v[:, 0]), np.kron(a, b) @ v[:, 0])


def test_duplicate_directions_are_singular(geometry):
    scene = Scene((20.0, 20.0), (40.0, 40.0 + 1e-9))
    with pytest.raises(CrbRankError):
        crb_matrix(geometry, scene)
