import numpy as np
import pytest
from hypothesis import given, strategies as st

from lshaped_doa.array_model import simulate_snapshots
from lshaped_doa.coarray import noise_locator_matrix
from lshaped_doa.estimator import reconstruct_cross_term, signal_stack
from lshaped_doa.measurements import Measurements
from lshaped_doa.pipeline import (conjugate_symmetric_stack, contract_and_unfold, cross_outer,
                                  order3_tensor)

from conftest import crandn


@pytest.fixture(scope="module")
def noisy(geometry, three_targets):
    scene = three_targets.with_snr(0.0)
    x, z = simulate_snapshots(geometry, scene, np.random.default_rng(11))
    return Measurements.from_snapshots(geometry, x, z)


def _stack(meas):
    x, z = meas.stack.x_stack, meas.stack.z_stack
    return conjugate_symmetric_stack(cross_outer(x, z), cross_outer(z, x))


def test_second_slab_is_reversed_conjugate(noisy):
    stack = _stack(noisy)
    slab1, slab2 = stack[..., 0], stack[..., 1]
    assert np.array_equal(slab2, np.flip(slab1.conj()))


def test_unfolding_preserves_norm(noisy):
    stack = _stack(noisy)
    assert np.linalg.norm(noisy.obs.t2) == pytest.approx(np.linalg.norm(stack), rel=1e-13)
    assert noisy.obs.t2.shape == (200, 196)


def test_order3_round_trip(noisy):
    t3 = order3_tensor(noisy.obs)
    assert t3.shape == (100, 196, 2)
    assert np.array_equal(t3.transpose(0, 2, 1).reshape(200, 196), noisy.obs.t2)


@given(st.integers(0, 2 ** 31))
def test_cross_outer_entries(seed):
    rng = np.random.default_rng(seed)
    a, b = crandn(rng, 3, 4), crandn(rng, 3, 4)
    r = cross_outer(a, b)
    assert r[1, 2, 0, 3] == pytest.approx(a[1, 2] * np.conj(b[0, 3]))


def test_additive_split_on_analytic_inputs(geometry, three_targets):
    scene = three_targets.with_snr(3.0)
    s, q = geometry.s_value, 10
    full = Measurements.analytic(geometry, scene, q=q).obs.t2
    clean = Measurements.analytic(geometry, scene.replace(noise_power=0.0), q=q).obs.t2
    powers = np.asarray(scene.powers)
    assert np.allclose(signal_stack(scene.azimuth_deg, powers, s, q),
                       Measurements.analytic(geometry, scene.replace(noise_power=0.0),
                                             q=q).stack.x_stack)
    cross = reconstruct_cross_term(scene.azimuth_deg, scene.elevation_deg, powers, powers,
                                   scene.noise_power, s, q)
    w = noise_locator_matrix(q, 2 * s - q, s)
    noise = scene.noise_power ** 2 * contract_and_unfold(
        conjugate_symmetric_stack(cross_outer(w, w), cross_outer(w, w))).t2
    assert np.max(np.abs(full - (clean + cross + noise))) <= 1e-10 * np.max(np.abs(full))


def test_conventions_and_shapes_validated(noisy):
    x = noisy.stack.x_stack
    with pytest.raises(ValueError):
        conjugate_symmetric_stack(cross_outer(x, x), cross_outer(x, x), "flip_none")
    with pytest.raises(ValueError):
        cross_outer(x, x[:, :3])
    with pytest.raises(ValueError):
        contract_and_unfold(np.zeros((2, 3, 2, 3)))
