import numpy as np
import pytest
from hypothesis import given, strategies as st

from lshaped_doa.array_model import Scene, simulate_snapshots
from lshaped_doa.errors import UnreliableGeneratorError
from lshaped_doa.estimator import (axis_ranks, estimate, estimate_noise_power,
                                   estimate_source_powers, generators_to_angles,
                                   iterate_estimate, resolve_backend, step1_decompose)
from lshaped_doa.measurements import Measurements


def _sorted(est):
    order = np.argsort(est.azimuth_deg)
    return est.azimuth_deg[order], est.elevation_deg[order], est.powers[order]


@pytest.mark.parametrize("pairing", ["auto", "shared_basis", "residual"])
def test_noiseless_recovery_is_exact(geometry, pairing):
    scene = Scene((10.0, 20.0, 30.0), (45.0, 40.0, 35.0), (1.0, 2.0, 0.5), noise_power=0.0)
    est = iterate_estimate(Measurements.analytic(geometry, scene), 3, pairing=pairing)
    az, el, p = _sorted(est)
    assert np.allclose(az, [10, 20, 30], atol=1e-6)
    assert np.allclose(el, [45, 40, 35], atol=1e-6)
    assert np.allclose(p, [1.0, 2.0, 0.5], rtol=1e-8)
    assert est.iterations_used == 1


@given(st.lists(st.floats(20, 160), min_size=2, max_size=4, unique=True),
       st.integers(0, 2 ** 31))
def test_noiseless_random_scenes(geometry, azimuths, seed):
    rng = np.random.default_rng(seed)
    az = np.array(azimuths)
    el = rng.uniform(20, 160, az.size)
    if np.min(np.diff(np.sort(np.cos(np.deg2rad(az))))) < 0.05 or \
            np.min(np.diff(np.sort(np.cos(np.deg2rad(el))))) < 0.05:
        return
    scene = Scene(tuple(az), tuple(el), noise_power=0.0)
    est = iterate_estimate(Measurements.analytic(geometry, scene), az.size)
    order = np.argsort(est.azimuth_deg)
    truth = np.argsort(az)
    assert np.allclose(est.azimuth_deg[order], az[truth], atol=1e-6)
    assert np.allclose(est.elevation_deg[order], el[truth], atol=1e-6)


def test_mu_zero_equals_step_one(geometry, three_targets):
    scene = three_targets.with_snr(5.0)
    x, z = simulate_snapshots(geometry, scene, np.random.default_rng(4))
    meas = Measurements.from_snapshots(geometry, x, z)
    est = iterate_estimate(meas, 3, mu=0.0)
    assert np.array_equal(est.azimuth_deg, est.first_pass.azimuth_deg)
    assert np.array_equal(est.elevation_deg, est.first_pass.elevation_deg)


def test_iteration_history(geometry):
    scene = Scene((15.0, 25.0, 35.0), (50.0, 40.0, 30.0)).with_snr(10.0)
    x, z = simulate_snapshots(geometry, scene, np.random.default_rng(2))
    est = estimate(geometry, x, z, 3, max_iter=20)
    assert 1 <= est.iterations_used <= 20
    assert len(est.epsilon_history) == est.iterations_used
    assert all(e >= 0 for e in est.epsilon_history)
    capped = estimate(geometry, x, z, 3, max_iter=1)
    assert capped.iterations_used == 1


def test_unconverged_run_returns_one_of_the_last_two_passes(geometry):
    scene = Scene((15.0, 25.0, 35.0), (50.0, 40.0, 30.0)).with_snr(0.0)
    x, z = simulate_snapshots(geometry, scene, np.random.default_rng(8))
    est = estimate(geometry, x, z, 3, max_iter=3, delta=0.0)
    assert not est.converged and est.iterations_used == 3
    assert any(np.array_equal(est.azimuth_deg, p.azimuth_deg) for p in est.passes[-2:])


def test_invalid_arguments(geometry, three_targets):
    meas = Measurements.analytic(geometry, three_targets)
    with pytest.raises(ValueError):
        iterate_estimate(meas, 3, mu=1.5)
    with pytest.raises(ValueError):
        iterate_estimate(meas, 3, max_iter=0)
    with pytest.raises(ValueError):
        iterate_estimate(meas, 3, pairing="magic")
    with pytest.raises(ValueError):
        step1_decompose(meas.obs, 197)


def test_generator_magnitude_check():
    az, el = generators_to_angles(np.exp(-1j * np.pi * 0.5), np.exp(1j * np.pi * 0.2))
    assert az[0] == pytest.approx(60.0) and el[0] == pytest.approx(np.rad2deg(np.arccos(0.2)))
    with pytest.raises(UnreliableGeneratorError):
        generators_to_angles(np.array([3.0 + 0j]), np.array([1.0 + 0j]))


def test_auto_backend_resolution():
    assert resolve_backend("auto", "flip_all") == "subspace_residual"
    assert resolve_backend("residual", "flip_all") == "subspace_residual"
    # The symmetry generator is identically one, so it cannot pair anything.
    with pytest.raises(ValueError):
        resolve_backend("gamma", "flip_all")


def test_power_and_noise_helpers(geometry, three_targets):
    meas = Measurements.analytic(geometry, three_targets.replace(noise_power=0.25))
    assert estimate_noise_power(meas.cov_x, 3) == pytest.approx(0.25)
    fit = estimate_source_powers(meas.y_x - 0.25 * (np.arange(23) == 11), (10, 20, 30), 12)
    assert np.allclose(fit.powers, 1.0)
    with pytest.raises(ValueError):
        estimate_source_powers(meas.y_x, np.linspace(1, 170, 24), 12)


def test_grid_ranks(geometry):
    scene = Scene(tuple(np.repeat([10.0, 20.0, 30.0, 40.0, 50.0, 60.0], 6)),
                  tuple(np.tile([5.0, 15.0, 25.0, 35.0, 45.0, 55.0], 6)), noise_power=0.0)
    assert axis_ranks(Measurements.analytic(geometry, scene), 36) == (6, 6)
