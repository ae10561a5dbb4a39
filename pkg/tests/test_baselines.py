import numpy as np
import pytest

from lshaped_doa.array_model import Scene
from lshaped_doa.baselines import (als_cpd, als_estimate, pair_by_cross_covariance,
                                   ss_subspace_estimate)
from lshaped_doa.measurements import Measurements
from lshaped_doa.tensor import KruskalModel, kruskal_to_dense

from conftest import crandn


def test_ss_noiseless_exact(geometry):
    scene = Scene((15.0, 25.0, 35.0), (50.0, 40.0, 30.0), noise_power=0.0)
    res = ss_subspace_estimate(Measurements.analytic(geometry, scene), 3)
    order = np.argsort(res.azimuth_deg)
    assert np.allclose(res.azimuth_deg[order], [15, 25, 35], atol=1e-6)
    assert np.allclose(res.elevation_deg[order], [50, 40, 30], atol=1e-6)


def test_ss_rejects_more_targets_than_its_bound(geometry):
    grid = Scene(tuple(np.repeat([10.0, 20.0, 30.0, 40.0, 50.0, 60.0], 6)),
                 tuple(np.tile([5.0, 15.0, 25.0, 35.0, 45.0, 55.0], 6)), noise_power=0.0)
    with pytest.raises(ValueError):
        ss_subspace_estimate(Measurements.analytic(geometry, grid), 36)


def test_cross_covariance_pairing_recovers_permutation(geometry):
    scene = Scene((15.0, 25.0, 35.0), (50.0, 40.0, 30.0), noise_power=0.0)
    meas = Measurements.analytic(geometry, scene)
    elevations = np.array([30.0, 50.0, 40.0])
    perm = pair_by_cross_covariance(np.array([15.0, 25.0, 35.0]), elevations,
                                    meas.cross_cov, geometry.positions)
    assert elevations[perm].tolist() == [50.0, 40.0, 30.0]


def test_als_single_target_exact(geometry):
    scene = Scene((40.0,), (70.0,), noise_power=0.0)
    res = als_estimate(Measurements.analytic(geometry, scene), 1, rng=np.random.default_rng(0))
    assert res.azimuth_deg[0] == pytest.approx(40.0, abs=1e-6)
    assert res.elevation_deg[0] == pytest.approx(70.0, abs=1e-6)


def test_als_objective_is_monotone_and_fits_exact_tensor():
    rng = np.random.default_rng(5)
    model = KruskalModel(np.ones(2), (crandn(rng, 4, 2), crandn(rng, 5, 2), crandn(rng, 3, 2)))
    fit = als_cpd(kruskal_to_dense(model), 2, max_iters=500, tol=1e-14,
                  restarts=2, rng=np.random.default_rng(1))
    hist = np.array(fit.objective_history)
    assert np.all(np.diff(hist) <= 1e-9 * hist[:-1] + 1e-12)
    assert hist[-1] < 1e-12 * np.linalg.norm(kruskal_to_dense(model)) ** 2


def test_als_rank_validation():
    with pytest.raises(ValueError):
        als_cpd(np.zeros((2, 2, 2)), 5)
    with pytest.raises(ValueError):
        als_cpd(np.zeros((2, 2)), 1)
