import numpy as np
import pytest

from lshaped_doa.array_model import analytic_covariance
from lshaped_doa.coarray import (CoarrayMap, coarray_pseudosnapshot, hankel_stack,
                                 identifiability_bound, noise_locator_matrix,
                                 optimal_dof_value, optimal_subarray_size, subarray_stack,
                                 unit_lag_vector)


def test_six_element_sizing():
    assert optimal_subarray_size(12) == 10
    assert identifiability_bound(10, 14) == 196


@pytest.mark.parametrize("s", range(2, 51))
def test_optimal_subarray_size_is_exhaustive_optimum(s):
    best = max(identifiability_bound(q, 2 * s - q) for q in range(2, 2 * s - 1))
    assert identifiability_bound(optimal_subarray_size(s), 2 * s - optimal_subarray_size(s)) == best
    assert optimal_dof_value(s) >= best - 1e-9


def test_pseudosnapshot_is_vandermonde(geometry, three_targets):
    scene = three_targets.replace(noise_power=0.0)
    y = coarray_pseudosnapshot(analytic_covariance(geometry, scene),
                               CoarrayMap.from_geometry(geometry))
    lags = np.arange(-11, 12)
    expected = sum(np.exp(-1j * np.pi * u * lags) for u in scene.u_x)
    assert np.allclose(y, expected)


def test_dedup_modes_agree_on_exact_covariance(geometry, three_targets):
    cmap = CoarrayMap.from_geometry(geometry)
    cov = analytic_covariance(geometry, three_targets)
    assert np.allclose(coarray_pseudosnapshot(cov, cmap, "average"),
                       coarray_pseudosnapshot(cov, cmap, "first"))
    with pytest.raises(ValueError):
        coarray_pseudosnapshot(cov, cmap, "median")


def test_unit_lag_stack_is_noise_locator():
    e = unit_lag_vector(12)
    stack = subarray_stack(e, e, 10)
    w = noise_locator_matrix(10, 14, 12)
    assert np.array_equal(stack.x_stack, w)
    assert np.allclose(w @ w.T, np.eye(10))


def test_hankel_layout():
    h = hankel_stack(np.arange(7), 3)
    assert h.shape == (3, 5)
    assert h[2, 4] == 6 and h[1, 0] == 1


def test_subarray_stack_validation():
    with pytest.raises(ValueError):
        subarray_stack(np.ones(23), np.ones(23), 23)
    with pytest.raises(ValueError):
        subarray_stack(np.ones(22), np.ones(22), 5)
    with pytest.raises(ValueError):
        identifiability_bound(1, 5)
