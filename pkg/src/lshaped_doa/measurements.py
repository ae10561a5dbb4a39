"""Front end shared by every estimator: covariances, co-array vectors, stacks, tensor."""

from dataclasses import dataclass

import numpy as np

from .array_model import (analytic_covariance, analytic_cross_covariance,
                          sample_covariance, sample_cross_covariance)
from .coarray import CoarrayMap, coarray_pseudosnapshot, optimal_subarray_size, subarray_stack
from .pipeline import build_observation


@dataclass(frozen=True)
class Measurements:
    geometry: object
    cov_x: np.ndarray
    cov_z: np.ndarray
    cross_cov: np.ndarray
    y_x: np.ndarray
    y_z: np.ndarray
    stack: object
    obs: object
    convention: str
    dedup: str

    @property
    def s_value(self):
        return self.geometry.s_value

    @property
    def q(self):
        return self.stack.q

    @property
    def m(self):
        return self.stack.m

    @classmethod
    def from_covariances(cls, geometry, cov_x, cov_z, cross_cov=None, q=None,
                         dedup="average", convention="flip_all"):
        cmap = CoarrayMap.from_geometry(geometry)
        y_x = coarray_pseudosnapshot(cov_x, cmap, dedup)
        y_z = coarray_pseudosnapshot(cov_z, cmap, dedup)
        q = optimal_subarray_size(geometry.s_value) if q is None else int(q)
        stack = subarray_stack(y_x, y_z, q)
        obs = build_observation(stack.x_stack, stack.z_stack, convention)
        return cls(geometry, np.asarray(cov_x), np.asarray(cov_z), cross_cov,
                   y_x, y_z, stack, obs, convention, dedup)

    @classmethod
    def from_snapshots(cls, geometry, x, z, **kwargs):
        return cls.from_covariances(geometry, sample_covariance(x), sample_covariance(z),
                                    sample_cross_covariance(x, z), **kwargs)

    @classmethod
    def analytic(cls, geometry, scene, **kwargs):
        """Exact (infinite-snapshot) measurements for ``scene``."""
        return cls.from_covariances(
            geometry, analytic_covariance(geometry, scene, "x"),
            analytic_covariance(geometry, scene, "z"),
            analytic_cross_covariance(geometry, scene), **kwargs)
