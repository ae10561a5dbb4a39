"""L-shaped two-level nested array: geometry, steering, snapshots, covariances.

Element positions are integers in units of half a wavelength. Each axis holds
``N`` elements starting at the shared origin, so the physical array has
``2N - 1`` elements. Angles are configured in degrees; internally everything
is a direction cosine ``u = cos(angle)``.
"""

from dataclasses import dataclass, field

import numpy as np


def nested_positions(n_elements):
    """Two-level nested positions: ``0..N/2-1``, then ``N/2`` more at spacing ``N/2 + 1``."""
    if n_elements < 4 or n_elements % 2:
        raise ValueError(f"N must be an even count >= 4, got {n_elements}")
    half = n_elements // 2
    inner = np.arange(half)
    outer = half + (half + 1) * np.arange(half)
    positions = np.concatenate([inner, outer])
    s_value = half * (half + 1)
    if not is_hole_free(positions, s_value):
        raise AssertionError(f"nested construction for N={n_elements} has co-array holes")
    return positions


def difference_set(positions):
    positions = np.asarray(positions)
    return set((positions[:, None] - positions[None, :]).ravel().tolist())


def is_hole_free(positions, s_value):
    """True when the differences cover every lag in ``[-(S-1), S-1]``."""
    return set(range(-(s_value - 1), s_value)) <= difference_set(positions)


@dataclass(frozen=True)
class ArrayGeometry:
    n_elements: int
    positions: np.ndarray = field(repr=False)

    @classmethod
    def nested(cls, n_elements=6):
        return cls(n_elements, nested_positions(n_elements))

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=int)
        if positions.shape != (self.n_elements,):
            raise ValueError("positions must have one entry per element")
        if positions[0] != 0 or np.any(np.diff(positions) <= 0):
            raise ValueError("positions must start at 0 and be strictly ascending")
        object.__setattr__(self, "positions", positions)
        if not is_hole_free(positions, self.s_value):
            raise ValueError("co-array has holes")

    @property
    def s_value(self):
        half = self.n_elements // 2
        return half * (half + 1)

    @property
    def coarray_size(self):
        return 2 * self.s_value - 1

    @property
    def physical_elements(self):
        return 2 * self.n_elements - 1


@dataclass(frozen=True)
class Scene:
    """Ground-truth far-field targets and acquisition settings."""

    azimuth_deg: tuple
    elevation_deg: tuple
    powers: tuple = None
    noise_power: float = 1.0
    snapshots: int = 512
    seed: int = 0

    def __post_init__(self):
        az = tuple(float(a) for a in np.atleast_1d(self.azimuth_deg))
        el = tuple(float(e) for e in np.atleast_1d(self.elevation_deg))
        powers = (1.0,) * len(az) if self.powers is None else tuple(
            float(p) for p in np.atleast_1d(self.powers))
        if not len(az) == len(el) == len(powers):
            raise ValueError("azimuth, elevation and powers must have equal length")
        for a, e in zip(az, el):
            if not (0 < a < 180 and 0 < e < 180):
                raise ValueError(f"angles must lie in (0, 180) degrees, got ({a}, {e})")
        if any(p <= 0 for p in powers):
            raise ValueError("source powers must be positive")
        if len(set(zip(az, el))) != len(az):
            raise ValueError("target directions must be distinct")
        if self.noise_power < 0:
            raise ValueError("noise power must be nonnegative")
        if self.snapshots < 1:
            raise ValueError("need at least one snapshot")
        object.__setattr__(self, "azimuth_deg", az)
        object.__setattr__(self, "elevation_deg", el)
        object.__setattr__(self, "powers", powers)

    @property
    def n_targets(self):
        return len(self.azimuth_deg)

    @property
    def u_x(self):
        return np.cos(np.deg2rad(self.azimuth_deg))

    @property
    def u_z(self):
        return np.cos(np.deg2rad(self.elevation_deg))

    def with_snr(self, snr_db):
        """Copy with noise power set from per-element SNR ``10 log10(sum p / noise)``."""
        noise = sum(self.powers) / 10 ** (snr_db / 10)
        return Scene(self.azimuth_deg, self.elevation_deg, self.powers, noise,
                     self.snapshots, self.seed)

    def replace(self, **changes):
        fields = dict(azimuth_deg=self.azimuth_deg, elevation_deg=self.elevation_deg,
                      powers=self.powers, noise_power=self.noise_power,
                      snapshots=self.snapshots, seed=self.seed)
        fields.update(changes)
        return Scene(**fields)


def steering_vector(positions, u):
    """Entries ``exp(-j pi u xi_n)`` for direction cosine ``u``."""
    if abs(u) > 1:
        raise ValueError(f"direction cosine {u} outside [-1, 1]")
    return np.exp(-1j * np.pi * u * np.asarray(positions))


def steering_matrix(positions, us):
    us = np.atleast_1d(np.asarray(us, dtype=float))
    if np.any(np.abs(us) > 1):
        raise ValueError("direction cosines must lie in [-1, 1]")
    return np.exp(-1j * np.pi * np.outer(np.asarray(positions), us))


def _circular_gaussian(rng, shape, variance):
    scale = np.sqrt(np.asarray(variance) / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def simulate_snapshots(geometry, scene, rng=None):
    """Draw ``(x, z)`` snapshot matrices, each ``N x T``.

    Both axes see the same source waveforms; the noise is independent per axis.
    Without an explicit ``rng`` the draw is seeded by ``scene.seed``.
    """
    rng = np.random.default_rng(scene.seed) if rng is None else rng
    k, t = scene.n_targets, scene.snapshots
    n = geometry.n_elements
    signals = _circular_gaussian(rng, (k, t), np.asarray(scene.powers)[:, None])
    noise_x = _circular_gaussian(rng, (n, t), scene.noise_power)
    noise_z = _circular_gaussian(rng, (n, t), scene.noise_power)
    a_x = steering_matrix(geometry.positions, scene.u_x)
    a_z = steering_matrix(geometry.positions, scene.u_z)
    return a_x @ signals + noise_x, a_z @ signals + noise_z


def sample_covariance(snapshots):
    snapshots = np.asarray(snapshots, dtype=np.complex128)
    if snapshots.ndim != 2 or snapshots.shape[1] < 1:
        raise ValueError("need an N x T snapshot matrix with T >= 1")
    return snapshots @ snapshots.conj().T / snapshots.shape[1]


def sample_cross_covariance(x, z):
    """``(1/T) sum_t x(t) z(t)^H``."""
    x = np.asarray(x, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if x.shape != z.shape or x.shape[1] < 1:
        raise ValueError("x and z must be N x T with matching shapes")
    return x @ z.conj().T / x.shape[1]


def analytic_covariance(geometry, scene, axis="x"):
    """``A R_s A^H + noise * I`` for the requested axis."""
    us = {"x": scene.u_x, "z": scene.u_z}[axis]
    a = steering_matrix(geometry.positions, us)
    cov = (a * np.asarray(scene.powers)) @ a.conj().T
    return cov + scene.noise_power * np.eye(geometry.n_elements)


def analytic_cross_covariance(geometry, scene):
    """``A_x R_s A_z^H``; the axes carry independent noise."""
    a_x = steering_matrix(geometry.positions, scene.u_x)
    a_z = steering_matrix(geometry.positions, scene.u_z)
    return (a_x * np.asarray(scene.powers)) @ a_z.conj().T
