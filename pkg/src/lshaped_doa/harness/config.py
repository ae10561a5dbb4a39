"""Experiment configuration loaded from JSON."""

import dataclasses
import itertools
import json
from dataclasses import dataclass

from ..array_model import Scene

SWEEP_AXES = ("snr_db", "mu", "max_iter", "none")
METHODS = ("proposed", "ss", "als")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    With ``grid=True`` the targets are every (azimuth, elevation) combination
    of the two lists; otherwise the lists are zipped. ``snr_db`` is the fixed
    per-element SNR for sweeps over estimator settings.
    """

    name: str = "experiment"
    n_elements: int = 6
    azimuth_deg: tuple = (10.0, 20.0, 30.0)
    elevation_deg: tuple = (45.0, 40.0, 35.0)
    powers: tuple = None
    grid: bool = False
    sweep: str = "snr_db"
    sweep_values: tuple = (0.0,)
    snr_db: float = 0.0
    trials: int = 100
    snapshots: int = 512
    k: int = None
    mu: float = 0.9
    max_iter: int = 20
    delta: float = 1e-5
    q: int = None
    pairing: str = "auto"
    dedup: str = "average"
    convention: str = "flip_all"
    subspace: str = "tucker"
    methods: tuple = ("proposed",)
    als_restarts: int = 5
    als_max_iters: int = 1000
    seed: int = 0
    out: str = None

    def __post_init__(self):
        for name in ("azimuth_deg", "elevation_deg", "sweep_values", "methods"):
            value = getattr(self, name)
            if isinstance(value, (str, int, float)):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        if self.powers is not None:
            object.__setattr__(self, "powers", tuple(self.powers))
        if not self.azimuth_deg or not self.elevation_deg or not self.sweep_values:
            raise ConfigError("target and sweep lists must be nonempty")
        if self.sweep not in SWEEP_AXES:
            raise ConfigError(f"sweep must be one of {SWEEP_AXES}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.grid and len(self.azimuth_deg) != len(self.elevation_deg):
            raise ConfigError("azimuth and elevation lists differ in length")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}")
        try:
            self.scene(self.snr_db)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def targets(self):
        if self.grid:
            pairs = list(itertools.product(self.azimuth_deg, self.elevation_deg))
            return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)
        return self.azimuth_deg, self.elevation_deg

    @property
    def n_targets(self):
        return self.k if self.k is not None else len(self.targets[0])

    def scene(self, snr_db, seed=0):
        az, el = self.targets
        base = Scene(az, el, self.powers, 1.0, self.snapshots, seed)
        return base.with_snr(snr_db)

    def point_snr(self, value):
        return float(value) if self.sweep == "snr_db" else float(self.snr_db)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        d = dataclasses.asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, data):
        allowed = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)
