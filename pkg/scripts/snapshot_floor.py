"""Resolution of the close pair without any noise, as the snapshot count grows.

With sigma_n^2 = 0 the only error left is the finite-sample cross-correlation
of the sources, which survives in the co-array vectors. The printed fraction
of jointly resolved trials therefore bounds what any SNR can buy at that T.
"""

import argparse

import numpy as np

from lshaped_doa.array_model import ArrayGeometry, Scene, simulate_snapshots
from lshaped_doa.estimator import iterate_estimate
from lshaped_doa.harness import metrics
from lshaped_doa.harness.runner import _record
from lshaped_doa.harness.config import ExperimentConfig
from lshaped_doa.measurements import Measurements


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--snapshots", type=int, nargs="*", default=[512, 2048, 8192, 32768])
    args = parser.parse_args()
    geometry = ArrayGeometry.nested(6)
    config = ExperimentConfig(azimuth_deg=(15.0, 16.0), elevation_deg=(30.0, 31.0))
    for t in args.snapshots:
        scene = Scene((15.0, 16.0), (30.0, 31.0), noise_power=0.0, snapshots=t)
        hits = []
        for trial in range(args.trials):
            x, z = simulate_snapshots(geometry, scene, np.random.default_rng(trial))
            try:
                est = iterate_estimate(Measurements.from_snapshots(geometry, x, z), 2)
                rec = _record(config, "proposed", t, trial, scene, est.azimuth_deg,
                              est.elevation_deg)
            except (ArithmeticError, ValueError, RuntimeError) as exc:
                rec = _record(config, "proposed", t, trial, scene,
                              status=f"failed:{type(exc).__name__}")
            hits.append(metrics.resolved(rec))
        print(f"T={t:6d}  joint resolution {np.mean(hits):.2f}")


if __name__ == "__main__":
    main()
