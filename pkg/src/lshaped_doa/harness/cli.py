"""Command-line entry point: ``python -m lshaped_doa.harness <command> [options]``."""

import argparse
import csv
import json
import os
import sys

import numpy as np

from ..array_model import ArrayGeometry, simulate_snapshots
from ..coarray import identifiability_bound, optimal_dof_value, optimal_subarray_size
from ..crb import crb_matrix
from ..estimator import iterate_estimate, resolve_backend
from ..measurements import Measurements
from .config import ConfigError, ExperimentConfig
from .presets import PRESETS
from .runner import run_monte_carlo, trial_seed, write_outputs

SWEEP_COMMANDS = ("sweep-snr", "sweep-mu", "sweep-iterations", "grid-dof", "resolution")
PAIRING_CHOICES = ("gamma", "shared-basis", "residual", "auto")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(prog="lshaped-doa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SWEEP_COMMANDS + ("simulate", "estimate", "crb", "dof-table"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment config (defaults to the built-in preset)")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, help="override the base seed")
        p.add_argument("--method", choices=("proposed", "ss", "als", "all"))
        p.add_argument("--pairing", choices=PAIRING_CHOICES)
        if name == "dof-table":
            p.add_argument("--max-n", type=int, default=20)
    return parser


def load_config(args):
    config = (ExperimentConfig.from_json(args.config) if args.config
              else PRESETS.get(args.command, ExperimentConfig()))
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.method:
        changes["methods"] = ("proposed", "ss", "als") if args.method == "all" else (args.method,)
    if args.pairing:
        changes["pairing"] = args.pairing
    if getattr(args, "out", None):
        changes["out"] = args.out
    config = config.replace(**changes) if changes else config
    try:
        resolve_backend(config.pairing, config.convention)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config


def _simulate(config, out_dir):
    geometry = ArrayGeometry.nested(config.n_elements)
    scene = config.scene(config.point_snr(config.sweep_values[0]))
    rng = np.random.default_rng(trial_seed(config, 0, 0))
    x, z = simulate_snapshots(geometry, scene, rng=rng)
    path = os.path.join(out_dir, f"{config.name}.npz")
    np.savez(path, x=x, z=z, positions=geometry.positions,
             azimuth_deg=scene.azimuth_deg, elevation_deg=scene.elevation_deg)
    return [path]


def _estimate(config, out_dir):
    geometry = ArrayGeometry.nested(config.n_elements)
    scene = config.scene(config.point_snr(config.sweep_values[0]))
    x, z = simulate_snapshots(geometry, scene, rng=np.random.default_rng(trial_seed(config, 0, 0)))
    meas = Measurements.from_snapshots(geometry, x, z, q=config.q, dedup=config.dedup,
                                       convention=config.convention)
    est = iterate_estimate(meas, config.n_targets, mu=config.mu, max_iter=config.max_iter,
                           delta=config.delta, pairing=config.pairing,
                           subspace=config.subspace)
    payload = {"azimuth_deg": est.azimuth_deg.tolist(), "elevation_deg": est.elevation_deg.tolist(),
               "powers": est.powers.tolist(), "iterations": est.iterations_used,
               "epsilon_history": list(est.epsilon_history), "noise_power": est.noise_power,
               "pairing_backend": est.pairing_backend_used, "degraded": est.degraded,
               "truth": {"azimuth_deg": list(scene.azimuth_deg),
                         "elevation_deg": list(scene.elevation_deg)}}
    path = os.path.join(out_dir, f"{config.name}.json")
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [path]


def _crb_table(config, out_dir):
    geometry = ArrayGeometry.nested(config.n_elements)
    path = os.path.join(out_dir, f"{config.name}.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sweep_value", "axis", "target", "crb_deg2"])
        for value in config.sweep_values:
            rep = crb_matrix(geometry, config.scene(config.point_snr(value)), config.q)
            k = rep.crb_matrix.shape[0] // 2
            for i, var in enumerate(np.diag(rep.crb_matrix)):
                axis = "azimuth" if i < k else "elevation"
                writer.writerow([repr(float(value)), axis, i % k + 1, repr(float(var))])
    return [path]


def _dof_table(max_n, out_dir):
    path = os.path.join(out_dir, "dof_table.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n_elements", "s_value", "coarray_size", "q_opt", "m_opt",
                         "max_targets", "continuous_bound"])
        for n in range(4, max_n + 1, 2):
            geometry = ArrayGeometry.nested(n)
            s = geometry.s_value
            q = optimal_subarray_size(s)
            writer.writerow([n, s, geometry.coarray_size, q, 2 * s - q,
                             identifiability_bound(q, 2 * s - q), repr(optimal_dof_value(s))])
    return [path]


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _run(args):
    try:
        if args.command == "dof-table":
            os.makedirs(args.out, exist_ok=True)
            paths = _dof_table(args.max_n, args.out)
        else:
            config = load_config(args)
            out_dir = config.out or args.out
            os.makedirs(out_dir, exist_ok=True)
            if args.command == "simulate":
                paths = _simulate(config, out_dir)
            elif args.command == "estimate":
                paths = _estimate(config, out_dir)
            elif args.command == "crb":
                paths = _crb_table(config, out_dir)
            else:
                records = run_monte_carlo(config, threads=args.threads)
                paths = write_outputs(config, records, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
