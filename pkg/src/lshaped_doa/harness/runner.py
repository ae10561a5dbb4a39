"""Deterministic Monte Carlo execution and CSV/JSON emission."""

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import __version__
from ..array_model import ArrayGeometry, simulate_snapshots
from ..baselines import als_estimate, ss_subspace_estimate
from ..estimator import iterate_estimate
from ..measurements import Measurements
from . import metrics
from .config import ExperimentConfig

# Estimator-setting sweeps reuse the same draws at every point.
DATA_SWEEPS = ("snr_db",)


def trial_seed(config, point_idx, trial):
    point = point_idx if config.sweep in DATA_SWEEPS else 0
    return np.random.SeedSequence([config.seed, point, trial])


def _record(config, method, value, trial, scene, az=None, el=None, iterations=0,
            status="ok", extra=None):
    rec = {"method": method, "sweep_value": value, "trial": trial,
           "true_az": list(scene.azimuth_deg), "true_el": list(scene.elevation_deg),
           "status": status, "iterations": int(iterations)}
    if status == "ok":
        az = np.asarray(az, float)
        el = np.asarray(el, float)
        order = metrics.match_estimates(scene.azimuth_deg, scene.elevation_deg, az, el)
        if np.any(order < 0):
            rec["status"] = "failed:too_few_estimates"
        else:
            err_az = az[order] - np.asarray(scene.azimuth_deg)
            err_el = el[order] - np.asarray(scene.elevation_deg)
            tol_az = metrics.pairing_tolerance(scene.azimuth_deg)
            tol_el = metrics.pairing_tolerance(scene.elevation_deg)
            rec.update(est_az=az[order].tolist(), est_el=el[order].tolist(),
                       err_az=err_az.tolist(), err_el=err_el.tolist(),
                       paired=[bool(abs(a) <= tol_az and abs(e) <= tol_el)
                               for a, e in zip(err_az, err_el)])
    rec.update(extra or {})
    return rec


def _proposed(config, meas, value, trial, scene):
    mu = float(value) if config.sweep == "mu" else config.mu
    cap = int(value) if config.sweep == "max_iter" else config.max_iter
    est = iterate_estimate(meas, config.n_targets, mu=mu, max_iter=cap, delta=config.delta,
                           pairing=config.pairing, subspace=config.subspace)
    first = est.first_pass
    extra = {"epsilon_history": list(est.epsilon_history), "degraded": est.degraded,
             "pairing_backend": est.pairing_backend_used}
    return [
        _record(config, "proposed", value, trial, scene, est.azimuth_deg, est.elevation_deg,
                est.iterations_used, extra=extra),
        _record(config, "proposed_step1", value, trial, scene, first.azimuth_deg,
                first.elevation_deg, 1),
    ]


def run_trial(config, point_idx, value, trial):
    """All method records for one (sweep point, trial); estimator errors are captured."""
    seq = trial_seed(config, point_idx, trial)
    sim_seq, als_seq = seq.spawn(2)
    geometry = ArrayGeometry.nested(config.n_elements)
    scene = config.scene(config.point_snr(value))
    x, z = simulate_snapshots(geometry, scene, rng=np.random.default_rng(sim_seq))
    meas = Measurements.from_snapshots(geometry, x, z, q=config.q, dedup=config.dedup,
                                       convention=config.convention)
    records = []
    for method in config.methods:
        start = time.perf_counter()
        try:
            if method == "proposed":
                out = _proposed(config, meas, value, trial, scene)
            elif method == "ss":
                res = ss_subspace_estimate(meas, config.n_targets)
                out = [_record(config, "ss", value, trial, scene, res.azimuth_deg,
                               res.elevation_deg, 1)]
            else:
                res = als_estimate(meas, config.n_targets, max_iters=config.als_max_iters,
                                   restarts=config.als_restarts,
                                   rng=np.random.default_rng(als_seq))
                out = [_record(config, "als", value, trial, scene, res.azimuth_deg,
                               res.elevation_deg, res.iterations_used,
                               extra={"converged": res.converged})]
        except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
            tags = ["proposed", "proposed_step1"] if method == "proposed" else [method]
            out = [_record(config, tag, value, trial, scene, status=f"failed:{type(exc).__name__}",
                           extra={"error": str(exc)}) for tag in tags]
        elapsed = time.perf_counter() - start
        for rec in out:
            rec["wall_time"] = elapsed
        records.extend(out)
    return records


def _task(args):
    return run_trial(*args)


def run_monte_carlo(config, threads=1):
    """Records for every (method, sweep point, trial), sorted deterministically."""
    tasks = [(config, i, v, t) for i, v in enumerate(config.sweep_values)
             for t in range(config.trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    else:
        chunks = [_task(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    method_rank = {m: i for i, m in enumerate(sorted({r["method"] for r in records}))}
    index = {v: i for i, v in enumerate(config.sweep_values)}
    records.sort(key=lambda r: (method_rank[r["method"]], index[r["sweep_value"]], r["trial"]))
    return records


def summary_rows(records):
    """CSV rows ``(method, sweep_value, axis, metric, value, n_trials, n_excluded)``."""
    rows = []
    for axis in metrics.AXES:
        for (method, value), (rmse, n, excl) in metrics.rmse_metric(records, axis).items():
            rows.append((method, value, axis, "rmse_deg", rmse, n + excl, excl))
    for (method, value), (frac, n) in metrics.all_paired_metric(records).items():
        rows.append((method, value, "joint", "all_paired", frac, n, 0))
    for (method, value), (med, n) in metrics.median_iterations(records).items():
        rows.append((method, value, "joint", "median_iterations", med, n, 0))
    if records and len(records[0]["true_az"]) == 2:
        for axis in ("azimuth", "elevation", "joint"):
            for (method, value), (prob, n) in metrics.resolution_metric(records, axis).items():
                rows.append((method, value, axis, "resolution_probability", prob, n, 0))
    rows.sort(key=lambda r: (r[0], r[3], r[2], float(r[1])))
    return rows


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_outputs(config, records, out_dir):
    """Write ``<name>.csv``, ``<name>.json`` and ``<name>.records.jsonl``; return paths."""
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, config.name)
    with open(base + ".csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "sweep_value", "axis", "metric", "value", "n_trials",
                         "n_excluded"])
        for row in summary_rows(records):
            writer.writerow([_fmt(v) for v in row])
    geometry = ArrayGeometry.nested(config.n_elements)
    snr = {}
    for value in config.sweep_values:
        per_el, tensor_db = metrics.snr_report(config.scene(config.point_snr(value)), geometry,
                                               config.q, config.convention)
        snr[_fmt(value)] = {"per_element_db": per_el, "tensor_domain_db": tensor_db}
    sidecar = {"config": config.to_dict(), "version": __version__, "snr": snr}
    with open(base + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(base + ".records.jsonl", "w") as fh:
        for rec in records:
            clean = {k: v for k, v in rec.items() if k != "wall_time"}
            fh.write(json.dumps(clean, sort_keys=True) + "\n")
    return [base + ".csv", base + ".json", base + ".records.jsonl"]


def load_records(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


__all__ = ["ExperimentConfig", "run_trial", "run_monte_carlo", "summary_rows",
           "write_outputs", "load_records", "trial_seed"]
