"""Matching, error metrics and SNR reporting for Monte Carlo records."""

import math
import warnings
from collections import defaultdict

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..coarray import noise_locator_matrix, optimal_subarray_size
from ..measurements import Measurements
from ..pipeline import conjugate_symmetric_stack, contract_and_unfold, cross_outer

AXES = ("azimuth", "elevation")


def match_estimates(true_az, true_el, est_az, est_el):
    """Order estimates to truths by a min-cost assignment on joint squared error.

    Returns the estimate index for every truth (``-1`` when there are fewer
    estimates than truths).
    """
    true_az, true_el = np.asarray(true_az, float), np.asarray(true_el, float)
    est_az, est_el = np.asarray(est_az, float), np.asarray(est_el, float)
    cost = ((true_az[:, None] - est_az[None, :]) ** 2
            + (true_el[:, None] - est_el[None, :]) ** 2)
    rows, cols = linear_sum_assignment(cost)
    order = -np.ones(true_az.size, dtype=int)
    order[rows] = cols
    return order


def pairing_tolerance(values):
    """Half the smallest gap between distinct values (90 degrees if all equal)."""
    distinct = np.unique(np.round(np.asarray(values, float), 9))
    if distinct.size < 2:
        return 90.0
    return float(np.min(np.diff(distinct)) / 2)


def _group(records, method=None):
    groups = defaultdict(list)
    for rec in records:
        if method is None or rec["method"] == method:
            groups[(rec["method"], rec["sweep_value"])].append(rec)
    return groups


def rmse_metric(records, axis):
    """``{(method, sweep_value): (rmse_deg, n_used, n_excluded)}``.

    ``rmse = sqrt(sum err^2 / (2 P K))`` over the successful trials of a point;
    failed trials are excluded and counted. A point without any successful
    trial is omitted with a warning.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    if not records:
        raise ValueError("no records")
    key = "err_az" if axis == "azimuth" else "err_el"
    out = {}
    for group, recs in _group(records).items():
        ok = [r for r in recs if r["status"] == "ok"]
        excluded = len(recs) - len(ok)
        if not ok:
            warnings.warn(f"no successful trials for {group}; RMSE point omitted")
            continue
        errs = np.array([r[key] for r in ok], dtype=float)
        p, k = errs.shape
        out[group] = (float(np.sqrt(np.sum(errs ** 2) / (2 * p * k))), p, excluded)
    return out


def resolved(rec, axis="joint"):
    """Two-target resolution test: each matched error within half the separation."""
    if len(rec["true_az"]) != 2:
        raise ValueError("resolution is defined for two-target scenes")
    if rec["status"] != "ok":
        return False
    half_az = abs(rec["true_az"][0] - rec["true_az"][1]) / 2
    half_el = abs(rec["true_el"][0] - rec["true_el"][1]) / 2
    ok_az = all(abs(e) <= half_az for e in rec["err_az"])
    ok_el = all(abs(e) <= half_el for e in rec["err_el"])
    return {"azimuth": ok_az, "elevation": ok_el, "joint": ok_az and ok_el}[axis]


def resolution_metric(records, axis="joint"):
    """``{(method, sweep_value): (probability, n_trials)}``; failures count as unresolved."""
    out = {}
    for group, recs in _group(records).items():
        hits = [resolved(r, axis) for r in recs]
        out[group] = (float(np.mean(hits)), len(hits))
    return out


def all_paired_metric(records):
    """Fraction of trials in which every target was estimated and paired correctly."""
    return {group: (float(np.mean([r["status"] == "ok" and all(r["paired"]) for r in recs])),
                    len(recs))
            for group, recs in _group(records).items()}


def median_iterations(records):
    out = {}
    for group, recs in _group(records).items():
        its = [r["iterations"] for r in recs if r["status"] == "ok"]
        out[group] = (float(np.median(its)) if its else math.nan, len(its))
    return out


def snr_report(scene, geometry, q=None, convention="flip_all"):
    """``(per_element_db, tensor_domain_db)`` for a scene.

    The per-element value is ``10 log10(sum p / noise)``. The tensor-domain
    value compares the noise-free unfolding with the noise-only term
    ``noise^2 * pipeline(W o W)`` built from the zero-lag locator ``W``.
    """
    if scene.noise_power == 0:
        return math.inf, math.inf
    per_element = 10 * math.log10(sum(scene.powers) / scene.noise_power)
    clean = Measurements.analytic(geometry, scene.replace(noise_power=0.0), q=q,
                                  convention=convention)
    s = geometry.s_value
    q = optimal_subarray_size(s) if q is None else q
    w = noise_locator_matrix(q, 2 * s - q, s)
    noise = contract_and_unfold(conjugate_symmetric_stack(
        cross_outer(w, w), cross_outer(w, w), convention)).t2 * scene.noise_power ** 2
    tensor_db = 20 * math.log10(np.linalg.norm(clean.obs.t2) / np.linalg.norm(noise))
    return per_element, tensor_db


__all__ = ["AXES", "match_estimates", "pairing_tolerance", "rmse_metric", "resolved",
           "resolution_metric", "all_paired_metric", "median_iterations", "snr_report"]
