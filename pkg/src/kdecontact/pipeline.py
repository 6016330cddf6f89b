"""Trace-level drivers shared by the CLI and the experiment scripts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Mapping

import numpy as np

from .config import RunConfig
from .contactmodel import label_arrays
from .core import ContactEstimate, FootId, ValidationError
from .estimator import estimate_series
from .evaluation import EvalReport, compare
from .synthgait import GaitTrace


def is_precompensated(trace: GaitTrace, cfg: RunConfig) -> bool:
    if cfg.precompensated is not None:
        return cfg.precompensated
    return bool(trace.meta.get("precompensated", False))


def estimate_trace(trace: GaitTrace, cfg: RunConfig) -> list[ContactEstimate]:
    samples = trace.imu_samples()
    if not is_precompensated(trace, cfg):
        samples = cfg.preprocessor().run(samples)
    return estimate_series(cfg.estimator, samples)


def estimate_feet(traces: Mapping[FootId, GaitTrace], cfg: RunConfig) -> list[ContactEstimate]:
    """Estimate every foot concurrently; output sorted by foot, then time."""
    feet = sorted(traces, key=lambda f: f.value)
    with ThreadPoolExecutor(max_workers=max(1, len(feet))) as pool:
        results = list(pool.map(lambda f: estimate_trace(traces[f], cfg), feet))
    return [e for res in results for e in res]


def ensure_labels(trace: GaitTrace, cfg: RunConfig) -> GaitTrace:
    """Fill ``stable``/``in_contact`` from force and velocity channels when absent."""
    if trace.stable is not None:
        return trace
    if trace.forces is None or trace.true_vel is None or trace.true_angvel is None:
        raise ValidationError(
            f"foot {trace.foot.value}: need label_stable or fx/fy/fz, vx/vy/vz and wvx/wvy/wvz columns to score"
        )
    trace.stable, trace.in_contact = label_arrays(
        trace.forces, trace.true_vel, trace.true_angvel, cfg.vel_eps, cfg.fz_eps
    )
    return trace


def evaluate_feet(
    traces: Mapping[FootId, GaitTrace],
    estimates: Mapping[FootId, list[ContactEstimate]],
    cfg: RunConfig,
) -> tuple[EvalReport, EvalReport | None, dict]:
    """Pool all feet into one method report and one baseline report."""
    missing = set(traces) ^ set(estimates)
    if missing:
        raise ValidationError(f"alignment: feet {sorted(f.value for f in missing)} present in only one file")
    preds, base = [], []
    baseline_ok = True
    for foot in sorted(traces, key=lambda f: f.value):
        tr = ensure_labels(traces[foot], cfg)
        method, baseline = compare(
            tr,
            estimates[foot],
            (cfg.schmitt_high, cfg.schmitt_low),
            cfg.threshold,
            cfg.histogram_bins,
            cfg.include_warmup,
        )
        preds.append(method)
        base.append(baseline)
        baseline_ok &= baseline is not None
    method = _pool(preds, "kde")
    baseline = _pool(base, "schmitt") if baseline_ok else None
    return method, baseline, {"per_foot": {f.value: m.to_dict() for f, m in zip(sorted(traces, key=lambda f: f.value), preds)}}


def _pool(reports: list[EvalReport], name: str) -> EvalReport:
    if len(reports) == 1:
        return reports[0]
    n = sum(r.n for r in reports)
    mse = sum(r.rmse**2 * r.n for r in reports) / n
    return EvalReport(
        rmse=float(np.sqrt(mse)),
        histogram=np.sum([r.histogram for r in reports], axis=0).tolist(),
        confusion={k: sum(r.confusion[k] for r in reports) for k in reports[0].confusion},
        threshold=reports[0].threshold,
        n=n,
        method=name,
    )
