"""Scoring of contact probabilities against ground-truth stability labels."""

from __future__ import annotations

import os
import platform
import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .contactmodel import schmitt_contact
from .core import ContactEstimate, ImuSample, ValidationError
from .estimator import EstimatorConfig, FootEstimator

DEFAULT_THRESHOLD = 0.5
DEFAULT_BINS = 10
MIN_BENCH_SAMPLES = 100_000


def _pair(pred: Sequence[float], truth: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=float).reshape(-1)
    truth = np.asarray(truth, dtype=float).reshape(-1)
    if pred.size != truth.size:
        raise ValidationError(f"length mismatch: {pred.size} predictions vs {truth.size} labels")
    if pred.size == 0:
        raise ValidationError("nothing to score")
    return pred, truth


def rmse(pred: Sequence[float], truth: Sequence[float]) -> float:
    pred, truth = _pair(pred, truth)
    return float(np.sqrt(np.mean(np.square(pred - truth))))


def error_histogram(pred: Sequence[float], truth: Sequence[float], bins: int = DEFAULT_BINS) -> list[int]:
    """Counts of ``|pred - truth|`` in ``bins`` equal bins over [0, 1]; 1.0 lands in the last."""
    pred, truth = _pair(pred, truth)
    if bins < 2:
        raise ValidationError(f"need at least 2 bins, got {bins}")
    err = np.abs(pred - truth)
    idx = np.minimum((err * bins).astype(int), bins - 1)
    return np.bincount(idx, minlength=bins).tolist()


def confusion(pred: Sequence[float], truth: Sequence[float], threshold: float = DEFAULT_THRESHOLD) -> dict[str, int]:
    pred, truth = _pair(pred, truth)
    yhat = pred >= threshold
    y = truth >= 0.5
    return {
        "tp": int(np.sum(yhat & y)),
        "fp": int(np.sum(yhat & ~y)),
        "tn": int(np.sum(~yhat & ~y)),
        "fn": int(np.sum(~yhat & y)),
    }


@dataclass
class EvalReport:
    rmse: float
    histogram: list[int]
    confusion: dict[str, int]
    threshold: float
    n: int
    throughput_hz: float | None = None
    method: str = "kde"

    def to_dict(self) -> dict:
        return asdict(self)


def score(
    pred: Sequence[float],
    truth: Sequence[float],
    threshold: float = DEFAULT_THRESHOLD,
    bins: int = DEFAULT_BINS,
    method: str = "kde",
    throughput_hz: float | None = None,
) -> EvalReport:
    pred, truth = _pair(pred, truth)
    return EvalReport(
        rmse=rmse(pred, truth),
        histogram=error_histogram(pred, truth, bins),
        confusion=confusion(pred, truth, threshold),
        threshold=threshold,
        n=int(pred.size),
        throughput_hz=throughput_hz,
        method=method,
    )


def align(t: np.ndarray, estimates: Sequence[ContactEstimate]) -> np.ndarray:
    """Trace row index of every estimate; raises when any timestamp is missing."""
    t = np.asarray(t, dtype=float)
    te = np.array([e.t for e in estimates], dtype=float)
    idx = np.searchsorted(t, te)
    ok = (idx < t.size) & (t[np.minimum(idx, t.size - 1)] == te)
    if not np.all(ok):
        bad = te[~ok][0]
        raise ValidationError(f"estimate at t={bad!r} has no matching trace row")
    return idx


def compare(
    trace,
    estimates: Sequence[ContactEstimate],
    baseline_params: tuple[float, float] | None = (600.0, 200.0),
    threshold: float = DEFAULT_THRESHOLD,
    bins: int = DEFAULT_BINS,
    include_warmup: bool = False,
) -> tuple[EvalReport, EvalReport | None]:
    """Score the estimator and the Schmitt baseline on the same samples.

    ``trace`` needs ``t`` and ``stable``; the baseline also needs ``forces``
    and is None when they are absent or ``baseline_params`` is None.
    """
    if trace.stable is None:
        raise ValidationError("trace has no stability labels")
    if len(estimates) != len(trace.t) - 1:
        raise ValidationError(
            f"alignment: {len(estimates)} estimates for {len(trace.t)} trace rows (expected {len(trace.t) - 1})"
        )
    idx = align(trace.t, estimates)
    keep = np.array([include_warmup or e.warm for e in estimates], dtype=bool)
    if not keep.any():
        raise ValidationError("no scoreable estimates (all in warm-up)")
    idx = idx[keep]
    truth = np.asarray(trace.stable, dtype=float)[idx]
    pred = np.array([e.p_total for e in estimates])[keep]
    method = score(pred, truth, threshold, bins, method="kde")
    baseline = None
    if baseline_params is not None and getattr(trace, "forces", None) is not None:
        high, low = baseline_params
        on = np.array(schmitt_contact(trace.forces[:, 2], high, low), dtype=float)
        baseline = score(on[idx], truth, threshold, bins, method="schmitt")
    return method, baseline


def machine_descriptor() -> str:
    return f"{platform.machine()} {platform.processor() or 'cpu'} x{os.cpu_count()} / {platform.python_implementation()} {platform.python_version()} / {platform.system()}"


def throughput_bench(config: EstimatorConfig, n_samples: int = MIN_BENCH_SAMPLES, seed: int = 0) -> float:
    """Steady-state estimator steps per second on one foot, one thread."""
    if n_samples < MIN_BENCH_SAMPLES:
        raise ValidationError(f"benchmark needs >= {MIN_BENCH_SAMPLES} samples, got {n_samples}")
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((n_samples + config.d, 6)) * np.asarray(config.noise.sigma)
    dt = 1.0 / config.sample_rate
    samples = [ImuSample(i * dt, v[:3], v[3:]) for i, v in enumerate(data)]
    est = FootEstimator(config)
    for s in samples[: config.d]:  # fill the window before timing
        est.step(s)
    sink = 0.0
    timed = samples[config.d :]
    start = time.perf_counter()
    for s in timed:
        sink += est.step(s).p_total
    elapsed = time.perf_counter() - start
    if not np.isfinite(sink):
        raise RuntimeError("benchmark produced non-finite probabilities")
    return len(timed) / elapsed
