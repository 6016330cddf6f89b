"""Sensitivity of slip_walk RMSE and still-foot score to window size and delta.

For each (d, k) pair, delta = k * sigma per axis. Reports the estimator RMSE
on slip_walk and the median p_total over pure-noise windows.

    python3 scripts/sweep_window_delta.py --windows 10 25 50 100 --k 2 3 4.243 5
"""

from __future__ import annotations

import argparse
import warnings

import numpy as np

from kdecontact.core import DEFAULT_NOISE, DeltaThresholds
from kdecontact.estimator import EstimatorConfig, estimate_series
from kdecontact.evaluation import compare
from kdecontact.kde import interval_mass
from kdecontact.synthgait import builtin_scenarios, generate


def still_median(d: int, k: float, n_windows: int, rng: np.random.Generator) -> float:
    sigma = np.asarray(DEFAULT_NOISE.sigma)
    windows = rng.standard_normal((n_windows, 6, d)) * sigma[None, :, None]
    probs = interval_mass(windows, sigma[None, :], k * sigma[None, :])
    return float(np.median(np.prod(probs, axis=1)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--windows", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--k", type=float, nargs="+", default=[2.0, 3.0, 3 * 2**0.5, 5.0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-windows", type=int, default=2000)
    args = ap.parse_args()

    trace = generate(builtin_scenarios(args.seed)["slip_walk"])
    samples = trace.imu_samples()
    rng = np.random.default_rng(args.seed)
    print(f"{'d':>4} {'k':>6} {'slip rmse':>10} {'still median':>13}")
    for d in args.windows:
        for k in args.k:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cfg = EstimatorConfig(d=d, delta=DeltaThresholds.from_sigma(DEFAULT_NOISE, k))
            method, _ = compare(trace, estimate_series(cfg, samples))
            print(f"{d:>4} {k:>6.3f} {method.rmse:>10.4f} {still_median(d, k, args.n_windows, rng):>13.4f}")


if __name__ == "__main__":
    main()
