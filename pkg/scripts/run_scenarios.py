"""Score the estimator and the Schmitt baseline on every built-in scenario.

Each scenario is run on the pre-compensated trace and, with --raw, on the
same trace with gravity, bias and tilt embedded (exercising the filter).

    python3 scripts/run_scenarios.py --seeds 0 1 2 --raw --out results/scenarios.json
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from kdecontact.config import RunConfig
from kdecontact.evaluation import compare
from kdecontact.pipeline import estimate_trace
from kdecontact.synthgait import builtin_scenarios, generate


def run_one(scenario, cfg: RunConfig) -> dict:
    trace = generate(scenario)
    start = time.perf_counter()
    estimates = estimate_trace(trace, cfg)
    elapsed = time.perf_counter() - start
    method, baseline = compare(trace, estimates, (cfg.schmitt_high, cfg.schmitt_low), cfg.threshold)
    return {
        "kde_rmse": method.rmse,
        "schmitt_rmse": baseline.rmse,
        "kde_confusion": method.confusion,
        "n": method.n,
        "seconds": elapsed,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--raw", action="store_true", help="also run the raw-IMU path")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    cfg = RunConfig.from_mapping({})
    modes = ["precompensated"] + (["raw"] if args.raw else [])
    rows = []
    for seed in args.seeds:
        for name, sc in builtin_scenarios(seed).items():
            for mode in modes:
                scenario = replace(sc, embed_gravity=(mode == "raw"))
                res = run_one(scenario, cfg)
                rows.append({"scenario": name, "seed": seed, "mode": mode, **res})

    print(f"{'scenario':<12} {'mode':<15} {'kde rmse':>9} {'schmitt':>9} {'runs':>5}")
    for name in builtin_scenarios():
        for mode in modes:
            sel = [r for r in rows if r["scenario"] == name and r["mode"] == mode]
            kde = np.mean([r["kde_rmse"] for r in sel])
            base = np.mean([r["schmitt_rmse"] for r in sel])
            print(f"{name:<12} {mode:<15} {kde:>9.4f} {base:>9.4f} {len(sel):>5}")

    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(rows, indent=2) + "\n")


if __name__ == "__main__":
    main()
