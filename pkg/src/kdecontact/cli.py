"""``kdecontact`` command line: generate, estimate, eval, bench.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from .config import ENV_PREFIX, load_config
from .core import ValidationError
from .evaluation import MIN_BENCH_SAMPLES, machine_descriptor, throughput_bench
from .pipeline import estimate_feet, evaluate_feet
from .synthgait import LABEL_CONVENTION, GaitScenario, builtin_scenarios, generate, with_seed
from .traceio import load_column_map, read_estimates, read_trace, write_estimates, write_trace

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _resolve_scenario(spec: str, seed: int) -> GaitScenario:
    builtins = builtin_scenarios(seed)
    if spec in builtins:
        return builtins[spec]
    path = Path(spec)
    if path.is_file():
        with open(path) as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise ValidationError(f"scenario file {spec} must hold a mapping")
        data.setdefault("name", path.stem)
        return with_seed(GaitScenario.from_dict(data), seed)
    raise UsageError(f"unknown scenario {spec!r}; known scenarios: {', '.join(sorted(builtins))} (or a scenario file)")


def cmd_generate(args) -> int:
    scenario = _resolve_scenario(args.scenario, args.seed)
    if args.embed_gravity:
        scenario = GaitScenario.from_dict({**scenario.to_dict(), "embed_gravity": True})
    trace = generate(scenario)
    try:
        write_trace(args.out, trace)
    except OSError as exc:
        raise ValidationError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {len(trace)} samples to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    cmap = load_column_map(args.column_map) if args.column_map else None
    traces = read_trace(args.inp, cmap)
    estimates = estimate_feet(traces, cfg)
    write_estimates(args.out, estimates)
    print(f"wrote {len(estimates)} estimates to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    cmap = load_column_map(args.column_map) if args.column_map else None
    traces = read_trace(args.trace, cmap)
    estimates = read_estimates(args.estimates)
    method, baseline, extra = evaluate_feet(traces, estimates, cfg)
    report = {
        "method": method.to_dict(),
        "baseline": baseline.to_dict()
        if baseline is not None
        else {"available": False, "reason": "trace has no fz column"},
        "meta": {
            "label_convention": LABEL_CONVENTION,
            "warmup_excluded": not cfg.include_warmup,
            "schmitt_high": cfg.schmitt_high,
            "schmitt_low": cfg.schmitt_low,
            "trace": str(args.trace),
            "estimates": str(args.estimates),
            **extra,
        },
    }
    report_path = Path(args.report)
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    hist_path = report_path.with_name(report_path.stem + ".hist.csv")
    bins = len(method.histogram)
    with open(hist_path, "w") as fh:
        fh.write("bin_lo,bin_hi,kde" + (",schmitt" if baseline else "") + "\n")
        for i in range(bins):
            row = [f"{i / bins:.6g}", f"{(i + 1) / bins:.6g}", str(method.histogram[i])]
            if baseline:
                row.append(str(baseline.histogram[i]))
            fh.write(",".join(row) + "\n")
    line = f"kde rmse={method.rmse:.4f}"
    if baseline is not None:
        line += f" schmitt rmse={baseline.rmse:.4f}"
    print(line)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.n < MIN_BENCH_SAMPLES:
        raise UsageError(f"--n must be >= {MIN_BENCH_SAMPLES}, got {args.n}")
    cfg = load_config(args.config)
    hz = throughput_bench(cfg.estimator, args.n)
    print(f"throughput_hz={hz:.1f} d={cfg.estimator.d} n={args.n} machine={machine_descriptor()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="kdecontact",
        description="Stable-contact probability from foot IMU data.",
        epilog=f"Config keys can be overridden with {ENV_PREFIX}<KEY> environment variables.",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic labelled gait trace")
    g.add_argument("--scenario", required=True, help="built-in scenario name or scenario file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--embed-gravity", action="store_true", help="emit raw readings with gravity, bias and tilt")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("estimate", help="run the estimator over a trace file")
    e.add_argument("--in", dest="inp", required=True)
    e.add_argument("--config")
    e.add_argument("--out", required=True)
    e.add_argument("--column-map", help="YAML/JSON map from source headers to trace columns")
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("eval", help="score estimates and the Schmitt baseline against labels")
    v.add_argument("--trace", required=True)
    v.add_argument("--estimates", required=True)
    v.add_argument("--config")
    v.add_argument("--report", required=True)
    v.add_argument("--column-map")
    v.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="measure single-foot estimator throughput")
    b.add_argument("--config")
    b.add_argument("--n", type=int, default=MIN_BENCH_SAMPLES)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
