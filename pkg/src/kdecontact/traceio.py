"""CSV trace and estimate files.

Trace columns: ``t, foot, ax, ay, az, wx, wy, wz`` are required;
``fx, fy, fz, vx, vy, vz, wvx, wvy, wvz, label_stable, label_contact,
phase, step`` are optional. Floats are written with 17 significant digits,
which round-trips IEEE doubles exactly.

Files with other headers (for instance released robot datasets) can be read
through a column map, a YAML/JSON mapping of source header -> canonical name.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import yaml

from .core import AXES, ContactEstimate, FootId, ValidationError, check_foot_family
from .synthgait import GaitTrace

REQUIRED = ("t", "foot", *AXES)
FORCE_COLS = ("fx", "fy", "fz")
VEL_COLS = ("vx", "vy", "vz")
ANGVEL_COLS = ("wvx", "wvy", "wvz")
LABEL_COLS = ("label_stable", "label_contact")
EXTRA_COLS = ("phase", "step")
TRACE_COLUMNS = REQUIRED + FORCE_COLS + VEL_COLS + ANGVEL_COLS + LABEL_COLS + EXTRA_COLS
ESTIMATE_COLUMNS = (
    "t",
    "foot",
    *(f"p_{a}" for a in AXES),
    "p_tangential",
    "p_rotational",
    "p_total",
    "warm",
)


class TraceFormatError(ValidationError):
    def __init__(self, message: str, line: int | None = None, column: str | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def meta_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def write_trace(path: str | Path, traces: GaitTrace | Sequence[GaitTrace], meta: bool = True) -> None:
    traces = [traces] if isinstance(traces, GaitTrace) else list(traces)
    check_foot_family(tr.foot for tr in traces)
    cols = list(REQUIRED)
    first = traces[0]
    optional = [
        (FORCE_COLS, "forces"),
        (VEL_COLS, "true_vel"),
        (ANGVEL_COLS, "true_angvel"),
    ]
    for names, attr in optional:
        if all(getattr(tr, attr) is not None for tr in traces):
            cols += names
    if all(tr.stable is not None and tr.in_contact is not None for tr in traces):
        cols += LABEL_COLS
    if all(tr.phase is not None and tr.step is not None for tr in traces):
        cols += EXTRA_COLS
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for tr in sorted(traces, key=lambda tr: tr.foot.value):
            for i in range(len(tr)):
                row = [fmt(tr.t[i]), tr.foot.value, *(fmt(x) for x in tr.imu[i])]
                if "fx" in cols:
                    row += [fmt(x) for x in tr.forces[i]]
                if "vx" in cols:
                    row += [fmt(x) for x in tr.true_vel[i]]
                if "wvx" in cols:
                    row += [fmt(x) for x in tr.true_angvel[i]]
                if "label_stable" in cols:
                    row += [int(bool(tr.stable[i])), int(bool(tr.in_contact[i]))]
                if "phase" in cols:
                    row += [tr.phase[i], int(tr.step[i])]
                w.writerow(row)
    if meta and len(traces) == 1 and first.meta:
        with open(meta_path(path), "w") as fh:
            json.dump(first.meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_column_map(path: str | Path) -> dict[str, str]:
    with open(path) as fh:
        mapping = yaml.safe_load(fh) or {}
    if not isinstance(mapping, Mapping):
        raise ValidationError(f"column map {path} must be a mapping of source -> canonical column")
    unknown = set(mapping.values()) - set(TRACE_COLUMNS)
    if unknown:
        raise ValidationError(f"column map targets unknown columns: {sorted(unknown)}")
    return {str(k): str(v) for k, v in mapping.items()}


def _float(value: str, line: int, column: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise TraceFormatError(f"column {column!r}: cannot parse {value!r} as a number", line, column) from None
    if not math.isfinite(x):
        raise TraceFormatError(f"column {column!r}: non-finite value {value!r}", line, column)
    return x


def _flag(value: str, line: int, column: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true"):
        return True
    if v in ("0", "false"):
        return False
    raise TraceFormatError(f"column {column!r}: expected 0/1, got {value!r}", line, column)


def read_trace(path: str | Path, column_map: Mapping[str, str] | None = None) -> dict[FootId, GaitTrace]:
    """Read a trace file into one ``GaitTrace`` per foot."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceFormatError("empty file", 1) from None
        header = [h.strip() for h in header]
        if column_map:
            header = [column_map.get(h, h) for h in header]
        for col in REQUIRED:
            if col not in header:
                raise TraceFormatError(f"missing required column {col!r}", 1, col)
        pos = {h: i for i, h in enumerate(header)}
        has = {c: c in pos for c in TRACE_COLUMNS}
        rows: dict[FootId, dict[str, list]] = {}
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise TraceFormatError(f"expected {len(header)} fields, got {len(row)}", line)
            try:
                foot = FootId.parse(row[pos["foot"]])
            except ValidationError as exc:
                raise TraceFormatError(str(exc), line, "foot") from None
            r = rows.setdefault(foot, {k: [] for k in ("t", "imu", "f", "v", "wv", "ls", "lc", "phase", "step")})
            t = _float(row[pos["t"]], line, "t")
            if r["t"] and t <= r["t"][-1]:
                raise TraceFormatError(f"time {t!r} not after {r['t'][-1]!r} for foot {foot.value}", line, "t")
            r["t"].append(t)
            r["imu"].append([_float(row[pos[c]], line, c) for c in AXES])
            for key, cols in (("f", FORCE_COLS), ("v", VEL_COLS), ("wv", ANGVEL_COLS)):
                if all(has[c] for c in cols):
                    r[key].append([_float(row[pos[c]], line, c) for c in cols])
            if has["label_stable"]:
                r["ls"].append(_flag(row[pos["label_stable"]], line, "label_stable"))
            if has["label_contact"]:
                r["lc"].append(_flag(row[pos["label_contact"]], line, "label_contact"))
            if has["phase"]:
                r["phase"].append(row[pos["phase"]])
            if has["step"]:
                r["step"].append(int(_float(row[pos["step"]], line, "step")))
    check_foot_family(rows)
    meta = {}
    mp = meta_path(path)
    if mp.exists():
        with open(mp) as fh:
            meta = json.load(fh)

    def arr(v, shape=None):
        return np.array(v, dtype=float).reshape(shape) if v else None

    out = {}
    for foot in sorted(rows, key=lambda f: f.value):
        r = rows[foot]
        out[foot] = GaitTrace(
            t=np.array(r["t"]),
            foot=foot,
            imu=np.array(r["imu"]).reshape(-1, 6),
            forces=arr(r["f"], (-1, 3)),
            true_vel=arr(r["v"], (-1, 3)),
            true_angvel=arr(r["wv"], (-1, 3)),
            stable=np.array(r["ls"], dtype=bool) if r["ls"] else None,
            in_contact=np.array(r["lc"], dtype=bool) if r["lc"] else None,
            phase=np.array(r["phase"], dtype=str) if r["phase"] else None,
            step=np.array(r["step"], dtype=int) if r["step"] else None,
            meta=dict(meta),
        )
    return out


def write_estimates(path: str | Path, estimates: Iterable[ContactEstimate]) -> None:
    ests = sorted(estimates, key=lambda e: (e.foot.value, e.t))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ESTIMATE_COLUMNS)
        for e in ests:
            w.writerow(
                [
                    fmt(e.t),
                    e.foot.value,
                    *(fmt(p) for p in e.axis_probs),
                    fmt(e.p_tangential),
                    fmt(e.p_rotational),
                    fmt(e.p_total),
                    int(e.warm),
                ]
            )


def read_estimates(path: str | Path) -> dict[FootId, list[ContactEstimate]]:
    out: dict[FootId, list[ContactEstimate]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError("empty estimates file", 1)
        header = [h.strip() for h in header]
        for col in ESTIMATE_COLUMNS:
            if col not in header:
                raise TraceFormatError(f"missing column {col!r}", 1, col)
        pos = {h: i for i, h in enumerate(header)}
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise TraceFormatError(f"expected {len(header)} fields, got {len(row)}", line)
            vals = {c: row[pos[c]] for c in ESTIMATE_COLUMNS}
            try:
                e = ContactEstimate(
                    t=_float(vals["t"], line, "t"),
                    foot=FootId.parse(vals["foot"]),
                    axis_probs=tuple(_float(vals[f"p_{a}"], line, f"p_{a}") for a in AXES),
                    p_tangential=_float(vals["p_tangential"], line, "p_tangential"),
                    p_rotational=_float(vals["p_rotational"], line, "p_rotational"),
                    p_total=_float(vals["p_total"], line, "p_total"),
                    warm=_flag(vals["warm"], line, "warm"),
                )
            except TraceFormatError:
                raise
            except ValidationError as exc:
                raise TraceFormatError(str(exc), line) from None
            out.setdefault(e.foot, []).append(e)
    return out
