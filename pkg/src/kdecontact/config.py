"""Run configuration: a flat key-value file (YAML or JSON) plus env overrides.

Every key may be overridden by an environment variable named
``KDECONTACT_<KEY>`` in upper case, e.g. ``KDECONTACT_WINDOW_SIZE=40``.
Vector values in the environment are comma separated.

Keys and defaults::

    window_size: 50
    sigma: [0.02467, 0.02467, 0.02467, 0.01653, 0.01653, 0.01653]
    delta: 4.242640687119285sigma   # or six numbers, or "<k>sigma"
    sample_rate_hz: 1000
    filter_gain: 0.02
    gravity: [0, 0, -9.80665]
    gravity_override: false
    calibration_samples: 500
    precompensated: auto            # auto | true | false
    vel_eps: 0.001
    fz_eps: 1.0
    schmitt_high: 600
    schmitt_low: 200
    threshold: 0.5
    histogram_bins: 10
    include_warmup: false
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .contactmodel import DEFAULT_FZ_EPS, DEFAULT_VEL_EPS
from .core import DEFAULT_NOISE, DeltaThresholds, NoiseModel, ValidationError
from .estimator import DEFAULT_DELTA_SIGMAS, EstimatorConfig
from .evaluation import DEFAULT_BINS, DEFAULT_THRESHOLD
from .preprocess import DEFAULT_GAIN, GravityModel, Preprocessor

ENV_PREFIX = "KDECONTACT_"


class ConfigError(ValidationError):
    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


DEFAULTS: dict[str, Any] = {
    "window_size": 50,
    "sigma": [float(s) for s in DEFAULT_NOISE.sigma],
    "delta": f"{DEFAULT_DELTA_SIGMAS!r}sigma",
    "sample_rate_hz": 1000.0,
    "filter_gain": DEFAULT_GAIN,
    "gravity": [0.0, 0.0, -9.80665],
    "gravity_override": False,
    "calibration_samples": 500,
    "precompensated": "auto",
    "vel_eps": DEFAULT_VEL_EPS,
    "fz_eps": DEFAULT_FZ_EPS,
    "schmitt_high": 600.0,
    "schmitt_low": 200.0,
    "threshold": DEFAULT_THRESHOLD,
    "histogram_bins": DEFAULT_BINS,
    "include_warmup": False,
}

_SIGMA_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*sigma\s*$")


def _vector(key: str, value: Any, n: int) -> np.ndarray:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        arr = np.asarray(value, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected {n} numbers, got {value!r}") from None
    if arr.size != n or not np.all(np.isfinite(arr)):
        raise ConfigError(key, f"expected {n} finite numbers, got {value!r}")
    return arr


def _number(key: str, value: Any, kind=float, positive: bool = True):
    try:
        x = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {value!r}") from None
    if not math.isfinite(x) or (positive and x <= 0):
        raise ConfigError(key, f"must be {'positive and ' if positive else ''}finite, got {value!r}")
    return x


def _bool(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {value!r}")


@dataclass
class RunConfig:
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    filter_gain: float = DEFAULT_GAIN
    gravity: GravityModel = field(default_factory=GravityModel)
    calibration_samples: int = 500
    precompensated: bool | None = None  # None: take it from the trace metadata
    vel_eps: float = DEFAULT_VEL_EPS
    fz_eps: float = DEFAULT_FZ_EPS
    schmitt_high: float = 600.0
    schmitt_low: float = 200.0
    threshold: float = DEFAULT_THRESHOLD
    histogram_bins: int = DEFAULT_BINS
    include_warmup: bool = False
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> RunConfig:
        unknown = set(values) - set(DEFAULTS)
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(key, f"unknown key; known keys are {sorted(DEFAULTS)}")
        v = {**DEFAULTS, **values}

        d = _number("window_size", v["window_size"], int)
        if d < 2:
            raise ConfigError("window_size", f"must be >= 2, got {d}")
        try:
            noise = NoiseModel(_vector("sigma", v["sigma"], 6))
        except ValidationError as exc:
            raise ConfigError("sigma", str(exc)) from None
        rate = _number("sample_rate_hz", v["sample_rate_hz"])
        raw_delta = v["delta"]
        match = _SIGMA_RE.match(raw_delta) if isinstance(raw_delta, str) else None
        try:
            if match:
                delta = DeltaThresholds.from_sigma(noise, _number("delta", match.group(1)))
            else:
                delta = DeltaThresholds(_vector("delta", raw_delta, 6))
        except ConfigError:
            raise
        except ValidationError as exc:
            raise ConfigError("delta", str(exc)) from None
        estimator = EstimatorConfig(d=d, noise=noise, delta=delta, sample_rate=rate)

        gain = _number("filter_gain", v["filter_gain"], positive=False)
        if not 0.0 <= gain <= 1.0:
            raise ConfigError("filter_gain", f"must lie in [0, 1], got {gain}")
        try:
            gravity = GravityModel(
                tuple(_vector("gravity", v["gravity"], 3)), override=_bool("gravity_override", v["gravity_override"])
            )
        except ConfigError:
            raise
        except ValidationError as exc:
            raise ConfigError("gravity", str(exc)) from None
        pre = v["precompensated"]
        if isinstance(pre, str) and pre.strip().lower() == "auto":
            pre = None
        else:
            pre = _bool("precompensated", pre)
        high = _number("schmitt_high", v["schmitt_high"], positive=False)
        low = _number("schmitt_low", v["schmitt_low"], positive=False)
        if not low < high:
            raise ConfigError("schmitt_low", f"must be below schmitt_high ({low} >= {high})")
        threshold = _number("threshold", v["threshold"], positive=False)
        if not 0.0 <= threshold <= 1.0:
            raise ConfigError("threshold", f"must lie in [0, 1], got {threshold}")
        bins = _number("histogram_bins", v["histogram_bins"], int)
        if bins < 2:
            raise ConfigError("histogram_bins", f"must be >= 2, got {bins}")
        calib = _number("calibration_samples", v["calibration_samples"], int)
        return cls(
            estimator=estimator,
            filter_gain=gain,
            gravity=gravity,
            calibration_samples=calib,
            precompensated=pre,
            vel_eps=_number("vel_eps", v["vel_eps"]),
            fz_eps=_number("fz_eps", v["fz_eps"], positive=False),
            schmitt_high=high,
            schmitt_low=low,
            threshold=threshold,
            histogram_bins=bins,
            include_warmup=_bool("include_warmup", v["include_warmup"]),
            raw=dict(v),
        )

    def preprocessor(self) -> Preprocessor:
        return Preprocessor(
            gain=self.filter_gain,
            gravity=self.gravity,
            calibration_samples=self.calibration_samples,
            noise=self.estimator.noise,
        )


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    out = {}
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX) :].lower()
            if key in DEFAULTS:
                out[key] = value
    return out


def load_config(path: str | Path | None = None, environ: Mapping[str, str] | None = None) -> RunConfig:
    values: dict[str, Any] = {}
    if path is not None:
        with open(path) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, Mapping):
            raise ValidationError(f"config file {path} must contain a key-value mapping")
        values.update(loaded)
    values.update(env_overrides(environ))
    return RunConfig.from_mapping(values)
