"""Streaming per-foot stable-contact estimator.

Each step pushes the preprocessed sample into the foot's window, fits one
Gaussian KDE per axis with the sensor sigma as bandwidth, integrates it over
``[-delta, delta]`` and multiplies the six masses.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DEFAULT_NOISE,
    ContactEstimate,
    DeltaThresholds,
    FootId,
    ImuSample,
    NoiseModel,
    SampleWindow,
    ValidationError,
)
from .kde import interval_mass

DEFAULT_WINDOW = 50
DEFAULT_RATE_HZ = 1000.0
# Three standard deviations of (noise + kernel), whose variance is 2 sigma^2.
DEFAULT_DELTA_SIGMAS = 3.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class EstimatorConfig:
    d: int = DEFAULT_WINDOW
    noise: NoiseModel = DEFAULT_NOISE
    delta: DeltaThresholds | None = None
    sample_rate: float = DEFAULT_RATE_HZ

    def __post_init__(self) -> None:
        d = int(self.d)
        if d < 2:
            raise ValidationError(f"window_size must be >= 2, got {self.d}")
        object.__setattr__(self, "d", d)
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise ValidationError(f"sample_rate_hz must be > 0, got {self.sample_rate}")
        if self.delta is None:
            object.__setattr__(self, "delta", DeltaThresholds.from_sigma(self.noise, DEFAULT_DELTA_SIGMAS))
        if d > self.sample_rate / 10.0:
            warnings.warn(
                f"window_size {d} exceeds a tenth of the {self.sample_rate:g} Hz sample rate",
                stacklevel=2,
            )


class FootEstimator:
    """Owns the window for one foot and turns samples into estimates."""

    def __init__(self, config: EstimatorConfig, foot: FootId | str | None = None) -> None:
        self.config = config
        self.window = SampleWindow(config.d)
        self.foot = None if foot is None else FootId.parse(foot)
        self.t_last: float | None = None
        self._h = np.asarray(config.noise.sigma)
        self._delta = np.asarray(config.delta.delta)

    @property
    def warm(self) -> bool:
        return self.window.full

    def reset(self) -> None:
        self.window = SampleWindow(self.config.d)
        self.t_last = None

    def step(self, sample: ImuSample) -> ContactEstimate | None:
        """Push ``sample``; return an estimate, or None until two samples are held."""
        if self.foot is None:
            self.foot = sample.foot
        elif sample.foot != self.foot:
            raise ValidationError(f"estimator for foot {self.foot.value} got sample for {sample.foot.value}")
        if self.t_last is not None and sample.t <= self.t_last:
            raise ValidationError(f"timestamp regression: {sample.t} after {self.t_last}")
        self.t_last = sample.t
        self.window._push_unchecked(np.concatenate((sample.a, sample.w)))
        if self.window.fill < 2:
            return None
        return ContactEstimate.from_axis_probs(
            sample.t, sample.foot, self.axis_probs(), warm=self.window.full, fill=self.window.fill
        )

    def axis_probs(self) -> np.ndarray:
        # (6, fill) so every axis reduces over its own samples in one call
        return interval_mass(self.window.view().T, self._h, self._delta)


def step(est: FootEstimator, sample: ImuSample) -> ContactEstimate | None:
    return est.step(sample)


def estimate_series(config: EstimatorConfig, samples: Iterable[ImuSample]) -> list[ContactEstimate]:
    """Run a fresh estimator over a single-foot, time-ordered sequence."""
    samples = list(samples)
    feet = {s.foot for s in samples}
    if len(feet) > 1:
        raise ValidationError(f"estimate_series needs a single foot, got {sorted(f.value for f in feet)}")
    est = FootEstimator(config)
    out = []
    for s in samples:
        e = est.step(s)
        if e is not None:
            out.append(e)
    return out


def estimates_to_array(estimates: Sequence[ContactEstimate]) -> np.ndarray:
    """``(n, 9)`` array: six axis probs, tangential, rotational, total."""
    return np.array([(*e.axis_probs, e.p_tangential, e.p_rotational, e.p_total) for e in estimates]).reshape(-1, 9)
