"""One-dimensional Gaussian kernel density estimate and its interval mass.

The interval mass is computed in closed form from the normal CDF, so no
quadrature happens at run time. The CDF is ``scipy.special.ndtr`` (Cephes,
built on ``erfc``); absolute error against a 50-digit reference stays below
1e-15 on the range the estimator uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .core import ValidationError

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def normal_cdf(x):
    """Standard normal CDF, elementwise."""
    return ndtr(x)


def gaussian_kernel(u):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(u))


@dataclass(frozen=True)
class Kde1d:
    samples: np.ndarray
    h: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float).reshape(-1)
        if samples.size == 0:
            raise ValidationError("KDE needs at least one sample")
        if not np.all(np.isfinite(samples)):
            raise ValidationError("KDE samples must be finite")
        h = float(self.h)
        if not (math.isfinite(h) and h > 0.0):
            raise ValidationError(f"bandwidth must be finite and > 0, got {self.h}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.samples.size

    def __call__(self, x):
        return kde_eval(self, x)


def kde_from_axis(values: Sequence[float], sigma: float) -> Kde1d:
    """Build the estimate for one axis with the sensor sigma as bandwidth."""
    return Kde1d(np.asarray(values, dtype=float), sigma)


def kde_eval(k: Kde1d, x):
    """Density at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    u = (x[..., None] - k.samples) / k.h
    out = gaussian_kernel(u).sum(axis=-1) / (k.n * k.h)
    return float(out) if out.ndim == 0 else out


def interval_mass(samples: np.ndarray, h, delta) -> np.ndarray:
    """Mass of the KDE inside ``[-delta, delta]``, reduced over the last axis.

    ``samples`` may be ``(n,)`` or ``(..., n)``; ``h`` and ``delta`` broadcast
    against the leading dimensions. The interval is symmetric, so each
    sample's contribution depends only on ``|m|``; folding keeps the lower
    CDF term at or below one half where ``ndtr`` is most accurate.
    """
    m = np.abs(samples)
    h = np.asarray(h, dtype=float)[..., None]
    delta = np.asarray(delta, dtype=float)[..., None]
    contrib = ndtr((delta - m) / h) - ndtr((-delta - m) / h)
    return np.clip(contrib.mean(axis=-1), 0.0, 1.0)


def kde_interval_prob(k: Kde1d, delta: float) -> float:
    """Probability mass of ``k`` over ``[-delta, delta]``."""
    delta = float(delta)
    if not delta > 0.0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    return float(interval_mass(k.samples, k.h, delta))
