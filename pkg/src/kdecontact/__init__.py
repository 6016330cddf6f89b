"""Stable foot-contact probability from foot-mounted IMU data via per-axis KDE."""

from .core import (
    AXES,
    ContactEstimate,
    DeltaThresholds,
    FootId,
    ImuSample,
    NoiseModel,
    DEFAULT_NOISE,
    SampleWindow,
    ValidationError,
    window_axis,
    window_push,
)
from .estimator import EstimatorConfig, FootEstimator, estimate_series, step
from .kde import Kde1d, kde_eval, kde_from_axis, kde_interval_prob

__all__ = [
    "AXES",
    "ContactEstimate",
    "DeltaThresholds",
    "EstimatorConfig",
    "FootEstimator",
    "FootId",
    "ImuSample",
    "Kde1d",
    "NoiseModel",
    "DEFAULT_NOISE",
    "SampleWindow",
    "ValidationError",
    "estimate_series",
    "kde_eval",
    "kde_from_axis",
    "kde_interval_prob",
    "step",
    "window_axis",
    "window_push",
]
