"""Force-side ground truth: Coulomb stability, trace labelling, Schmitt baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FootId, ValidationError

DEFAULT_VEL_EPS = 1e-3
DEFAULT_FZ_EPS = 1.0


@dataclass(frozen=True)
class ForceSample:
    t: float
    F: np.ndarray
    foot: FootId = FootId.R

    def __post_init__(self) -> None:
        F = np.asarray(self.F, dtype=float).reshape(3)
        if not np.all(np.isfinite(F)) or not math.isfinite(self.t):
            raise ValidationError("force sample must be finite")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "foot", FootId.parse(self.foot))


@dataclass(frozen=True)
class FrictionModel:
    mu_s: float
    mu_k: float | None = None

    def __post_init__(self) -> None:
        mu_k = self.mu_s if self.mu_k is None else self.mu_k
        if not (0.0 < mu_k <= self.mu_s):
            raise ValidationError(f"need 0 < mu_k <= mu_s, got mu_s={self.mu_s}, mu_k={mu_k}")
        object.__setattr__(self, "mu_k", float(mu_k))

    def static_limit(self, fz: float) -> float:
        return self.mu_s * fz

    def kinetic_force(self, fz: float) -> float:
        return self.mu_k * fz


@dataclass(frozen=True)
class GroundTruthLabel:
    t: float
    foot: FootId
    stable: bool
    in_contact: bool

    def __post_init__(self) -> None:
        if self.stable and not self.in_contact:
            raise ValidationError("a stable label requires contact")


def coulomb_stable(f: ForceSample | Sequence[float], mu_s: float) -> bool:
    """True when the tangential force lies inside the static friction cone."""
    F = f.F if isinstance(f, ForceSample) else np.asarray(f, dtype=float)
    fx, fy, fz = (float(c) for c in F)
    return fz > 0.0 and math.hypot(fx, fy) <= mu_s * fz


def label_arrays(
    forces: np.ndarray,
    velocities: np.ndarray,
    angular: np.ndarray,
    vel_eps: float = DEFAULT_VEL_EPS,
    fz_eps: float = DEFAULT_FZ_EPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised labeller on ``(n, 3)`` arrays; returns ``(stable, in_contact)``."""
    forces = np.asarray(forces, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    angular = np.asarray(angular, dtype=float)
    if not (len(forces) == len(velocities) == len(angular)):
        raise ValidationError(
            f"label inputs misaligned: {len(forces)} forces, {len(velocities)} velocities, {len(angular)} angular"
        )
    in_contact = forces[:, 2] > fz_eps
    still = (np.linalg.norm(velocities, axis=1) <= vel_eps) & (np.linalg.norm(angular, axis=1) <= vel_eps)
    return in_contact & still, in_contact


def label_trace(
    forces: Sequence[ForceSample],
    velocities: Sequence[Sequence[float]],
    angular: Sequence[Sequence[float]],
    vel_eps: float = DEFAULT_VEL_EPS,
    fz_eps: float = DEFAULT_FZ_EPS,
) -> list[GroundTruthLabel]:
    F = np.array([f.F for f in forces]).reshape(-1, 3)
    stable, contact = label_arrays(F, np.reshape(velocities, (-1, 3)), np.reshape(angular, (-1, 3)), vel_eps, fz_eps)
    return [
        GroundTruthLabel(f.t, f.foot, bool(s), bool(c)) for f, s, c in zip(forces, stable, contact)
    ]


class SchmittTrigger:
    """Two-threshold contact detector on vertical force."""

    def __init__(self, high: float, low: float, initial: bool = False) -> None:
        if not low < high:
            raise ValidationError(f"Schmitt thresholds need low < high, got low={low}, high={high}")
        self.high = high
        self.low = low
        self.state = bool(initial)

    def update(self, fz: float) -> bool:
        if fz > self.high:
            self.state = True
        elif fz < self.low:
            self.state = False
        return self.state


def schmitt_contact(fz_series: Sequence[float], high: float, low: float, initial: bool = False) -> list[bool]:
    trigger = SchmittTrigger(high, low, initial)
    return [trigger.update(float(fz)) for fz in fz_series]
