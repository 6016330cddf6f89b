"""Value types shared across the package and the per-foot sample window.

Axis ordering is fixed everywhere: ``(a_x, a_y, a_z, w_x, w_y, w_z)`` at
indices 0-5. Linear accelerations are in m/s^2, angular rates in rad/s.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

AXES = ("ax", "ay", "az", "wx", "wy", "wz")
N_AXES = 6

# Axis indices fused into each stability group.
TANGENTIAL_AXES = (0, 1, 5)
ROTATIONAL_AXES = (2, 3, 4)

PROB_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a value-type invariant.

    ``axis`` is set when the offending value belongs to one IMU axis.
    """

    def __init__(self, message: str, axis: int | None = None) -> None:
        super().__init__(message)
        self.axis = axis


class FootId(str, enum.Enum):
    L = "L"
    R = "R"
    RL = "RL"
    RR = "RR"
    FL = "FL"
    FR = "FR"

    @property
    def family(self) -> str:
        return "biped" if self in (FootId.L, FootId.R) else "quadruped"

    @classmethod
    def parse(cls, value: FootId | str) -> FootId:
        if isinstance(value, FootId):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValidationError(
                f"unknown foot id {value!r}; expected one of {[f.value for f in cls]}"
            ) from None


def check_foot_family(feet: Iterable[FootId | str]) -> str | None:
    """Return the single foot family in ``feet``; reject biped/quadruped mixes."""
    families = {FootId.parse(f).family for f in feet}
    if len(families) > 1:
        raise ValidationError("biped (L/R) and quadruped (RL/RR/FL/FR) feet mixed in one trace")
    return families.pop() if families else None


def _finite_vector(values: Sequence[float], name: str, size: int, offset: int = 0) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (size,):
        raise ValidationError(f"{name} must have {size} components, got shape {arr.shape}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        axis = int(bad[0]) + offset
        raise ValidationError(f"{name} has non-finite value on axis {axis} ({AXES[axis]})", axis=axis)
    return arr


@dataclass(frozen=True)
class ImuSample:
    """One timestamped six-axis reading from a foot-mounted IMU."""

    t: float
    a: np.ndarray
    w: np.ndarray
    foot: FootId = FootId.R

    def __post_init__(self) -> None:
        t = float(self.t)
        if not math.isfinite(t) or t < 0.0:
            raise ValidationError(f"sample time must be finite and non-negative, got {self.t}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "a", _finite_vector(self.a, "acceleration", 3))
        object.__setattr__(self, "w", _finite_vector(self.w, "angular velocity", 3, offset=3))
        object.__setattr__(self, "foot", FootId.parse(self.foot))

    @classmethod
    def from_vector(cls, t: float, v: Sequence[float], foot: FootId | str = FootId.R) -> ImuSample:
        v = np.asarray(v, dtype=float)
        return cls(t, v[:3], v[3:6], foot)

    def vector(self) -> np.ndarray:
        return np.concatenate((self.a, self.w))


@dataclass(frozen=True)
class NoiseModel:
    """Per-axis noise standard deviations; doubles as the KDE bandwidth."""

    sigma: np.ndarray

    def __post_init__(self) -> None:
        sigma = _finite_vector(self.sigma, "sigma", N_AXES)
        if np.any(sigma <= 0.0):
            axis = int(np.flatnonzero(sigma <= 0.0)[0])
            raise ValidationError(f"sigma must be strictly positive (axis {axis})", axis=axis)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NoiseModel) and np.array_equal(self.sigma, other.sigma)

    def __hash__(self) -> int:
        return hash(self.sigma.tobytes())

    @classmethod
    def from_accel_gyro(cls, sigma_a: float, sigma_w: float) -> NoiseModel:
        return cls(np.array([sigma_a] * 3 + [sigma_w] * 3))


# Default zero-mean sensor noise: accelerometer m/s^2, gyroscope rad/s.
DEFAULT_SIGMA_A = 0.02467
DEFAULT_SIGMA_W = 0.01653
DEFAULT_NOISE = NoiseModel.from_accel_gyro(DEFAULT_SIGMA_A, DEFAULT_SIGMA_W)


@dataclass(frozen=True)
class DeltaThresholds:
    """Half-widths of the per-axis interval ``[-delta, delta]``."""

    delta: np.ndarray

    def __post_init__(self) -> None:
        delta = _finite_vector(self.delta, "delta", N_AXES)
        if np.any(delta <= 0.0):
            axis = int(np.flatnonzero(delta <= 0.0)[0])
            raise ValidationError(f"delta must be strictly positive (axis {axis})", axis=axis)
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DeltaThresholds) and np.array_equal(self.delta, other.delta)

    def __hash__(self) -> int:
        return hash(self.delta.tobytes())

    @classmethod
    def from_sigma(cls, noise: NoiseModel, k: float) -> DeltaThresholds:
        return cls(np.asarray(noise.sigma) * float(k))


class SampleWindow:
    """Fixed-capacity FIFO of six-axis vectors, oldest first.

    Each vector is written twice into a buffer of length ``2 * capacity`` so
    the live contents are always one contiguous slice; no copies on read.
    """

    def __init__(self, capacity: int) -> None:
        if int(capacity) < 1:
            raise ValidationError(f"window capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self._buf = np.zeros((2 * self.capacity, N_AXES))
        self._head = 0  # slot the next vector goes into, in [0, capacity)
        self.fill = 0

    def __len__(self) -> int:
        return self.fill

    @property
    def full(self) -> bool:
        return self.fill == self.capacity

    def push(self, v: Sequence[float]) -> SampleWindow:
        v = _finite_vector(v, "sample", N_AXES)
        self._push_unchecked(v)
        return self

    def _push_unchecked(self, v: np.ndarray) -> None:
        cap, h = self.capacity, self._head
        self._buf[h] = v
        self._buf[h + cap] = v
        self._head = (h + 1) % cap
        if self.fill < cap:
            self.fill += 1

    def view(self) -> np.ndarray:
        """Read-only ``(fill, 6)`` view ordered oldest to newest."""
        if self.fill < self.capacity:
            out = self._buf[: self.fill]
        else:
            out = self._buf[self._head : self._head + self.capacity]
        out = out.view()
        out.setflags(write=False)
        return out

    def snapshot(self) -> np.ndarray:
        return self.view().copy()

    def axis(self, k: int) -> np.ndarray:
        if not 0 <= k < N_AXES:
            raise IndexError(f"axis must be in 0..5, got {k}")
        return self.view()[:, k].copy()

    def newest(self) -> np.ndarray:
        if self.fill == 0:
            raise IndexError("window is empty")
        return self._buf[(self._head - 1) % self.capacity].copy()


def window_push(window: SampleWindow, v: Sequence[float]) -> SampleWindow:
    return window.push(v)


def window_axis(window: SampleWindow, axis: int) -> np.ndarray:
    return window.axis(axis)


@dataclass(frozen=True)
class ContactEstimate:
    """Stable-contact probabilities for one foot at one instant.

    ``warm`` is False while the window has fewer than its configured samples.
    """

    t: float
    foot: FootId
    axis_probs: tuple[float, ...]
    p_tangential: float
    p_rotational: float
    p_total: float
    warm: bool = True
    fill: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if len(self.axis_probs) != N_AXES:
            raise ValidationError("axis_probs must have 6 entries")
        for name, p in (
            *((f"axis_probs[{i}]", p) for i, p in enumerate(self.axis_probs)),
            ("p_tangential", self.p_tangential),
            ("p_rotational", self.p_rotational),
            ("p_total", self.p_total),
        ):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"{name} = {p} outside [0, 1]")
        pr = self.axis_probs
        tan = pr[0] * pr[1] * pr[5]
        rot = pr[2] * pr[3] * pr[4]
        if (
            abs(self.p_tangential - tan) > PROB_TOL
            or abs(self.p_rotational - rot) > PROB_TOL
            or abs(self.p_total - tan * rot) > PROB_TOL
        ):
            raise ValidationError("fused probabilities inconsistent with axis_probs")

    @classmethod
    def from_axis_probs(
        cls,
        t: float,
        foot: FootId | str,
        axis_probs: Sequence[float],
        warm: bool = True,
        fill: int = 0,
    ) -> ContactEstimate:
        pr = tuple(min(1.0, max(0.0, float(p))) for p in axis_probs)
        tan = pr[0] * pr[1] * pr[5]
        rot = pr[2] * pr[3] * pr[4]
        return cls(float(t), FootId.parse(foot), pr, tan, rot, tan * rot, bool(warm), fill)
