"""Bias and gravity removal for raw foot IMU readings.

Sign convention: an accelerometer at rest reads the reaction to gravity,
``+9.81`` along the world up axis. With ``g = (0, 0, -9.80665)`` a raw
reading is ``a_true + R^T (-g) + b_a + noise`` where ``R`` rotates foot-frame
vectors into the world frame.

Attitude is a unit quaternion ``(w, x, y, z)`` mapping foot to world. It is
tracked by a complementary filter: body-rate integration followed by a
partial rotation that pulls the measured specific-force direction toward
world up. Yaw is not observable from the accelerometer and is left to drift;
only tilt matters for gravity removal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ImuSample, NoiseModel, ValidationError

Quat = tuple[float, float, float, float]

IDENTITY: Quat = (1.0, 0.0, 0.0, 0.0)
STANDARD_GRAVITY = 9.80665
DEFAULT_GAIN = 0.02
DEFAULT_MAX_DT = 0.1
# Accelerometer correction fades from full weight to zero as | |a| - |g| |
# grows across ACCEL_GATE (fraction of |g|) or |w| grows across GYRO_GATE
# (rad/s): the accelerometer only measures tilt while the foot is still.
ACCEL_GATE = (0.02, 0.05)
GYRO_GATE = (0.1, 0.3)
MIN_CALIBRATION_SAMPLES = 100


class InsufficientDataError(ValidationError):
    pass


class MotionDetectedError(ValidationError):
    pass


class StaleStreamError(ValidationError):
    pass


# -- quaternion helpers (plain floats: this runs once per sample) ----------


def quat_mul(p: Quat, q: Quat) -> Quat:
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return (
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    )


def quat_normalize(q: Quat) -> Quat:
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if n == 0.0 or not math.isfinite(n):
        raise ValidationError("degenerate quaternion")
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def quat_from_rotvec(rx: float, ry: float, rz: float) -> Quat:
    angle = math.sqrt(rx * rx + ry * ry + rz * rz)
    if angle < 1e-12:
        # second-order series keeps tiny rotations exact to rounding
        return quat_normalize((1.0 - angle * angle / 8.0, 0.5 * rx, 0.5 * ry, 0.5 * rz))
    s = math.sin(0.5 * angle) / angle
    return (math.cos(0.5 * angle), rx * s, ry * s, rz * s)


def quat_to_matrix(q: Quat) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotate(q: Quat, v: Sequence[float]) -> tuple[float, float, float]:
    """Foot-frame vector -> world frame."""
    w, x, y, z = q
    vx, vy, vz = v
    # t = 2 * (q_vec x v); v' = v + w t + q_vec x t
    tx = 2.0 * (y * vz - z * vy)
    ty = 2.0 * (z * vx - x * vz)
    tz = 2.0 * (x * vy - y * vx)
    return (
        vx + w * tx + (y * tz - z * ty),
        vy + w * ty + (z * tx - x * tz),
        vz + w * tz + (x * ty - y * tx),
    )


def rotate_inverse(q: Quat, v: Sequence[float]) -> tuple[float, float, float]:
    """World-frame vector -> foot frame."""
    return rotate((q[0], -q[1], -q[2], -q[3]), v)


def tilt_angle(q: Quat) -> float:
    """Angle between the foot z axis and world up."""
    zx, zy, zz = rotate(q, (0.0, 0.0, 1.0))
    return math.acos(max(-1.0, min(1.0, zz)))


# -- types ------------------------------------------------------------------


@dataclass(frozen=True)
class GravityModel:
    g: tuple[float, float, float] = (0.0, 0.0, -STANDARD_GRAVITY)
    override: bool = False

    def __post_init__(self) -> None:
        g = tuple(float(c) for c in self.g)
        if len(g) != 3 or not all(math.isfinite(c) for c in g):
            raise ValidationError(f"gravity must be a finite 3-vector, got {self.g}")
        norm = math.sqrt(sum(c * c for c in g))
        if not self.override and not 9.7 <= norm <= 9.9:
            raise ValidationError(f"gravity norm {norm:.4f} outside [9.7, 9.9]; set override for simulation")
        object.__setattr__(self, "g", g)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.g))

    @property
    def reaction(self) -> tuple[float, float, float]:
        return (-self.g[0], -self.g[1], -self.g[2])


@dataclass(frozen=True)
class BiasEstimate:
    b_a: np.ndarray = np.zeros(3)
    b_w: np.ndarray = np.zeros(3)
    max_accel: float = 1.0
    max_gyro: float = 0.5

    def __post_init__(self) -> None:
        b_a = np.asarray(self.b_a, dtype=float).reshape(3)
        b_w = np.asarray(self.b_w, dtype=float).reshape(3)
        if not (np.all(np.isfinite(b_a)) and np.all(np.isfinite(b_w))):
            raise ValidationError("bias must be finite")
        if np.linalg.norm(b_a) > self.max_accel:
            raise ValidationError(f"accelerometer bias {np.linalg.norm(b_a):.3f} m/s^2 implausible")
        if np.linalg.norm(b_w) > self.max_gyro:
            raise ValidationError(f"gyroscope bias {np.linalg.norm(b_w):.3f} rad/s implausible")
        object.__setattr__(self, "b_a", b_a)
        object.__setattr__(self, "b_w", b_w)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BiasEstimate)
            and np.array_equal(self.b_a, other.b_a)
            and np.array_equal(self.b_w, other.b_w)
            and (self.max_accel, self.max_gyro) == (other.max_accel, other.max_gyro)
        )

    def __hash__(self) -> int:
        return hash((self.b_a.tobytes(), self.b_w.tobytes(), self.max_accel, self.max_gyro))


@dataclass(frozen=True)
class AttitudeState:
    q: Quat = IDENTITY
    t_last: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", quat_normalize(tuple(float(c) for c in self.q)))

    def matrix(self) -> np.ndarray:
        return quat_to_matrix(self.q)


# -- operations -------------------------------------------------------------


def calibrate_bias(
    stationary_samples: Sequence[ImuSample],
    gravity: GravityModel = GravityModel(),
    noise: NoiseModel | None = None,
    attitude: Quat | None = None,
) -> BiasEstimate:
    """Estimate constant biases from readings taken while the foot is still.

    Without a known ``attitude`` the gravity reaction is assumed to lie along
    the mean accelerometer direction, so any bias component across gravity
    is absorbed as tilt; ``initial_attitude`` makes the same assumption, and
    the pair compensates consistently.
    """
    n = len(stationary_samples)
    if n < MIN_CALIBRATION_SAMPLES:
        raise InsufficientDataError(f"need >= {MIN_CALIBRATION_SAMPLES} stationary samples, got {n}")
    acc = np.array([s.a for s in stationary_samples])
    gyr = np.array([s.w for s in stationary_samples])
    if noise is not None:
        var = np.concatenate((acc.var(axis=0), gyr.var(axis=0)))
        limit = 10.0 * np.square(noise.sigma)
        if np.any(var > limit):
            axis = int(np.flatnonzero(var > limit)[0])
            raise MotionDetectedError(f"variance on axis {axis} too high for a stationary foot", axis=axis)
    mean_a = acc.mean(axis=0)
    b_w = gyr.mean(axis=0)
    if attitude is not None:
        reaction = np.array(rotate_inverse(attitude, gravity.reaction))
    else:
        norm = np.linalg.norm(mean_a)
        if norm == 0.0:
            raise ValidationError("mean acceleration is zero; cannot locate gravity")
        reaction = gravity.norm * mean_a / norm
    return BiasEstimate(mean_a - reaction, b_w)


def _align_quat(src: Sequence[float], dst: Sequence[float], fraction: float = 1.0) -> Quat:
    """Rotation taking direction ``src`` toward ``dst`` by ``fraction`` of the angle."""
    sx, sy, sz = src
    dx, dy, dz = dst
    cx, cy, cz = sy * dz - sz * dy, sz * dx - sx * dz, sx * dy - sy * dx
    s = math.sqrt(cx * cx + cy * cy + cz * cz)
    c = sx * dx + sy * dy + sz * dz
    angle = math.atan2(s, c)
    if s < 1e-15:
        if c > 0.0:
            return IDENTITY
        # antiparallel: any perpendicular axis works
        ax = (1.0, 0.0, 0.0) if abs(sx) < 0.9 else (0.0, 1.0, 0.0)
        px, py, pz = sy * ax[2] - sz * ax[1], sz * ax[0] - sx * ax[2], sx * ax[1] - sy * ax[0]
        pn = math.sqrt(px * px + py * py + pz * pz)
        k = fraction * math.pi / pn
        return quat_from_rotvec(px * k, py * k, pz * k)
    k = fraction * angle / s
    return quat_from_rotvec(cx * k, cy * k, cz * k)


def _fade(x: float, band: tuple[float, float]) -> float:
    lo, hi = band
    return min(1.0, max(0.0, (hi - x) / (hi - lo)))


def _unit(v: Sequence[float]) -> tuple[float, float, float] | None:
    n = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if n < 1e-9:
        return None
    return (v[0] / n, v[1] / n, v[2] / n)


def initial_attitude(
    samples: Sequence[ImuSample],
    bias: BiasEstimate = BiasEstimate(),
    gravity: GravityModel = GravityModel(),
) -> AttitudeState:
    """Zero-yaw attitude whose tilt matches the mean bias-free specific force."""
    mean_a = np.mean([s.a for s in samples], axis=0) - bias.b_a
    src = _unit(mean_a)
    if src is None:
        return AttitudeState(IDENTITY, samples[0].t)
    return AttitudeState(_align_quat(src, _unit(gravity.reaction)), samples[0].t)


def filter_update(
    state: AttitudeState,
    raw: ImuSample,
    bias: BiasEstimate = BiasEstimate(),
    gain: float = DEFAULT_GAIN,
    gravity: GravityModel = GravityModel(),
    max_dt: float | None = DEFAULT_MAX_DT,
    gate: tuple[float, float] | None = ACCEL_GATE,
    gyro_gate: tuple[float, float] | None = GYRO_GATE,
) -> AttitudeState:
    """Advance the attitude to ``raw.t``.

    ``gain`` is the fraction of the tilt error removed per update: 0 is pure
    gyro integration, 1 snaps tilt to the accelerometer. ``gate`` scales the
    gain down while the specific-force magnitude is far from gravity and
    ``gyro_gate`` while the foot rotates; None disables either.
    """
    if not 0.0 <= gain <= 1.0:
        raise ValidationError(f"gain must be in [0, 1], got {gain}")
    dt = raw.t - state.t_last
    if not dt > 0.0:
        raise ValidationError(f"timestamp {raw.t} does not advance past {state.t_last}")
    if max_dt is not None and dt > max_dt:
        raise StaleStreamError(f"gap of {dt:.4f} s exceeds {max_dt} s")
    wx, wy, wz = (float(c) for c in raw.w - bias.b_w)
    q = quat_mul(state.q, quat_from_rotvec(wx * dt, wy * dt, wz * dt))
    if gain > 0.0:
        f = raw.a - bias.b_a
        meas = _unit(f)
        if meas is not None:
            weight = gain
            if gate is not None:
                err = abs(math.sqrt(float(f @ f)) - gravity.norm) / gravity.norm
                weight *= _fade(err, gate)
            if gyro_gate is not None:
                weight *= _fade(math.sqrt(wx * wx + wy * wy + wz * wz), gyro_gate)
            if weight > 0.0:
                q = quat_mul(_align_quat(rotate(q, meas), _unit(gravity.reaction), weight), q)
    return AttitudeState(q, raw.t)


def compensate(
    raw: ImuSample,
    state: AttitudeState,
    bias: BiasEstimate = BiasEstimate(),
    gravity: GravityModel = GravityModel(),
) -> ImuSample:
    """Strip bias and the gravity reaction from ``raw``."""
    reaction = np.array(rotate_inverse(state.q, gravity.reaction))
    return ImuSample(raw.t, raw.a - bias.b_a - reaction, raw.w - bias.b_w, raw.foot)


def synthesize_raw(
    t: float,
    true_a: Sequence[float],
    true_w: Sequence[float],
    q: Quat,
    bias: BiasEstimate = BiasEstimate(),
    gravity: GravityModel = GravityModel(),
    foot="R",
) -> ImuSample:
    """Forward measurement model without noise; inverse of ``compensate``."""
    reaction = np.array(rotate_inverse(q, gravity.reaction))
    a = np.asarray(true_a, dtype=float) + reaction + bias.b_a
    w = np.asarray(true_w, dtype=float) + bias.b_w
    return ImuSample(t, a, w, foot)


@dataclass
class Preprocessor:
    """Batch front end: calibrate on a leading still segment, then filter."""

    gain: float = DEFAULT_GAIN
    gravity: GravityModel = GravityModel()
    calibration_samples: int = 500
    noise: NoiseModel | None = None
    max_dt: float | None = DEFAULT_MAX_DT
    gate: tuple[float, float] | None = ACCEL_GATE
    gyro_gate: tuple[float, float] | None = GYRO_GATE

    def run(self, samples: Sequence[ImuSample]) -> list[ImuSample]:
        """Return one compensated sample per input sample."""
        if not samples:
            return []
        head = samples[: self.calibration_samples]
        bias = calibrate_bias(head, self.gravity, self.noise)
        state = initial_attitude(head, bias, self.gravity)
        out = [compensate(samples[0], state, bias, self.gravity)]
        for raw in samples[1:]:
            state = filter_update(state, raw, bias, self.gain, self.gravity, self.max_dt, self.gate, self.gyro_gate)
            out.append(compensate(raw, state, bias, self.gravity))
        self.bias, self.state = bias, state
        return out
