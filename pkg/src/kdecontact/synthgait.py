"""Seeded generator of labelled single-foot gait traces.

A scenario is an ordered list of phases. Kinematics per phase, in the foot
frame (x forward, z up):

* ``stance`` / ``soft_stance``: the foot is still; ``F_z`` is the nominal
  load times ``force_scale`` (0.5 by default for soft ground).
* ``impact``: touchdown ringing. Vertical velocity and pitch rate follow
  ``A exp(-decay t) sin(2 pi f t)``; ``F_z`` rings around its nominal value.
  Labels flicker stable/unstable at the velocity zero crossings.
* ``slip``: the applied tangential force ``r F_z`` exceeds ``mu_s F_z``, so
  the foot slides forward with acceleration ``(r - mu_k) F_z / m`` until the
  phase ends (lift-off while sliding).
* ``swing``: ``F_z = 0``; cycloidal forward motion, a raised-cosine lift and
  a full-period pitch rate, so the foot never rests mid-swing.

During every contact phase the applied tangential force is ``r F_z`` with
``r = tangential_ratio``; whether a contact sticks or slips is therefore
decided by the phase's friction alone, and ``stance`` phases that would
violate the friction cone are rejected.

Noise is ``numpy.random.Generator(PCG64(seed)).standard_normal((n, 6))``
scaled by the per-axis sigma, drawn once before anything else. Two
scenarios with the same seed and kinematics therefore share IMU channels
bit for bit, whatever their forces.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from .contactmodel import (
    DEFAULT_FZ_EPS,
    DEFAULT_VEL_EPS,
    ForceSample,
    FrictionModel,
    GroundTruthLabel,
    label_arrays,
)
from .core import DEFAULT_NOISE, FootId, ImuSample, NoiseModel, ValidationError
from .preprocess import (
    BiasEstimate,
    GravityModel,
    quat_from_rotvec,
    quat_mul,
    quat_normalize,
    rotate_inverse,
)

PHASE_KINDS = ("stance", "swing", "slip", "impact", "soft_stance")
CONTACT_KINDS = ("stance", "slip", "impact", "soft_stance")
PRNG_NAME = "numpy.random.PCG64/Generator.standard_normal"
LABEL_CONVENTION = "stable iff F_z > fz_eps and |v| <= vel_eps and |omega| <= vel_eps; swing is unstable"

STABLE_FLOOR = FrictionModel(0.1, 0.08)
SLIPPERY_FLOOR = FrictionModel(0.03, 0.025)
GREASED_FLOOR = FrictionModel(0.01, 0.008)


@dataclass(frozen=True)
class Phase:
    kind: str
    duration: float
    friction: FrictionModel = STABLE_FLOOR
    step: int = 0
    force_scale: float | None = None
    stride: float = 0.3  # swing forward travel, m
    lift: float = 0.1  # swing apex height, m
    pitch_rate: float = 2.0  # swing pitch-rate amplitude, rad/s
    impact_velocity: float = 0.05  # m/s
    impact_rate: float = 0.2  # rad/s

    def __post_init__(self) -> None:
        if self.kind not in PHASE_KINDS:
            raise ValidationError(f"unknown phase kind {self.kind!r}; expected one of {PHASE_KINDS}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValidationError(f"phase duration must be > 0, got {self.duration}")
        if self.force_scale is None:
            object.__setattr__(self, "force_scale", 0.5 if self.kind == "soft_stance" else 1.0)
        if not self.force_scale > 0:
            raise ValidationError("force_scale must be > 0")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Phase:
        d = dict(d)
        fr = d.pop("friction", None)
        if isinstance(fr, Mapping):
            d["friction"] = FrictionModel(float(fr["mu_s"]), fr.get("mu_k"))
        elif fr is not None:
            d["friction"] = FrictionModel(float(fr))
        return cls(**d)


@dataclass(frozen=True)
class GaitScenario:
    phases: tuple[Phase, ...]
    sample_rate: float = 1000.0
    noise: NoiseModel | None = DEFAULT_NOISE  # None: noiseless
    seed: int = 0
    name: str = "custom"
    foot: FootId = FootId.R
    normal_force: float = 800.0  # N, nominal stance load
    tangential_ratio: float = 0.04
    foot_mass: float = 2.0  # kg, effective mass driven during slip
    impact_freq: float = 30.0  # Hz
    impact_decay: float = 10.0  # 1/s
    window: int = 50
    embed_gravity: bool = False
    initial_tilt: tuple[float, float] = (0.05, -0.03)  # roll, pitch in rad
    bias_a: tuple[float, float, float] = (0.05, -0.03, 0.08)
    bias_w: tuple[float, float, float] = (0.004, -0.002, 0.003)

    def __post_init__(self) -> None:
        phases = tuple(p if isinstance(p, Phase) else Phase.from_dict(p) for p in self.phases)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "foot", FootId.parse(self.foot))
        if self.noise is not None and not isinstance(self.noise, NoiseModel):
            object.__setattr__(self, "noise", NoiseModel(self.noise))
        if not phases:
            raise ValidationError("scenario needs at least one phase")
        if not self.sample_rate > 0 or not self.normal_force > 0 or not self.foot_mass > 0:
            raise ValidationError("sample_rate, normal_force and foot_mass must be > 0")
        for i, p in enumerate(phases):
            slips = self.tangential_ratio > p.friction.mu_s
            if p.kind in ("stance", "soft_stance") and slips:
                raise ValidationError(
                    f"phase {i} ({p.kind}) would slip: tangential ratio {self.tangential_ratio} > mu_s {p.friction.mu_s}"
                )
            if p.kind == "slip" and not slips:
                raise ValidationError(
                    f"phase {i} (slip) cannot slip: tangential ratio {self.tangential_ratio} <= mu_s {p.friction.mu_s}"
                )
        if self.n_samples < 2 * self.window:
            raise ValidationError(f"scenario yields {self.n_samples} samples, need >= {2 * self.window}")

    @property
    def boundaries(self) -> np.ndarray:
        cum = np.cumsum([0.0] + [p.duration for p in self.phases])
        return np.floor(cum * self.sample_rate + 1e-9).astype(int)

    @property
    def n_samples(self) -> int:
        return int(self.boundaries[-1])

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["noise"] = None if self.noise is None else [float(s) for s in self.noise.sigma]
        d["foot"] = self.foot.value
        d["phases"] = [
            {**{k: v for k, v in asdict(p).items() if k != "friction"}, "friction": asdict(p.friction)}
            for p in self.phases
        ]
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> GaitScenario:
        d = dict(d)
        d["phases"] = tuple(Phase.from_dict(p) for p in d["phases"])
        if d.get("noise") is not None and not isinstance(d["noise"], NoiseModel):
            d["noise"] = NoiseModel(np.asarray(d["noise"], dtype=float))
        for key in ("initial_tilt", "bias_a", "bias_w"):
            if key in d:
                d[key] = tuple(float(x) for x in d[key])
        return cls(**d)


@dataclass
class GaitTrace:
    """Time-aligned channels of one foot trace, stored as arrays.

    Generated traces fill every channel; traces read from CSV may lack the
    optional ones, which are then None.
    """

    t: np.ndarray
    foot: FootId
    imu: np.ndarray  # (n, 6)
    forces: np.ndarray | None = None  # (n, 3)
    true_vel: np.ndarray | None = None  # (n, 3)
    true_angvel: np.ndarray | None = None  # (n, 3)
    stable: np.ndarray | None = None
    in_contact: np.ndarray | None = None
    phase: np.ndarray | None = None
    step: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def precompensated(self) -> bool:
        return bool(self.meta.get("precompensated", True))

    def imu_samples(self) -> list[ImuSample]:
        return [ImuSample(t, v[:3], v[3:], self.foot) for t, v in zip(self.t, self.imu)]

    def force_samples(self) -> list[ForceSample]:
        return [ForceSample(t, f, self.foot) for t, f in zip(self.t, self.forces)]

    def labels(self) -> list[GroundTruthLabel]:
        return [
            GroundTruthLabel(float(t), self.foot, bool(s), bool(c))
            for t, s, c in zip(self.t, self.stable, self.in_contact)
        ]


def _phase_kinematics(p: Phase, tau: np.ndarray, sc: GaitScenario, v0: float):
    """True accel, angular rate, velocity and force for one phase.

    ``v0`` is the forward velocity carried in from the previous phase.
    """
    n = tau.size
    acc = np.zeros((n, 3))
    angvel = np.zeros((n, 3))
    vel = np.zeros((n, 3))
    force = np.zeros((n, 3))
    fz_nom = sc.normal_force * p.force_scale
    if p.kind in ("stance", "soft_stance"):
        force[:, 2] = fz_nom
    elif p.kind == "impact":
        env = np.exp(-sc.impact_decay * tau)
        wt = 2.0 * math.pi * sc.impact_freq
        s, c = np.sin(wt * tau), np.cos(wt * tau)
        vel[:, 2] = p.impact_velocity * env * s
        acc[:, 2] = p.impact_velocity * env * (wt * c - sc.impact_decay * s)
        angvel[:, 1] = p.impact_rate * env * s
        force[:, 2] = fz_nom * (1.0 + 0.3 * env * s)
    elif p.kind == "slip":
        force[:, 2] = fz_nom
        a = (sc.tangential_ratio - p.friction.mu_k) * fz_nom / sc.foot_mass
        acc[:, 0] = a
        vel[:, 0] = v0 + a * tau
    else:  # swing
        T = p.duration
        ph = 2.0 * math.pi * tau / T
        acc[:, 0] = p.stride / T**2 * 2.0 * math.pi * np.sin(ph) - v0 / T
        vel[:, 0] = p.stride / T * (1.0 - np.cos(ph)) + v0 * (1.0 - tau / T)
        acc[:, 2] = 2.0 * math.pi**2 * p.lift / T**2 * np.cos(ph)
        vel[:, 2] = math.pi * p.lift / T * np.sin(ph)
        angvel[:, 1] = p.pitch_rate * np.sin(ph)
    if p.kind != "swing":
        force[:, 0] = sc.tangential_ratio * force[:, 2]
    return acc, angvel, vel, force


def _embed_gravity(sc: GaitScenario, t: np.ndarray, acc: np.ndarray, angvel: np.ndarray) -> np.ndarray:
    """Raw readings: attitude integrated from the true rates, then gravity and bias added."""
    gravity = GravityModel()
    bias = BiasEstimate(sc.bias_a, sc.bias_w)
    roll, pitch = sc.initial_tilt
    q = quat_mul(quat_from_rotvec(0.0, pitch, 0.0), quat_from_rotvec(roll, 0.0, 0.0))
    raw_a = np.empty_like(acc)
    for i in range(len(t)):
        if i:
            dt = t[i] - t[i - 1]
            w = angvel[i - 1] * dt
            q = quat_normalize(quat_mul(q, quat_from_rotvec(*w)))
        raw_a[i] = acc[i] + rotate_inverse(q, gravity.reaction)
    return np.hstack((raw_a + bias.b_a, angvel + bias.b_w))


def generate(
    scenario: GaitScenario,
    vel_eps: float = DEFAULT_VEL_EPS,
    fz_eps: float = DEFAULT_FZ_EPS,
) -> GaitTrace:
    sc = scenario
    n = sc.n_samples
    if sc.noise is None:
        noise = np.zeros((n, 6))
    else:
        rng = np.random.Generator(np.random.PCG64(sc.seed))
        noise = rng.standard_normal((n, 6)) * np.asarray(sc.noise.sigma)

    t = np.arange(n) / sc.sample_rate
    acc = np.zeros((n, 3))
    angvel = np.zeros((n, 3))
    vel = np.zeros((n, 3))
    force = np.zeros((n, 3))
    phase = np.empty(n, dtype=object)
    step = np.zeros(n, dtype=int)
    v0 = 0.0
    b = sc.boundaries
    for p, lo, hi in zip(sc.phases, b[:-1], b[1:]):
        if hi <= lo:
            continue
        tau = (np.arange(lo, hi) - lo) / sc.sample_rate
        if p.kind not in ("slip", "swing"):
            v0 = 0.0
        a_, w_, v_, f_ = _phase_kinematics(p, tau, sc, v0)
        acc[lo:hi], angvel[lo:hi], vel[lo:hi], force[lo:hi] = a_, w_, v_, f_
        phase[lo:hi] = p.kind
        step[lo:hi] = p.step
        # velocity at the end of the phase, carried forward
        v0 = float(vel[hi - 1, 0] + acc[hi - 1, 0] / sc.sample_rate) if p.kind == "slip" else 0.0

    if sc.embed_gravity:
        imu = _embed_gravity(sc, t, acc, angvel) + noise
    else:
        imu = np.hstack((acc, angvel)) + noise
    stable, in_contact = label_arrays(force, vel, angvel, vel_eps, fz_eps)
    meta = {
        "scenario": sc.to_dict(),
        "name": sc.name,
        "seed": sc.seed,
        "sample_rate": sc.sample_rate,
        "prng": PRNG_NAME,
        "precompensated": not sc.embed_gravity,
        "label_convention": LABEL_CONVENTION,
        "vel_eps": vel_eps,
        "fz_eps": fz_eps,
    }
    return GaitTrace(t, sc.foot, imu, force, vel, angvel, stable, in_contact, phase.astype(str), step, meta)


def _walk(
    floors: list[FrictionModel],
    soft: list[bool] | None = None,
    double_support: float = 0.6,
    swing: float = 0.4,
    impact: float = 0.06,
    stance: float = 0.54,
    tangential_ratio: float = 0.04,
) -> tuple[Phase, ...]:
    phases = [Phase("stance", double_support, STABLE_FLOOR, step=0)]
    soft = soft or [False] * len(floors)
    for k, (floor, is_soft) in enumerate(zip(floors, soft), start=1):
        scale = 0.5 if is_soft else 1.0
        slipping = tangential_ratio > floor.mu_s
        phases.append(Phase("swing", swing, floor, step=k))
        phases.append(Phase("impact", impact, floor, step=k, force_scale=scale))
        if slipping:
            kind = "slip"
        else:
            kind = "soft_stance" if is_soft else "stance"
        phases.append(Phase(kind, stance, floor, step=k, force_scale=scale))
    return tuple(phases)


def builtin_scenarios(seed: int = 0) -> dict[str, GaitScenario]:
    """Built-in walks: one stance, then right-foot steps.

    ``slip_walk`` steps 2-3 land on mu_s = 0.03; ``soft_walk`` repeats
    ``stable_walk`` with half the load on steps 2-3; ``grease_walk`` slips
    hard for three steps before two normal ones.
    """
    S, P, G = STABLE_FLOOR, SLIPPERY_FLOOR, GREASED_FLOOR
    specs = {
        "stable_walk": _walk([S, S, S]),
        "slip_walk": _walk([S, P, P]),
        "soft_walk": _walk([S, S, S], soft=[False, True, True]),
        "grease_walk": _walk([G, G, G, S, S]),
    }
    return {name: GaitScenario(phases, seed=seed, name=name) for name, phases in specs.items()}


def with_seed(scenario: GaitScenario, seed: int) -> GaitScenario:
    return replace(scenario, seed=seed)
