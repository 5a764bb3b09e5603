"""Reference-trajectory generators: step, outward storm spiral, 3D Lissajous.

Each generator returns position, analytic velocity, the planar
accelerations used by the outer-loop feedforward, and a yaw reference.
Attitude-step references (for inner-loop step-response runs) carry
direct tilt targets in ``phi_d`` / ``theta_d``; those bypass the outer
position loop in the cascade.

Path missions begin with a takeoff: hold the origin until ``t_takeoff``,
ramp linearly to the path entry point over ``ramp_time``, then fly the
path. Joins are position-continuous; velocity may jump there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

STEP_CHANNELS = ("x", "y", "z", "phi", "theta", "psi")
YAW_MODES = ("zero", "tangent")


class ReferenceSample(NamedTuple):
    t: float
    x: float
    y: float
    z: float
    vx: float
    vy: float
    vz: float
    ax: float  # feedforward accelerations, planar only
    ay: float
    psi_d: float
    phi_d: Optional[float] = None  # direct tilt targets; None = use outer loop
    theta_d: Optional[float] = None


@dataclass(frozen=True)
class StepSpec:
    channel: str
    amplitude: float
    t_start: float = 0.0

    def __post_init__(self) -> None:
        if self.channel not in STEP_CHANNELS:
            raise ValueError(f"channel must be one of {STEP_CHANNELS}")
        if self.t_start < 0:
            raise ValueError("t_start must be >= 0")


@dataclass(frozen=True)
class StormSpec:
    """Outward spiral at constant altitude (or a configured climb)."""

    r0: float = 1.0  # m, spiral entry radius
    radial_rate: float = 0.05  # m/s, radius growth
    omega: float = 0.15  # rad/s, angular rate
    z0: float = 10.0  # m, cruise altitude
    climb_rate: float = 0.0  # m/s, 0 holds altitude
    t_takeoff: float = 20.0  # s, hold origin until here
    ramp_time: float = 5.0  # s, takeoff ramp duration

    def __post_init__(self) -> None:
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.ramp_time <= 0 or self.t_takeoff < 0:
            raise ValueError("need ramp_time > 0 and t_takeoff >= 0")


@dataclass(frozen=True)
class LissajousSpec:
    """Figure-eight curve x = Ax sin(a w t), y = Ay sin(b w t + phase),
    z = z0 + Az sin(c w t)."""

    amp_x: float = 5.0
    amp_y: float = 5.0
    amp_z: float = 2.0
    a: int = 1
    b: int = 2
    c: int = 1
    phase: float = 0.0
    omega: float = 0.1  # rad/s
    z0: float = 10.0
    t_takeoff: float = 0.0
    ramp_time: float = 5.0

    def __post_init__(self) -> None:
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.ramp_time <= 0 or self.t_takeoff < 0:
            raise ValueError("need ramp_time > 0 and t_takeoff >= 0")


TrajectorySpec = Union[StepSpec, StormSpec, LissajousSpec]


def step_reference(spec: StepSpec, t: float) -> ReferenceSample:
    """Zero everywhere, amplitude on the named channel at/after t_start."""
    if t < 0:
        raise ValueError("t must be >= 0")
    value = spec.amplitude if t >= spec.t_start else 0.0
    pos = {"x": 0.0, "y": 0.0, "z": 0.0}
    psi_d = 0.0
    phi_d = theta_d = None
    if spec.channel in ("phi", "theta"):
        # attitude-step run: override both tilt targets for the whole run
        phi_d = value if spec.channel == "phi" else 0.0
        theta_d = value if spec.channel == "theta" else 0.0
    elif spec.channel == "psi":
        psi_d = value
    else:
        pos[spec.channel] = value
    return ReferenceSample(
        t, pos["x"], pos["y"], pos["z"], 0.0, 0.0, 0.0, 0.0, 0.0, psi_d, phi_d, theta_d
    )


def _spiral_at(spec: StormSpec, tau: float) -> ReferenceSample:
    r = spec.r0 + spec.radial_rate * tau
    ang = spec.omega * tau
    c, s = math.cos(ang), math.sin(ang)
    w, cdot = spec.omega, spec.radial_rate
    x = r * c
    y = r * s
    vx = cdot * c - r * w * s
    vy = cdot * s + r * w * c
    ax = -2.0 * cdot * w * s - r * w * w * c
    ay = 2.0 * cdot * w * c - r * w * w * s
    z = spec.z0 + spec.climb_rate * tau
    return ReferenceSample(tau, x, y, z, vx, vy, spec.climb_rate, ax, ay, 0.0)


def storm_reference(spec: StormSpec, t: float) -> ReferenceSample:
    """Hold origin, ramp to the spiral entry (r0, 0, z0), then spiral out."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t < spec.t_takeoff:
        return ReferenceSample(t, 0, 0, 0, 0, 0, 0, 0, 0, 0.0)
    t_entry = spec.t_takeoff + spec.ramp_time
    if t < t_entry:
        frac = (t - spec.t_takeoff) / spec.ramp_time
        vx = spec.r0 / spec.ramp_time
        vz = spec.z0 / spec.ramp_time
        return ReferenceSample(t, frac * spec.r0, 0.0, frac * spec.z0, vx, 0.0, vz, 0.0, 0.0, 0.0)
    sample = _spiral_at(spec, t - t_entry)
    return sample._replace(t=t)


def lissajous_reference(spec: LissajousSpec, t: float) -> ReferenceSample:
    """The pure curve (no takeoff phase); t=0 is the curve start."""
    if t < 0:
        raise ValueError("t must be >= 0")
    w = spec.omega
    pa, pb, pc = spec.a * w * t, spec.b * w * t + spec.phase, spec.c * w * t
    x = spec.amp_x * math.sin(pa)
    y = spec.amp_y * math.sin(pb)
    z = spec.z0 + spec.amp_z * math.sin(pc)
    vx = spec.amp_x * spec.a * w * math.cos(pa)
    vy = spec.amp_y * spec.b * w * math.cos(pb)
    vz = spec.amp_z * spec.c * w * math.cos(pc)
    ax = -spec.amp_x * (spec.a * w) ** 2 * math.sin(pa)
    ay = -spec.amp_y * (spec.b * w) ** 2 * math.sin(pb)
    return ReferenceSample(t, x, y, z, vx, vy, vz, ax, ay, 0.0)


def mission_reference(spec: TrajectorySpec, t: float) -> ReferenceSample:
    """Mission-level sample: step and storm directly, Lissajous behind its
    takeoff ramp (hold origin, ramp to the curve start, then the curve)."""
    if isinstance(spec, StepSpec):
        return step_reference(spec, t)
    if isinstance(spec, StormSpec):
        return storm_reference(spec, t)
    if t < spec.t_takeoff:
        return ReferenceSample(t, 0, 0, 0, 0, 0, 0, 0, 0, 0.0)
    t_entry = spec.t_takeoff + spec.ramp_time
    if t < t_entry:
        start = lissajous_reference(spec, 0.0)
        frac = (t - spec.t_takeoff) / spec.ramp_time
        return ReferenceSample(
            t,
            frac * start.x,
            frac * start.y,
            frac * start.z,
            start.x / spec.ramp_time,
            start.y / spec.ramp_time,
            start.z / spec.ramp_time,
            0.0,
            0.0,
            0.0,
        )
    return lissajous_reference(spec, t - t_entry)._replace(t=t)


def wrap_to_pi(angle: float) -> float:
    return math.atan2(math.sin(angle), math.cos(angle))


def yaw_policy(
    spec: TrajectorySpec,
    t: float,
    mode: str = "zero",
    prev: Optional[float] = None,
) -> float:
    """Yaw reference at time t.

    "zero" always returns 0. "tangent" points along the planar velocity,
    unwrapped to stay continuous with `prev`; at (near-)zero velocity it
    holds `prev` (0 if there is none).
    """
    if mode not in YAW_MODES:
        raise ValueError(f"yaw mode must be one of {YAW_MODES}")
    if mode == "zero":
        return 0.0
    sample = mission_reference(spec, t)
    speed = math.hypot(sample.vx, sample.vy)
    if speed < 1e-9:
        return prev if prev is not None else 0.0
    psi = math.atan2(sample.vy, sample.vx)
    if prev is None:
        return psi
    return prev + wrap_to_pi(psi - prev)


def sample_mission(
    spec: TrajectorySpec, dt: float, t_total: float, yaw_mode: str = "zero"
) -> list[ReferenceSample]:
    """Uniform-dt reference table over [0, t_total], yaw policy applied."""
    if dt <= 0 or t_total < dt:
        raise ValueError("need dt > 0 and t_total >= dt")
    n = int(round(t_total / dt))
    samples = []
    prev_psi: Optional[float] = None
    for k in range(n + 1):
        t = k * dt
        sample = mission_reference(spec, t)
        if yaw_mode != "zero":
            psi = yaw_policy(spec, t, yaw_mode, prev_psi)
            prev_psi = psi
            sample = sample._replace(psi_d=psi)
        samples.append(sample)
    return samples
