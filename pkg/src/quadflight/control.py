"""Fixed-gain and nonlinear variable-gain (NLVG) PID, plus the cascaded
position -> attitude control law.

An NLVG channel slides each gain between a lower bound k1 and an upper
bound k1 + 2A with a half-cosine blend of a scheduling-signal magnitude
s (error, error rate, or error integral):

    gain(s) = k1                                          s <  delta1
            = k1 + A (1 - cos(pi (s - delta1)
                               / (delta2 - delta1)))      delta1 <= s <= delta2
            = k1 + 2A                                     s >  delta2

The blend is continuous and monotone, so the output always lies in
[k1, k1 + 2A] and attains the bounds exactly outside [delta1, delta2].

Two signal pairings are supported (`signal_pairing`):

  * "paper"   - kp scheduled on |e|, ki on |de/dt|, kd on |integral e|
  * "matched" - each gain scheduled on its own term's signal
                (kp on |e|, ki on |integral e|, kd on |de/dt|)

Either way the command is the conventional product form

    u = kp e + ki integral(e) + kd de/dt

with trapezoidal integral accumulation, clamp anti-windup, and a
backward-difference derivative (zero on the first sample).

Controller state is a value passed in and returned; nothing is mutated,
so distinct controller instances are trivially thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .dynamics import ControlInput, NonFiniteError, QuadParams, StateVector, saturate

__all__ = [
    "NegativeSignalError",
    "NlvgSchedule",
    "FixedGains",
    "NlvgGains",
    "ChannelGains",
    "PidChannelState",
    "CascadeChannels",
    "CascadeConfig",
    "CascadeResult",
    "nlvg_gain",
    "pid_step",
    "outer_to_attitude",
    "cascade_update",
    "reset",
]


class NegativeSignalError(ValueError):
    """Scheduling signals are magnitudes; a negative value is a caller bug."""


@dataclass(frozen=True)
class NlvgSchedule:
    """One gain's schedule: lower bound k1, half-range, blend thresholds."""

    k1: float
    half_range: float  # A; upper bound is k1 + 2A
    delta1: float
    delta2: float

    def __post_init__(self) -> None:
        if self.k1 < 0 or self.half_range < 0:
            raise ValueError("k1 and half_range must be nonnegative")
        if not 0 <= self.delta1 < self.delta2:
            raise ValueError("require 0 <= delta1 < delta2")

    @property
    def k2(self) -> float:
        return self.k1 + 2.0 * self.half_range


def nlvg_gain(s: float, sched: NlvgSchedule) -> float:
    """Evaluate the variable-gain blend at signal magnitude s >= 0."""
    if s < 0:
        raise NegativeSignalError(f"scheduling signal must be >= 0, got {s}")
    if s < sched.delta1:
        return sched.k1
    if s > sched.delta2:
        return sched.k1 + 2.0 * sched.half_range
    phase = math.pi * (s - sched.delta1) / (sched.delta2 - sched.delta1)
    return sched.k1 + sched.half_range * (1.0 - math.cos(phase))


@dataclass(frozen=True)
class FixedGains:
    kp: float
    ki: float
    kd: float
    integral_limit: float = 10.0

    def __post_init__(self) -> None:
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise ValueError("gains must be nonnegative")
        if self.integral_limit <= 0:
            raise ValueError("integral_limit must be positive")


@dataclass(frozen=True)
class NlvgGains:
    p: NlvgSchedule
    i: NlvgSchedule
    d: NlvgSchedule
    signal_pairing: str = "paper"  # "paper" | "matched"
    integral_limit: float = 10.0

    def __post_init__(self) -> None:
        if self.signal_pairing not in ("paper", "matched"):
            raise ValueError(f"unknown signal_pairing {self.signal_pairing!r}")
        if self.integral_limit <= 0:
            raise ValueError("integral_limit must be positive")


ChannelGains = Union[FixedGains, NlvgGains]


class PidChannelState(NamedTuple):
    integral: float = 0.0
    prev_error: float = 0.0
    prev_valid: bool = False


def pid_step(
    state: PidChannelState, error: float, dt: float, gains: ChannelGains
) -> tuple[float, PidChannelState]:
    """Advance one PID channel by one sample; returns (command, new state).

    The integral uses the trapezoid over [t-dt, t] (a rectangle on the
    first sample, where no previous error exists) and is clamped to
    +-integral_limit. The derivative is (e - e_prev)/dt, zero on the
    first sample.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not math.isfinite(error):
        raise NonFiniteError("non-finite error sample")

    if state.prev_valid:
        integral = state.integral + 0.5 * (error + state.prev_error) * dt
        e_dot = (error - state.prev_error) / dt
    else:
        integral = state.integral + error * dt
        e_dot = 0.0
    limit = gains.integral_limit
    if integral > limit:
        integral = limit
    elif integral < -limit:
        integral = -limit

    if type(gains) is FixedGains:
        kp, ki, kd = gains.kp, gains.ki, gains.kd
    else:
        kp = nlvg_gain(abs(error), gains.p)
        if gains.signal_pairing == "paper":
            ki = nlvg_gain(abs(e_dot), gains.i)
            kd = nlvg_gain(abs(integral), gains.d)
        else:
            ki = nlvg_gain(abs(integral), gains.i)
            kd = nlvg_gain(abs(e_dot), gains.d)

    command = kp * error + ki * integral + kd * e_dot
    return command, PidChannelState(integral, error, True)


def outer_to_attitude(
    ux: float, uy: float, psi: float, gravity: float, clamp: float
) -> tuple[float, float]:
    """Map commanded planar accelerations to small-angle attitude targets.

    Inverts the hover-thrust acceleration model x_dd ~ g(theta cos(psi)
    + phi sin(psi)), y_dd ~ g(theta sin(psi) - phi cos(psi)); both
    targets are clamped to +-clamp.
    """
    if gravity <= 0:
        raise ValueError("gravity must be positive")
    spsi, cpsi = math.sin(psi), math.cos(psi)
    phi_d = (ux * spsi - uy * cpsi) / gravity
    theta_d = (ux * cpsi + uy * spsi) / gravity
    phi_d = min(max(phi_d, -clamp), clamp)
    theta_d = min(max(theta_d, -clamp), clamp)
    return phi_d, theta_d


class CascadeChannels(NamedTuple):
    """Per-channel PID state for the six controlled channels."""

    x: PidChannelState
    y: PidChannelState
    z: PidChannelState
    phi: PidChannelState
    theta: PidChannelState
    psi: PidChannelState


def reset(_channels: Optional[CascadeChannels] = None) -> CascadeChannels:
    """Fresh channel state: zero integrals, no previous error. Idempotent."""
    empty = PidChannelState()
    return CascadeChannels(empty, empty, empty, empty, empty, empty)


@dataclass(frozen=True)
class CascadeConfig:
    """Gain set and limits for the cascaded controller on a given plant."""

    plant: QuadParams
    x: ChannelGains
    y: ChannelGains
    z: ChannelGains
    phi: ChannelGains
    theta: ChannelGains
    psi: ChannelGains
    attitude_clamp: float = 0.6  # rad, must stay below the 85 deg gimbal guard

    def __post_init__(self) -> None:
        if not 0 < self.attitude_clamp < math.radians(85.0):
            raise ValueError("attitude_clamp must be in (0, 85 deg)")


class CascadeResult(NamedTuple):
    control: ControlInput
    channels: CascadeChannels
    phi_d: float
    theta_d: float


# Thrust feedforward divides by cos(phi)cos(theta); floor the divisor so a
# wild transient cannot command near-infinite thrust (saturation would clip
# it anyway, but the floor keeps the value finite).
_MIN_TILT_COS = 0.1


def cascade_update(
    state: StateVector,
    ref,
    config: CascadeConfig,
    channels: CascadeChannels,
    dt: float,
) -> CascadeResult:
    """One step of the two-loop cascade; returns the saturated wrench.

    Outer loop: position errors -> planar acceleration commands (with
    the reference-acceleration feedforward) -> attitude targets; the z
    channel adds the gravity feedforward m g / (cos(phi) cos(theta)) so
    that hover at zero error is an exact fixed point. Inner loop: PID on
    attitude errors -> body torques.

    When the reference carries direct attitude targets (`ref.phi_d` /
    `ref.theta_d` not None) the outer x/y loop is bypassed: planar
    commands are zero and the x/y channel states are left untouched.
    """
    plant = config.plant

    if ref.phi_d is not None or ref.theta_d is not None:
        ux = uy = 0.0
        x_state, y_state = channels.x, channels.y
        phi_d = ref.phi_d if ref.phi_d is not None else 0.0
        theta_d = ref.theta_d if ref.theta_d is not None else 0.0
        clamp = config.attitude_clamp
        phi_d = min(max(phi_d, -clamp), clamp)
        theta_d = min(max(theta_d, -clamp), clamp)
    else:
        ax_cmd, x_state = pid_step(channels.x, ref.x - state.x, dt, config.x)
        ay_cmd, y_state = pid_step(channels.y, ref.y - state.y, dt, config.y)
        ux = ref.ax + ax_cmd
        uy = ref.ay + ay_cmd
        phi_d, theta_d = outer_to_attitude(
            ux, uy, state.psi, plant.gravity, config.attitude_clamp
        )

    z_cmd, z_state = pid_step(channels.z, ref.z - state.z, dt, config.z)
    tilt = math.cos(state.phi) * math.cos(state.theta)
    thrust = plant.mass * plant.gravity / max(tilt, _MIN_TILT_COS) + z_cmd

    tau_x, phi_state = pid_step(channels.phi, phi_d - state.phi, dt, config.phi)
    tau_y, theta_state = pid_step(channels.theta, theta_d - state.theta, dt, config.theta)
    tau_z, psi_state = pid_step(channels.psi, ref.psi_d - state.psi, dt, config.psi)

    control = saturate(ControlInput(ux, uy, thrust, tau_x, tau_y, tau_z), plant)
    new_channels = CascadeChannels(x_state, y_state, z_state, phi_state, theta_state, psi_state)
    return CascadeResult(control, new_channels, phi_d, theta_d)
