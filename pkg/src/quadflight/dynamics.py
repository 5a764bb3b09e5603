"""Rigid-body quadcopter model and fixed-step RK4 integrator.

X-configuration quadcopter with diagonal inertia, commanded at the
wrench level (total thrust + three body torques). Rotor allocation is
not modeled.

State (12 components, E-frame positions, B-frame treated as Euler
angles below the tilt guard):

    [phi, theta, psi, phi_dot, theta_dot, psi_dot,
     x, y, z, x_dot, y_dot, z_dot]

Translational dynamics (linear drag, thrust tilted by attitude):

    x_dd = (cos(phi) sin(theta) cos(psi) + sin(phi) sin(psi)) Ft/m - kdx x_d / m
    y_dd = (cos(phi) sin(theta) sin(psi) - sin(phi) cos(psi)) Ft/m - kdy y_d / m
    z_dd = (cos(phi) cos(theta)) Ft/m - g - kdz z_d / m

Rotational dynamics (gyroscopic coupling, torque per axis):

    phi_dd   = ((Iy - Iz) theta_d psi_d + tau_x) / Ix
    theta_dd = ((Iz - Ix) psi_d phi_d   + tau_y) / Iy
    psi_dd   = ((Ix - Iy) phi_d theta_d + tau_z) / Iz

Euler-angle rates are identified with body rates; this is only valid
for mild tilt, so any evaluation at |theta| >= 85 deg raises
GimbalLockError instead of silently clamping.

All functions here are pure: identical arguments give bitwise-identical
results, and nothing is mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

GIMBAL_GUARD_RAD = math.radians(85.0)


class GimbalLockError(ValueError):
    """Raised when Euler-rate kinematics are evaluated past the tilt guard."""


class NonFiniteError(ValueError):
    """Raised when a state or input component is NaN or infinite."""


class StateVector(NamedTuple):
    """Twelve-component quadcopter state (rad, rad/s, m, m/s)."""

    phi: float
    theta: float
    psi: float
    phi_dot: float
    theta_dot: float
    psi_dot: float
    x: float
    y: float
    z: float
    x_dot: float
    y_dot: float
    z_dot: float

    @classmethod
    def zero(cls) -> "StateVector":
        return cls(*([0.0] * 12))


class ControlInput(NamedTuple):
    """Wrench-level command: planar accelerations, total thrust, torques.

    ux/uy are the outer-loop acceleration commands (m/s^2); they steer
    the attitude references and are logged, but the plant acceleration
    comes from attitude + thrust, so `derivative` ignores them.
    """

    ux: float
    uy: float
    thrust: float  # Ft, N
    tau_x: float
    tau_y: float
    tau_z: float


@dataclass(frozen=True)
class QuadParams:
    """Physical plant parameters. Defaults are hobby-quad scale."""

    mass: float = 1.2  # kg
    ix: float = 0.015  # kg m^2
    iy: float = 0.015
    iz: float = 0.025
    gravity: float = 9.81  # m/s^2
    kdx: float = 0.1  # N s/m, linear drag per translational axis
    kdy: float = 0.1
    kdz: float = 0.1
    thrust_max: float = 4 * 1.2 * 9.81  # N, [0, thrust_max]
    torque_max: float = 1.0  # N m, symmetric per axis

    def __post_init__(self) -> None:
        if self.mass <= 0 or self.ix <= 0 or self.iy <= 0 or self.iz <= 0:
            raise ValueError("mass and inertias must be positive")
        if self.gravity <= 0:
            raise ValueError("gravity must be positive")
        if self.kdx < 0 or self.kdy < 0 or self.kdz < 0:
            raise ValueError("drag coefficients must be nonnegative")
        if self.thrust_max <= 0 or self.torque_max <= 0:
            raise ValueError("thrust and torque limits must be positive")


def derivative(state: StateVector, inp: ControlInput, params: QuadParams) -> StateVector:
    """Time derivative of the state under a constant wrench command.

    Raises GimbalLockError at |theta| >= 85 deg and NonFiniteError on
    any non-finite state/input component.
    """
    for v in state:
        if not math.isfinite(v):
            raise NonFiniteError("non-finite state component")
    for v in inp:
        if not math.isfinite(v):
            raise NonFiniteError("non-finite input component")
    if abs(state.theta) >= GIMBAL_GUARD_RAD:
        raise GimbalLockError(f"|theta|={abs(state.theta):.3f} rad exceeds 85 deg guard")

    m = params.mass
    sphi, cphi = math.sin(state.phi), math.cos(state.phi)
    sth, cth = math.sin(state.theta), math.cos(state.theta)
    spsi, cpsi = math.sin(state.psi), math.cos(state.psi)
    ft = inp.thrust

    x_dd = (cphi * sth * cpsi + sphi * spsi) * ft / m - params.kdx * state.x_dot / m
    y_dd = (cphi * sth * spsi - sphi * cpsi) * ft / m - params.kdy * state.y_dot / m
    z_dd = (cphi * cth) * ft / m - params.gravity - params.kdz * state.z_dot / m

    phi_dd = ((params.iy - params.iz) * state.theta_dot * state.psi_dot + inp.tau_x) / params.ix
    theta_dd = ((params.iz - params.ix) * state.psi_dot * state.phi_dot + inp.tau_y) / params.iy
    psi_dd = ((params.ix - params.iy) * state.phi_dot * state.theta_dot + inp.tau_z) / params.iz

    return StateVector(
        state.phi_dot, state.theta_dot, state.psi_dot,
        phi_dd, theta_dd, psi_dd,
        state.x_dot, state.y_dot, state.z_dot,
        x_dd, y_dd, z_dd,
    )


def step_rk4(state: StateVector, inp: ControlInput, params: QuadParams, dt: float) -> StateVector:
    """Classical RK4 step with the input held constant over dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    k1 = derivative(state, inp, params)
    h2 = 0.5 * dt
    k2 = derivative(StateVector(*(s + h2 * k for s, k in zip(state, k1))), inp, params)
    k3 = derivative(StateVector(*(s + h2 * k for s, k in zip(state, k2))), inp, params)
    k4 = derivative(StateVector(*(s + dt * k for s, k in zip(state, k3))), inp, params)
    w = dt / 6.0
    return StateVector(
        *(s + w * (a + 2.0 * b + 2.0 * c + d) for s, a, b, c, d in zip(state, k1, k2, k3, k4))
    )


def hover_input(params: QuadParams) -> ControlInput:
    """Wrench that exactly balances gravity at level attitude."""
    return ControlInput(0.0, 0.0, params.mass * params.gravity, 0.0, 0.0, 0.0)


def saturate(inp: ControlInput, params: QuadParams) -> ControlInput:
    """Clamp thrust to [0, thrust_max] and torques to +-torque_max.

    Idempotent; an in-range input is returned unchanged (same object).
    """
    ft = min(max(inp.thrust, 0.0), params.thrust_max)
    tm = params.torque_max
    tx = min(max(inp.tau_x, -tm), tm)
    ty = min(max(inp.tau_y, -tm), tm)
    tz = min(max(inp.tau_z, -tm), tm)
    if ft == inp.thrust and tx == inp.tau_x and ty == inp.tau_y and tz == inp.tau_z:
        return inp
    return ControlInput(inp.ux, inp.uy, ft, tx, ty, tz)
