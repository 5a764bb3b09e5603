"""Plant-model unit tests: equilibria, closed-form fall oracles, RK4 order."""

import math

import pytest

from quadflight.dynamics import (
    ControlInput,
    GimbalLockError,
    NonFiniteError,
    QuadParams,
    StateVector,
    derivative,
    hover_input,
    saturate,
    step_rk4,
)

PARAMS = QuadParams()
DRAG_FREE = QuadParams(kdx=0.0, kdy=0.0, kdz=0.0)


def drag_fall_z(t: float, z0: float, params: QuadParams) -> float:
    """Closed-form altitude for a free fall with linear drag, from rest.

    z_dd = -g - (kd/m) z_d  =>  z(t) = z0 + g tau^2 (1 - e^(-t/tau)) - g tau t
    with tau = m/kd.
    """
    tau = params.mass / params.kdz
    g = params.gravity
    return z0 + g * tau * tau * (1.0 - math.exp(-t / tau)) - g * tau * t


def test_hover_equilibrium_derivative_is_zero():
    state = StateVector.zero()._replace(z=10.0)
    rate = derivative(state, hover_input(PARAMS), PARAMS)
    assert all(v == 0.0 for v in rate)


def test_free_fall_derivative():
    rate = derivative(StateVector.zero(), ControlInput(0, 0, 0, 0, 0, 0), PARAMS)
    assert rate.z_dot == -PARAMS.gravity
    assert all(v == 0.0 for k, v in zip(rate._fields, rate) if k != "z_dot")


def test_double_hover_thrust_gives_plus_g():
    inp = ControlInput(0, 0, 2 * PARAMS.mass * PARAMS.gravity, 0, 0, 0)
    rate = derivative(StateVector.zero(), inp, PARAMS)
    assert rate.z_dot == pytest.approx(PARAMS.gravity, abs=1e-12)


def test_rk4_hover_step_unchanged():
    state = StateVector.zero()._replace(z=10.0)
    nxt = step_rk4(state, hover_input(PARAMS), PARAMS, 0.01)
    assert all(abs(a - b) < 1e-12 for a, b in zip(state, nxt))


def test_hover_fixed_point_ten_seconds():
    """Drift after 1000 hover steps stays below 1e-9 per component."""
    state = StateVector.zero()._replace(z=10.0)
    inp = hover_input(PARAMS)
    s = state
    for _ in range(1000):
        s = step_rk4(s, inp, PARAMS, 0.01)
    assert max(abs(a - b) for a, b in zip(state, s)) < 1e-9


def test_ballistic_free_fall_oracle():
    """Drag-free fall for 1 s lands on the closed form within 1e-6 m."""
    s = StateVector.zero()._replace(z=10.0)
    inp = ControlInput(0, 0, 0, 0, 0, 0)
    for _ in range(100):
        s = step_rk4(s, inp, DRAG_FREE, 0.01)
    assert s.z == pytest.approx(10.0 - 0.5 * 9.81, abs=1e-6)
    assert s.z_dot == pytest.approx(-9.81, abs=1e-6)


def test_pure_yaw_torque_oracle():
    """Gamma_z / Iz integrates to the exact rate on the torque-only axis."""
    params = QuadParams(iz=0.1)
    s = StateVector.zero()
    inp = ControlInput(0, 0, params.mass * params.gravity, 0, 0, 0.01)
    for _ in range(100):
        s = step_rk4(s, inp, params, 0.01)
    assert s.psi_dot == pytest.approx(0.1, abs=1e-6)
    assert s.psi == pytest.approx(0.05, abs=1e-6)


def test_rk4_fourth_order_convergence():
    """Halving dt cuts the drag-fall error by at least 8x."""
    params = QuadParams(mass=1.0, kdz=5.0)
    exact = drag_fall_z(1.0, 0.0, params)
    inp = ControlInput(0, 0, 0, 0, 0, 0)

    def final_z(dt: float) -> float:
        s = StateVector.zero()
        for _ in range(round(1.0 / dt)):
            s = step_rk4(s, inp, params, dt)
        return s.z

    err_coarse = abs(final_z(0.02) - exact)
    err_fine = abs(final_z(0.01) - exact)
    assert err_coarse > 1e-13  # above roundoff floor, ratio is meaningful
    assert err_coarse / err_fine >= 8.0


def test_derivative_is_pure():
    state = StateVector(0.1, -0.2, 0.3, 0.5, -0.1, 0.2, 1, 2, 3, -1, 0.5, 0.25)
    inp = ControlInput(0.1, 0.2, 9.0, 0.01, -0.02, 0.03)
    a = derivative(state, inp, PARAMS)
    b = derivative(state, inp, PARAMS)
    assert a == b


def test_gimbal_guard():
    state = StateVector.zero()._replace(theta=math.radians(85.0))
    with pytest.raises(GimbalLockError):
        derivative(state, hover_input(PARAMS), PARAMS)
    # just inside the guard is fine
    derivative(StateVector.zero()._replace(theta=math.radians(84.9)), hover_input(PARAMS), PARAMS)


def test_non_finite_rejected():
    with pytest.raises(NonFiniteError):
        derivative(StateVector.zero()._replace(x_dot=float("nan")), hover_input(PARAMS), PARAMS)
    with pytest.raises(NonFiniteError):
        derivative(StateVector.zero(), ControlInput(0, 0, float("inf"), 0, 0, 0), PARAMS)


def test_saturate_clamps_and_is_idempotent():
    low = ControlInput(0, 0, -3.0, 2.0, -2.0, 0.5)
    once = saturate(low, PARAMS)
    assert once.thrust == 0.0
    assert once.tau_x == PARAMS.torque_max
    assert once.tau_y == -PARAMS.torque_max
    assert once.tau_z == 0.5
    assert saturate(once, PARAMS) == once

    high = ControlInput(0, 0, PARAMS.thrust_max + 1.0, 0, 0, 0)
    assert saturate(high, PARAMS).thrust == PARAMS.thrust_max

    feasible = ControlInput(0.1, 0.2, 11.0, 0.1, -0.1, 0.0)
    assert saturate(feasible, PARAMS) is feasible


def test_param_validation():
    with pytest.raises(ValueError):
        QuadParams(mass=0.0)
    with pytest.raises(ValueError):
        QuadParams(kdx=-0.1)
    with pytest.raises(ValueError):
        QuadParams(torque_max=0.0)
