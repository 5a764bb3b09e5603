"""Gain blending, PID channel arithmetic, and the cascade wiring.

Hand oracles:
  * blend midpoint: k1=5, A=1, s at the center of [d1, d2] gives
    5 + 1*(1 - cos(pi/2)) = 6 exactly.
  * integral channel: constant e=1 for 1 s at dt=0.01 accumulates 1.0
    (rectangle on the first call, trapezoid after).
  * hover cascade: zero error from rest must emit the hover wrench.
"""

import math

import pytest

from quadflight.control import (
    CascadeChannels,
    CascadeConfig,
    FixedGains,
    NlvgGains,
    NlvgSchedule,
    PidChannelState,
    cascade_update,
    nlvg_gain,
    outer_to_attitude,
    pid_step,
    reset,
)
from quadflight.dynamics import ControlInput, QuadParams, StateVector
from quadflight.trajectory import ReferenceSample


def ref_at(t=0.0, **kw):
    base = dict(x=0.0, y=0.0, z=0.0, vx=0.0, vy=0.0, vz=0.0, ax=0.0, ay=0.0, psi_d=0.0)
    base.update(kw)
    return ReferenceSample(t=t, **base)


SCHED = NlvgSchedule(k1=5.0, half_range=1.0, delta1=0.01, delta2=0.838)


class TestGainBlend:
    def test_below_lower_threshold_returns_k1(self):
        assert nlvg_gain(0.0, SCHED) == 5.0
        assert nlvg_gain(0.00999, SCHED) == 5.0

    def test_above_upper_threshold_returns_k2(self):
        assert nlvg_gain(SCHED.delta2 + 1.0, SCHED) == 7.0
        assert nlvg_gain(100.0, SCHED) == 7.0

    def test_midpoint_is_exact_mean(self):
        mid = 0.5 * (SCHED.delta1 + SCHED.delta2)
        assert nlvg_gain(mid, SCHED) == pytest.approx(6.0, abs=1e-12)

    def test_continuous_at_both_thresholds(self):
        for edge in (SCHED.delta1, SCHED.delta2):
            lo = nlvg_gain(edge - 1e-9, SCHED)
            hi = nlvg_gain(edge + 1e-9, SCHED)
            assert abs(hi - lo) < 1e-6

    def test_monotone_and_bounded(self):
        grid = [i * 1e-3 for i in range(1201)]
        vals = [nlvg_gain(s, SCHED) for s in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert all(5.0 <= v <= 7.0 for v in vals)

    def test_negative_signal_rejected(self):
        with pytest.raises(ValueError):
            nlvg_gain(-0.1, SCHED)

    def test_zero_half_range_is_constant(self):
        flat = NlvgSchedule(k1=3.0, half_range=0.0, delta1=0.01, delta2=0.838)
        for s in (0.0, 0.4, 2.0):
            assert nlvg_gain(s, flat) == 3.0

    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            NlvgSchedule(k1=-1.0, half_range=1.0, delta1=0.01, delta2=0.838)
        with pytest.raises(ValueError):
            NlvgSchedule(k1=1.0, half_range=-0.5, delta1=0.01, delta2=0.838)
        with pytest.raises(ValueError):
            NlvgSchedule(k1=1.0, half_range=0.5, delta1=0.9, delta2=0.838)


class TestPidChannel:
    def test_pure_p(self):
        cmd, _ = pid_step(PidChannelState(), 0.5, 0.01, FixedGains(1.0, 0.0, 0.0))
        assert cmd == 0.5

    def test_integral_accumulates_over_one_second(self):
        gains = FixedGains(0.0, 1.0, 0.0)
        state = PidChannelState()
        cmd = 0.0
        for _ in range(100):
            cmd, state = pid_step(state, 1.0, 0.01, gains)
        assert cmd == pytest.approx(1.0, abs=0.01)

    def test_derivative_zero_on_first_call(self):
        cmd, _ = pid_step(PidChannelState(), 0.7, 0.01, FixedGains(0.0, 0.0, 3.0))
        assert cmd == 0.0

    def test_derivative_backward_difference(self):
        gains = FixedGains(0.0, 0.0, 2.0)
        _, state = pid_step(PidChannelState(), 0.5, 0.01, gains)
        cmd, _ = pid_step(state, 0.6, 0.01, gains)
        assert cmd == pytest.approx(2.0 * (0.6 - 0.5) / 0.01, rel=1e-12)

    def test_antiwindup_clamps_integral(self):
        gains = FixedGains(0.0, 1.0, 0.0, integral_limit=2.0)
        state = PidChannelState()
        for _ in range(5000):
            _, state = pid_step(state, 1.0, 0.01, gains)
        assert abs(state.integral) <= 2.0
        cmd, _ = pid_step(state, 1.0, 0.01, gains)
        assert cmd == pytest.approx(2.0, abs=1e-9)

    def test_pure_p_homogeneity(self):
        gains = FixedGains(2.5, 0.0, 0.0)
        cmd1, _ = pid_step(PidChannelState(), 0.3, 0.01, gains)
        cmd2, _ = pid_step(PidChannelState(), 0.9, 0.01, gains)
        assert cmd2 == pytest.approx(3.0 * cmd1, rel=1e-12)

    def test_zero_half_range_matches_fixed_bitwise(self):
        sched = lambda k: NlvgSchedule(k1=k, half_range=0.0, delta1=0.01, delta2=0.838)
        variable = NlvgGains(p=sched(8.0), i=sched(0.1), d=sched(5.0))
        fixed = FixedGains(8.0, 0.1, 5.0)
        sv, sf = PidChannelState(), PidChannelState()
        seq = [math.sin(0.37 * k) * (1.0 + 0.1 * k % 1.0) for k in range(200)]
        for e in seq:
            cv, sv = pid_step(sv, e, 0.01, variable)
            cf, sf = pid_step(sf, e, 0.01, fixed)
            assert cv == cf

    def test_paper_pairing_uses_rate_for_integral_gain(self):
        # with i scheduled on |de/dt|, a large error rate must raise the
        # integral gain even while the error magnitude stays small
        band = NlvgSchedule(k1=1.0, half_range=1.0, delta1=0.01, delta2=0.838)
        flat = NlvgSchedule(k1=0.0, half_range=0.0, delta1=0.01, delta2=0.838)
        gains = NlvgGains(p=flat, i=band, d=flat, signal_pairing="paper")
        _, state = pid_step(PidChannelState(), 0.0, 0.01, gains)
        # error jumps by 0.02 in one step: |de/dt| = 2, above delta2
        cmd, state2 = pid_step(state, 0.02, 0.01, gains)
        ki = band.k1 + 2.0 * band.half_range
        expected = ki * (state2.integral)
        assert cmd == pytest.approx(expected, rel=1e-12)

    def test_matched_pairing_uses_rate_for_derivative_gain(self):
        band = NlvgSchedule(k1=1.0, half_range=1.0, delta1=0.01, delta2=0.838)
        flat = NlvgSchedule(k1=0.0, half_range=0.0, delta1=0.01, delta2=0.838)
        gains = NlvgGains(p=flat, i=flat, d=band, signal_pairing="matched")
        _, state = pid_step(PidChannelState(), 0.0, 0.01, gains)
        cmd, _ = pid_step(state, 0.02, 0.01, gains)
        kd = band.k1 + 2.0 * band.half_range  # |de/dt| = 2 here
        assert cmd == pytest.approx(kd * 2.0, rel=1e-12)

    def test_pairing_name_validated(self):
        sched = NlvgSchedule(k1=1.0, half_range=0.0, delta1=0.01, delta2=0.838)
        with pytest.raises(ValueError):
            NlvgGains(p=sched, i=sched, d=sched, signal_pairing="other")


class TestOuterToAttitude:
    def test_zero_command_is_level(self):
        phi_d, theta_d = outer_to_attitude(0.0, 0.0, 0.0, 9.81, 0.6)
        assert phi_d == 0.0 and theta_d == 0.0

    def test_forward_accel_at_zero_yaw_pitches(self):
        g = 9.81
        phi_d, theta_d = outer_to_attitude(0.5 * g, 0.0, 0.0, g, 0.6)
        assert theta_d == pytest.approx(0.5, rel=1e-12)
        assert phi_d == pytest.approx(0.0, abs=1e-15)

    def test_lateral_accel_at_zero_yaw_rolls_negative(self):
        g = 9.81
        phi_d, theta_d = outer_to_attitude(0.0, 0.5 * g, 0.0, g, 0.6)
        assert phi_d == pytest.approx(-0.5, rel=1e-12)
        assert theta_d == pytest.approx(0.0, abs=1e-15)

    def test_yaw_rotation_swaps_axes(self):
        g = 9.81
        phi_d, theta_d = outer_to_attitude(0.3 * g, 0.0, math.pi / 2, g, 0.6)
        assert phi_d == pytest.approx(0.3, rel=1e-9)
        assert theta_d == pytest.approx(0.0, abs=1e-12)

    def test_clamp_applies(self):
        g = 9.81
        phi_d, theta_d = outer_to_attitude(2.0 * g, 0.0, 0.0, g, 0.6)
        assert theta_d == 0.6
        phi_d, theta_d = outer_to_attitude(0.0, 2.0 * g, 0.0, g, 0.6)
        assert phi_d == -0.6


def paper_config(plant=None):
    outer = FixedGains(5.0, 0.2, 5.0)
    inner = FixedGains(8.0, 0.1, 5.0)
    return CascadeConfig(
        plant=plant or QuadParams(),
        x=outer, y=outer, z=outer,
        phi=inner, theta=inner, psi=inner,
    )


class TestCascade:
    def test_hover_zero_error_gives_hover_wrench(self):
        cfg = paper_config()
        state = StateVector.zero()
        result = cascade_update(state, ref_at(), cfg, reset(), 0.01)
        u = result.control
        assert u.thrust == pytest.approx(cfg.plant.mass * cfg.plant.gravity, abs=1e-12)
        assert u.tau_x == pytest.approx(0.0, abs=1e-12)
        assert u.tau_y == pytest.approx(0.0, abs=1e-12)
        assert u.tau_z == pytest.approx(0.0, abs=1e-12)
        assert result.phi_d == 0.0 and result.theta_d == 0.0

    def test_altitude_error_raises_thrust_by_hand_amount(self):
        cfg = paper_config()
        state = StateVector.zero()
        result = cascade_update(state, ref_at(z=1.0), cfg, reset(), 0.01)
        # kp*e + ki*(e*dt) on the first call, derivative still zero
        expected = cfg.plant.mass * cfg.plant.gravity + 5.0 * 1.0 + 0.2 * (1.0 * 0.01)
        assert result.control.thrust == pytest.approx(expected, rel=1e-12)

    def test_pure_yaw_error_maps_to_yaw_torque(self):
        cfg = paper_config()
        state = StateVector.zero()
        result = cascade_update(state, ref_at(psi_d=0.1), cfg, reset(), 0.01)
        expected = 8.0 * 0.1 + 0.1 * (0.1 * 0.01)
        assert result.control.tau_z == pytest.approx(expected, rel=1e-12)
        assert result.control.tau_x == pytest.approx(0.0, abs=1e-12)
        assert result.control.tau_y == pytest.approx(0.0, abs=1e-12)

    def test_attitude_override_bypasses_position_loop(self):
        cfg = paper_config()
        state = StateVector.zero()._replace(x=5.0)  # large position error
        ref = ref_at(phi_d=0.0, theta_d=0.0)
        result = cascade_update(state, ref, cfg, reset(), 0.01)
        # position error never reaches the tilt targets in override mode
        assert result.phi_d == 0.0 and result.theta_d == 0.0
        assert result.channels.x == PidChannelState()
        assert result.control.tau_y == pytest.approx(0.0, abs=1e-12)

    def test_attitude_override_step_drives_roll_torque(self):
        cfg = paper_config()
        state = StateVector.zero()
        ref = ref_at(phi_d=0.3, theta_d=0.0)
        result = cascade_update(state, ref, cfg, reset(), 0.01)
        expected = 8.0 * 0.3 + 0.1 * (0.3 * 0.01)
        saturated = min(expected, cfg.plant.torque_max)
        assert result.control.tau_x == pytest.approx(saturated, rel=1e-12)

    def test_position_error_tilts_toward_target(self):
        cfg = paper_config()
        state = StateVector.zero()
        result = cascade_update(state, ref_at(x=1.0), cfg, reset(), 0.01)
        assert result.theta_d > 0.0  # pitch forward toward +x
        assert result.phi_d == pytest.approx(0.0, abs=1e-15)

    def test_feedforward_acceleration_passes_through(self):
        cfg = paper_config()
        state = StateVector.zero()
        plain = cascade_update(state, ref_at(), cfg, reset(), 0.01)
        pushed = cascade_update(state, ref_at(ax=1.0), cfg, reset(), 0.01)
        assert pushed.theta_d > plain.theta_d

    def test_reset_returns_fresh_channels(self):
        fresh = reset()
        assert fresh == CascadeChannels(*[PidChannelState()] * 6)
        assert reset(fresh) == fresh

    def test_outputs_respect_saturation(self):
        cfg = paper_config()
        state = StateVector.zero()
        result = cascade_update(state, ref_at(z=100.0, psi_d=50.0), cfg, reset(), 0.01)
        p = cfg.plant
        assert 0.0 <= result.control.thrust <= p.thrust_max
        assert abs(result.control.tau_z) <= p.torque_max

    def test_attitude_clamp_validation(self):
        with pytest.raises(ValueError):
            CascadeConfig(
                plant=QuadParams(),
                x=FixedGains(1, 0, 0), y=FixedGains(1, 0, 0), z=FixedGains(1, 0, 0),
                phi=FixedGains(1, 0, 0), theta=FixedGains(1, 0, 0), psi=FixedGains(1, 0, 0),
                attitude_clamp=1.6,
            )
