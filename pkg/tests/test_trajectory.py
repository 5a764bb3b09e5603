"""Reference generators: phase structure, analytic derivatives, yaw policy.

The derivative checks compare the returned velocity/acceleration against
central finite differences of the sampled positions, away from the phase
joins (the takeoff joins are position-continuous only).
"""

import math
import random

import pytest

from quadflight.trajectory import (
    LissajousSpec,
    ReferenceSample,
    StepSpec,
    StormSpec,
    lissajous_reference,
    mission_reference,
    sample_mission,
    step_reference,
    storm_reference,
    wrap_to_pi,
    yaw_policy,
)


class TestStep:
    def test_zero_before_start(self):
        spec = StepSpec(channel="z", amplitude=2.0, t_start=1.0)
        s = step_reference(spec, 0.999)
        assert s.z == 0.0 and s.x == 0.0 and s.vz == 0.0

    def test_amplitude_at_and_after_start(self):
        spec = StepSpec(channel="z", amplitude=2.0, t_start=1.0)
        assert step_reference(spec, 1.0).z == 2.0
        assert step_reference(spec, 50.0).z == 2.0

    def test_derivatives_reported_zero(self):
        spec = StepSpec(channel="x", amplitude=1.0, t_start=0.5)
        for t in (0.0, 0.5, 3.0):
            s = step_reference(spec, t)
            assert (s.vx, s.vy, s.vz, s.ax, s.ay) == (0.0, 0.0, 0.0, 0.0, 0.0)

    def test_attitude_channel_sets_tilt_overrides(self):
        spec = StepSpec(channel="phi", amplitude=0.5, t_start=1.0)
        before = step_reference(spec, 0.0)
        after = step_reference(spec, 2.0)
        assert before.phi_d == 0.0 and before.theta_d == 0.0
        assert after.phi_d == 0.5 and after.theta_d == 0.0

    def test_position_channel_leaves_overrides_unset(self):
        s = step_reference(StepSpec(channel="y", amplitude=1.0), 1.0)
        assert s.phi_d is None and s.theta_d is None
        assert s.y == 1.0

    def test_psi_channel(self):
        s = step_reference(StepSpec(channel="psi", amplitude=0.3, t_start=0.0), 0.0)
        assert s.psi_d == 0.3
        assert s.phi_d is None

    def test_bad_channel_rejected(self):
        with pytest.raises(ValueError):
            StepSpec(channel="roll", amplitude=1.0)


class TestStorm:
    def test_holds_origin_before_takeoff(self):
        spec = StormSpec()
        s = storm_reference(spec, 10.0)
        assert (s.x, s.y, s.z) == (0.0, 0.0, 0.0)

    def test_ramp_reaches_spiral_entry(self):
        spec = StormSpec()
        entry = storm_reference(spec, spec.t_takeoff + spec.ramp_time)
        assert entry.x == pytest.approx(spec.r0, abs=1e-12)
        assert entry.y == pytest.approx(0.0, abs=1e-12)
        assert entry.z == pytest.approx(spec.z0, abs=1e-12)

    def test_position_continuous_at_joins(self):
        spec = StormSpec()
        eps = 1e-7
        for t_join in (spec.t_takeoff, spec.t_takeoff + spec.ramp_time):
            a = storm_reference(spec, t_join - eps)
            b = storm_reference(spec, t_join + eps)
            gap = math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))
            assert gap < 1e-5

    def test_radius_grows_linearly(self):
        spec = StormSpec(r0=1.0, radial_rate=0.05)
        t_entry = spec.t_takeoff + spec.ramp_time
        for tau in (0.0, 10.0, 40.0):
            s = storm_reference(spec, t_entry + tau)
            assert math.hypot(s.x, s.y) == pytest.approx(1.0 + 0.05 * tau, rel=1e-12)

    def test_altitude_held_without_climb(self):
        spec = StormSpec(climb_rate=0.0)
        s = storm_reference(spec, 80.0)
        assert s.z == spec.z0 and s.vz == 0.0

    def test_climb_rate_applied(self):
        spec = StormSpec(climb_rate=0.1)
        t_entry = spec.t_takeoff + spec.ramp_time
        s = storm_reference(spec, t_entry + 30.0)
        assert s.z == pytest.approx(spec.z0 + 3.0, rel=1e-12)


class TestLissajous:
    def test_curve_start(self):
        spec = LissajousSpec()
        s = lissajous_reference(spec, 0.0)
        assert (s.x, s.y) == (0.0, 0.0)
        assert s.z == spec.z0

    def test_phase_shifts_y(self):
        spec = LissajousSpec(phase=math.pi / 2)
        s = lissajous_reference(spec, 0.0)
        assert s.y == pytest.approx(spec.amp_y, rel=1e-12)

    def test_amplitudes_bound_the_curve(self):
        spec = LissajousSpec()
        for k in range(200):
            s = lissajous_reference(spec, 0.5 * k)
            assert abs(s.x) <= spec.amp_x + 1e-12
            assert abs(s.y) <= spec.amp_y + 1e-12
            assert abs(s.z - spec.z0) <= spec.amp_z + 1e-12

    def test_frequency_ratio(self):
        # y completes b cycles while x completes a cycles
        spec = LissajousSpec(a=1, b=2, omega=0.1)
        period = 2 * math.pi / (spec.a * spec.omega)
        s = lissajous_reference(spec, period)
        assert s.x == pytest.approx(0.0, abs=1e-9)
        assert s.y == pytest.approx(0.0, abs=1e-9)

    def test_mission_wrapper_ramps_from_origin(self):
        spec = LissajousSpec(phase=math.pi / 2, t_takeoff=2.0, ramp_time=5.0)
        mid = mission_reference(spec, 4.5)
        start = lissajous_reference(spec, 0.0)
        assert mid.x == pytest.approx(0.5 * start.x, rel=1e-12)
        assert mid.y == pytest.approx(0.5 * start.y, rel=1e-12)
        on_curve = mission_reference(spec, 7.0 + 3.0)
        expected = lissajous_reference(spec, 3.0)
        assert on_curve.x == pytest.approx(expected.x, rel=1e-12)


def fd_consistency(spec, t_lo, t_hi, exclusions=()):
    rng = random.Random(7)
    h = 1e-5
    checked = 0
    for _ in range(1000):
        t = rng.uniform(t_lo, t_hi)
        if any(abs(t - tj) < 10 * h for tj in exclusions):
            continue
        lo = mission_reference(spec, t - h)
        hi = mission_reference(spec, t + h)
        mid = mission_reference(spec, t)
        for a, b, v in (
            (lo.x, hi.x, mid.vx),
            (lo.y, hi.y, mid.vy),
            (lo.z, hi.z, mid.vz),
        ):
            fd = (b - a) / (2 * h)
            assert abs(fd - v) < 1e-4 * (1.0 + abs(v))
        for a, b, acc in ((lo.vx, hi.vx, mid.ax), (lo.vy, hi.vy, mid.ay)):
            fd = (b - a) / (2 * h)
            assert abs(fd - acc) < 1e-4 * (1.0 + abs(acc))
        checked += 1
    assert checked > 800


class TestDerivativeConsistency:
    def test_storm(self):
        spec = StormSpec()
        joins = (spec.t_takeoff, spec.t_takeoff + spec.ramp_time)
        fd_consistency(spec, 0.0, 140.0, exclusions=joins)

    def test_storm_with_climb(self):
        spec = StormSpec(climb_rate=0.2, r0=2.0, radial_rate=0.1, omega=0.3)
        joins = (spec.t_takeoff, spec.t_takeoff + spec.ramp_time)
        fd_consistency(spec, 0.0, 100.0, exclusions=joins)

    def test_lissajous(self):
        spec = LissajousSpec(t_takeoff=1.0, phase=0.3)
        joins = (spec.t_takeoff, spec.t_takeoff + spec.ramp_time)
        fd_consistency(spec, 0.0, 140.0, exclusions=joins)


class TestYawPolicy:
    def test_zero_mode(self):
        spec = StormSpec()
        assert yaw_policy(spec, 50.0, "zero") == 0.0

    def test_tangent_points_along_velocity(self):
        spec = StormSpec()
        t = spec.t_takeoff + spec.ramp_time + 20.0
        s = mission_reference(spec, t)
        psi = yaw_policy(spec, t, "tangent")
        assert psi == pytest.approx(math.atan2(s.vy, s.vx), rel=1e-12)

    def test_tangent_holds_previous_at_zero_velocity(self):
        spec = StormSpec()
        assert yaw_policy(spec, 1.0, "tangent", prev=0.7) == 0.7
        assert yaw_policy(spec, 1.0, "tangent") == 0.0

    def test_unwrapped_series_is_continuous(self):
        spec = StormSpec()
        samples = sample_mission(spec, 0.05, 140.0, yaw_mode="tangent")
        # velocity direction jumps at the ramp-to-spiral join; check the
        # spiral segment, where the tangent turns smoothly
        t_entry = spec.t_takeoff + spec.ramp_time
        psis = [s.psi_d for s in samples if s.t > t_entry + 0.1]
        jumps = [abs(b - a) for a, b in zip(psis, psis[1:])]
        assert max(jumps) < 0.5
        # several revolutions: the unwrapped angle must leave (-pi, pi]
        assert max(abs(p) for p in psis) > math.pi

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            yaw_policy(StormSpec(), 0.0, "chase")


class TestSampling:
    def test_row_count_and_grid(self):
        spec = StormSpec()
        samples = sample_mission(spec, 0.01, 2.0)
        assert len(samples) == 201
        assert samples[0].t == 0.0
        assert samples[-1].t == pytest.approx(2.0, abs=1e-12)

    def test_wrap_to_pi(self):
        assert abs(wrap_to_pi(3 * math.pi)) == pytest.approx(math.pi, abs=1e-9)
        assert abs(wrap_to_pi(-3 * math.pi)) == pytest.approx(math.pi, abs=1e-9)
        assert wrap_to_pi(0.3) == pytest.approx(0.3, rel=1e-12)
        assert wrap_to_pi(0.3 + 2 * math.pi) == pytest.approx(0.3, rel=1e-9)
