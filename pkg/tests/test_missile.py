import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskring.flightdyn import AircraftState, ControlCommand, level_state, step_aircraft
from riskring.missile import (
    DEFAULT_GUIDANCE,
    GuidanceConfig,
    MissilePhase,
    MissileState,
    cpa_within_step,
    guidance_command,
    launch_missile,
    missile_inactive,
    pn_lateral_accel,
    step_missile,
)

DT = 0.02


def make_missile(pos, vel, tau=0.0, phase=MissilePhase.BOOST, min_d=1e9):
    return MissileState(
        x_m=pos[0], y_m=pos[1], z_m=pos[2],
        vx_mps=vel[0], vy_mps=vel[1], vz_mps=vel[2],
        time_since_launch_s=tau, phase=phase, min_distance_m=min_d,
    )


class TestPnLateralAccel:
    def test_zero_los_rate(self):
        assert pn_lateral_accel(0.0, 500.0, 3.0) == 0.0

    def test_direct_product_below_clamp(self):
        assert pn_lateral_accel(0.01, 500.0, 3.0) == pytest.approx(15.0)

    def test_sign_symmetry(self):
        assert pn_lateral_accel(-0.01, 500.0, 3.0) == pytest.approx(-15.0)

    def test_clamped(self):
        assert pn_lateral_accel(1.0, 1000.0, 4.0, max_accel_mps2=300.0) == 300.0
        assert pn_lateral_accel(-1.0, 1000.0, 4.0, max_accel_mps2=300.0) == -300.0


class TestGuidanceCommand:
    def test_collision_triangle_gives_zero_command(self):
        # Head-on inside terminal range: the line of sight does not rotate.
        target = level_state(8000.0, 300.0, heading_rad=math.pi, x_m=5000.0, y_m=0.0)
        m = make_missile((0.0, 0.0, 8000.0), (900.0, 0.0, 0.0), phase=MissilePhase.COAST)
        ax, ay, az = guidance_command(m, target, DEFAULT_GUIDANCE)
        assert math.hypot(ax, math.hypot(ay, az)) < 1e-9

    def test_midcourse_climb_when_below_altitude(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=50000.0)
        m = make_missile((0.0, 0.0, 10000.0), (600.0, 0.0, 0.0))
        assert m.z_m < DEFAULT_GUIDANCE.midcourse_climb_altitude_m
        _, _, az = guidance_command(m, target, DEFAULT_GUIDANCE)
        assert az > 0.0

    def test_stationary_target_dead_ahead_terminal(self):
        target = AircraftState(
            x_m=5000.0, y_m=0.0, z_m=8000.0, roll_rad=0.0, pitch_rad=0.0,
            heading_rad=0.0, speed_mps=1e-12,
        )
        m = make_missile((0.0, 0.0, 8000.0), (800.0, 0.0, 0.0), phase=MissilePhase.COAST)
        ax, ay, az = guidance_command(m, target, DEFAULT_GUIDANCE)
        assert math.sqrt(ax * ax + ay * ay + az * az) < 1e-6


class TestCpaWithinStep:
    def test_static(self):
        assert cpa_within_step((1000.0, 0.0, 0.0), (0.0, 0.0, 0.0), 1.0) == 1000.0

    def test_perpendicular_pass_midstep(self):
        assert cpa_within_step((1000.0, -500.0, 0.0), (0.0, 1000.0, 0.0), 1.0) == pytest.approx(
            1000.0
        )

    def test_head_on_zero_crossing(self):
        assert cpa_within_step((100.0, 0.0, 0.0), (-300.0, 0.0, 0.0), 1.0) == pytest.approx(0.0)

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            cpa_within_step((1.0, 0.0, 0.0), (0.0, 0.0, 0.0), 0.0)

    @given(
        px=st.floats(-5000, 5000), py=st.floats(-5000, 5000), pz=st.floats(-5000, 5000),
        vx=st.floats(-2000, 2000), vy=st.floats(-2000, 2000), vz=st.floats(-2000, 2000),
        dt=st.floats(0.001, 0.1),
    )
    @settings(max_examples=200, deadline=None)
    def test_never_above_endpoints_and_matches_scan(self, px, py, pz, vx, vy, vz, dt):
        p = (px, py, pz)
        v = (vx, vy, vz)
        d = cpa_within_step(p, v, dt)
        d0 = math.sqrt(px * px + py * py + pz * pz)
        t = np.linspace(0.0, dt, 64)
        scan = np.sqrt((px + vx * t) ** 2 + (py + vy * t) ** 2 + (pz + vz * t) ** 2)
        assert d <= d0 + 1e-9
        assert d <= scan.min() + 1e-9


class TestStepMissile:
    def test_boost_gains_speed(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=40000.0)
        m = launch_missile((0.0, 0.0, 10000.0), 300.0, (40000.0, 0.0, 8000.0))
        speed0 = m.speed_mps
        m = step_missile(m, target, DEFAULT_GUIDANCE, DT)
        assert m.speed_mps > speed0
        assert m.phase is MissilePhase.BOOST

    def test_coast_level_decays(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=200000.0)
        cfg = replace(DEFAULT_GUIDANCE, nav_constant=0.0, terminal_range_m=1e9)
        m = make_missile((0.0, 0.0, 8000.0), (800.0, 0.0, 0.0), tau=20.0, phase=MissilePhase.COAST)
        speed = m.speed_mps
        for _ in range(100):
            m = step_missile(m, target, cfg, DT)
            assert m.speed_mps < speed
            speed = m.speed_mps

    def test_straight_pass_min_distance_matches_closed_form(self):
        # Stationary target 1000 m abeam of a coasting missile with PN off;
        # closed-form CPA for uniform motion is the lateral offset.
        target = AircraftState(
            x_m=0.0, y_m=0.0, z_m=8000.0, roll_rad=0.0, pitch_rad=0.0,
            heading_rad=0.0, speed_mps=1e-12,
        )
        cfg = replace(DEFAULT_GUIDANCE, nav_constant=0.0, terminal_range_m=1e9)
        m = make_missile((-500.0, 1000.0, 8000.0), (1000.0, 0.0, 0.0),
                         tau=20.0, phase=MissilePhase.COAST)
        for _ in range(100):
            m = step_missile(m, target, cfg, DT)
        assert m.min_distance_m == pytest.approx(1000.0, abs=0.5)

    def test_phase_transitions_monotone(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=60000.0)
        m = launch_missile((0.0, 0.0, 10000.0), 300.0, (60000.0, 0.0, 8000.0))
        phases = []
        for _ in range(int(20.0 / DT)):
            m = step_missile(m, target, DEFAULT_GUIDANCE, DT)
            phases.append(m.phase)
        assert phases[0] is MissilePhase.BOOST
        assert phases[-1] is MissilePhase.COAST
        assert all(b >= a for a, b in zip(phases, phases[1:]))

    def test_min_distance_never_increases(self):
        target = level_state(8000.0, 330.0, heading_rad=2.0, x_m=30000.0, y_m=5000.0)
        m = launch_missile((0.0, 0.0, 10000.0), 300.0, (30000.0, 5000.0, 8000.0))
        cmd = ControlCommand(2.0, 0.0, 0.8)
        prev = m.min_distance_m
        for _ in range(2000):
            m = step_missile(m, target, DEFAULT_GUIDANCE, DT)
            target = step_aircraft(target, cmd, DT)
            assert m.min_distance_m <= prev
            prev = m.min_distance_m

    def test_rejects_inactive_and_nonfinite(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=40000.0)
        m = make_missile((0.0, 0.0, 10000.0), (600.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            step_missile(replace(m, active=False), target, DEFAULT_GUIDANCE, DT)
        with pytest.raises(ValueError):
            step_missile(replace(m, vx_mps=math.inf), target, DEFAULT_GUIDANCE, DT)
        with pytest.raises(ValueError):
            step_missile(m, target, DEFAULT_GUIDANCE, 0.2)


class TestMissileInactive:
    def test_lifetime_bound(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=40000.0)
        m = make_missile((0.0, 0.0, 10000.0), (600.0, 0.0, 0.0),
                         tau=DEFAULT_GUIDANCE.lifetime_s + 1.0, phase=MissilePhase.COAST)
        assert missile_inactive(m, target, DEFAULT_GUIDANCE)

    def test_slower_and_opening(self):
        # Burned out, slower than the target, range opening at +10 m/s.
        target = level_state(8000.0, 330.0, heading_rad=0.0, x_m=10000.0)
        m = make_missile((0.0, 0.0, 8000.0), (280.0, 0.0, 0.0), tau=30.0,
                         phase=MissilePhase.COAST)
        assert missile_inactive(m, target, DEFAULT_GUIDANCE)

    def test_boost_closing_is_active(self):
        target = level_state(8000.0, 330.0, heading_rad=math.pi, x_m=20000.0)
        m = make_missile((0.0, 0.0, 8000.0), (600.0, 0.0, 0.0), tau=1.0)
        assert not missile_inactive(m, target, DEFAULT_GUIDANCE)

    def test_ground_impact(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=40000.0)
        m = make_missile((0.0, 0.0, -1.0), (600.0, 0.0, -100.0), tau=50.0,
                         phase=MissilePhase.COAST)
        assert missile_inactive(m, target, DEFAULT_GUIDANCE)


class TestEngagementProperties:
    def run_to_termination(self, uav, missile, cfg, max_t=400.0):
        cmd = ControlCommand(uav.heading_rad, 0.0, 0.5)
        t = 0.0
        while t < max_t:
            missile = step_missile(missile, uav, cfg, DT)
            uav = step_aircraft(uav, cmd, DT)
            t += DT
            if missile_inactive(missile, uav, cfg):
                return missile.min_distance_m, t
            # pass detection: well beyond closest approach and opening
            dx, dy, dz = uav.x_m - missile.x_m, uav.y_m - missile.y_m, uav.z_m - missile.z_m
            if math.sqrt(dx * dx + dy * dy + dz * dz) > missile.min_distance_m + 2000.0:
                return missile.min_distance_m, t
        return missile.min_distance_m, t

    def test_head_on_interceptions(self):
        # PN correctness oracle (small version; the acceptance suite runs 100).
        rng = np.random.default_rng(99)
        hits = 0
        for _ in range(20):
            uav_alt = rng.uniform(6000, 10000)
            bearing = rng.uniform(0, 2 * math.pi)
            rng_m = rng.uniform(15e3, 40e3)
            uav = level_state(uav_alt, rng.uniform(300, 365), bearing)
            lx, ly = rng_m * math.cos(bearing), rng_m * math.sin(bearing)
            m = launch_missile((lx, ly, rng.uniform(9000, 11000)), rng.uniform(280, 320),
                               (0.0, 0.0, uav_alt))
            md, _ = self.run_to_termination(uav, m, DEFAULT_GUIDANCE)
            hits += md < 50.0
        assert hits >= 19

    def test_energy_decreases_in_coast_without_guidance(self):
        target = level_state(8000.0, 330.0, 0.0, x_m=500000.0)
        cfg = replace(DEFAULT_GUIDANCE, nav_constant=0.0, terminal_range_m=1e9,
                      altitude_hold_p=0.0, altitude_hold_d=0.0,
                      altitude_hold_accel_limit_mps2=0.0)
        m = make_missile((0.0, 0.0, 12500.0), (900.0, 0.0, 0.0), tau=20.0,
                         phase=MissilePhase.COAST)
        ke = 0.5 * m.speed_mps**2
        for _ in range(500):
            m = step_missile(m, target, cfg, DT)
            ke_next = 0.5 * m.speed_mps**2
            assert ke_next < ke
            ke = ke_next

    def test_reach_envelope(self):
        # Crossing target: intercept well inside the envelope, miss far outside.
        def crossing(rng_km):
            uav = level_state(8000.0, 330.0, math.pi / 2)
            m = launch_missile((rng_km * 1e3, 0.0, 10000.0), 300.0, (0.0, 0.0, 8000.0))
            md, _ = self.run_to_termination(uav, m, DEFAULT_GUIDANCE)
            return md

        assert crossing(50) < 100.0
        assert crossing(100) > 5000.0

    def test_guidance_config_round_trip(self):
        text = DEFAULT_GUIDANCE.to_text()
        assert GuidanceConfig.from_text(text) == DEFAULT_GUIDANCE
        assert DEFAULT_GUIDANCE.digest() == DEFAULT_GUIDANCE.digest()
