import math

import numpy as np
import pytest

from conftest import random_model_set

from riskring.episodes import LaunchRecord, launcher_position, observation_from_geometry, feature_vector
from riskring.flightdyn import (
    ControlCommand,
    DEFAULT_DT_S,
    PolicyId,
    evasive_policy_control,
    level_state,
    step_aircraft,
)
from riskring.scenario import Scenario, ScenarioFormatError, load_scenario, parse_scenario
from riskring.session import (
    OUTCOME_HIT,
    OUTCOME_ONGOING,
    RING_PERIOD_S,
    TerminalSessionError,
    apply_heading_command,
    create_session,
    engage_policy,
    run_replay,
    session_step,
)

TWO_LAUNCH = """
format_version = 1
seed = 3

[uav]
altitude_m = 8000
speed_mps = 330
heading_deg = 0

[launch]
time_s = 0
range_km = 55
bearing_deg = 0
altitude_m = 10000
speed_mps = 300

[launch]
time_s = 4
range_km = 60
bearing_deg = 120
altitude_m = 9500
speed_mps = 310
"""

CLOSE_LAUNCH = """
format_version = 1
seed = 9
[uav]
altitude_m = 8000
speed_mps = 330
heading_deg = 0
[launch]
time_s = 0
range_km = 18
bearing_deg = 0
altitude_m = 10000
speed_mps = 320
"""


class TestScenarioParsing:
    def test_fields_and_unit_conversion(self):
        sc = parse_scenario(TWO_LAUNCH)
        assert sc.seed == 3
        assert sc.uav_altitude_m == 8000.0
        assert sc.uav_heading_rad == 0.0
        assert len(sc.launches) == 2
        assert sc.launches[0].range_m == 55000.0
        assert sc.launches[1].bearing_rad == pytest.approx(math.radians(120.0))
        assert sc.launches[1].time_s == 4.0
        assert sc.noise is None

    def test_noise_section(self):
        sc = parse_scenario(
            TWO_LAUNCH + "\n[noise]\nsigma_rho_m = 50\nsample_count = 32\nquantile = 0.2\n"
        )
        assert sc.noise is not None
        assert sc.noise.sigma_rho_m == 50.0
        assert sc.noise.sample_count == 32
        assert sc.noise.quantile == 0.2
        assert sc.noise.sigma_eta_rad == pytest.approx(math.radians(0.1))

    def test_missing_version(self):
        with pytest.raises(ScenarioFormatError, match="format_version"):
            parse_scenario("[uav]\naltitude_m = 8000\n")

    def test_bad_bearing(self):
        bad = TWO_LAUNCH.replace("bearing_deg = 120", "bearing_deg = 380")
        with pytest.raises(ScenarioFormatError, match="bearing"):
            parse_scenario(bad)

    def test_decreasing_launch_times(self):
        bad = TWO_LAUNCH.replace("time_s = 4", "time_s = -1")
        with pytest.raises(ScenarioFormatError, match="non-decreasing"):
            parse_scenario(bad)

    def test_manifest_resolved_relative_to_file(self, tmp_path):
        (tmp_path / "sc.txt").write_text(
            TWO_LAUNCH + "\n[models]\nmanifest = sub/manifest.txt\n"
        )
        sc = load_scenario(tmp_path / "sc.txt")
        assert sc.manifest_path == str(tmp_path / "sub" / "manifest.txt")


class TestSessionStepping:
    def test_no_threats_before_first_launch(self):
        delayed = TWO_LAUNCH.replace("time_s = 0", "time_s = 10", 1).replace(
            "time_s = 4", "time_s = 12"
        )
        sc = parse_scenario(delayed)
        s = create_session(sc, random_model_set())
        s.paused = False
        session_step(s, 5.0)
        assert s.ring is None
        assert len(s.threats) == 0
        assert s.outcome == OUTCOME_ONGOING

    def test_paused_session_is_frozen(self):
        sc = parse_scenario(TWO_LAUNCH)
        s = create_session(sc, random_model_set())
        clock = s.clock_s
        session_step(s, 3.0)
        assert s.clock_s == clock
        assert len(s.threats) == 0

    def test_launches_fire_on_schedule(self):
        sc = parse_scenario(TWO_LAUNCH)
        s = create_session(sc, random_model_set())
        s.paused = False
        session_step(s, 2.0)
        assert len(s.threats) == 1
        session_step(s, 3.0)
        assert len(s.threats) == 2
        assert s.ring is not None

    def test_ring_cadence_is_one_hertz(self):
        sc = parse_scenario(TWO_LAUNCH)
        s = create_session(sc, random_model_set())
        s.paused = False
        session_step(s, 10.0)
        times = [t for t, _ in s.ring_log]
        assert len(times) >= 10
        diffs = {round(b - a, 6) for a, b in zip(times, times[1:])}
        assert diffs == {round(RING_PERIOD_S, 6)}

    def test_heading_command_converges(self):
        sc = parse_scenario(TWO_LAUNCH)
        s = create_session(sc, random_model_set())
        s.paused = False
        apply_heading_command(s, math.radians(135.0))
        session_step(s, 40.0)
        if s.outcome == OUTCOME_ONGOING:
            assert abs(s.uav.heading_rad - math.radians(135.0)) < math.radians(2.0)

    def test_hit_freezes_session_and_rejects_commands(self):
        sc = parse_scenario(CLOSE_LAUNCH)
        s = create_session(sc, random_model_set())
        s.paused = False
        engage_policy(s, PolicyId.N)  # fly into the missile
        for _ in range(200):
            session_step(s, 1.0)
            if s.outcome != OUTCOME_ONGOING:
                break
        assert s.outcome == OUTCOME_HIT
        clock = s.clock_s
        session_step(s, 5.0)
        assert s.clock_s == clock  # frozen
        with pytest.raises(TerminalSessionError):
            apply_heading_command(s, 0.0)
        with pytest.raises(TerminalSessionError):
            engage_policy(s, PolicyId.S)

    def test_outcome_all_threats_inactive(self):
        sc = parse_scenario(TWO_LAUNCH)
        s = create_session(sc, random_model_set())
        s.paused = False
        engage_policy(s, PolicyId.S)  # flee both
        for _ in range(300):
            session_step(s, 1.0)
            if s.outcome != OUTCOME_ONGOING:
                break
        assert s.outcome == "all_threats_inactive"
        assert s.min_md_m > 0.0


class TestInformationBarrier:
    def test_features_reconstructible_from_launch_events_alone(self):
        # Replay the UAV-only world from the scenario file and recompute the
        # logged feature vectors; they must match the session's exactly.
        sc = parse_scenario(TWO_LAUNCH)
        models = random_model_set()
        s = create_session(sc, models)
        s.paused = False
        s.engage_on_first_launch = PolicyId.SE
        for _ in range(60):
            session_step(s, 1.0)
            if s.outcome != OUTCOME_ONGOING:
                break
        logged = s.feature_log
        assert len(logged) > 10

        # offline: UAV dynamics + launch records only, no missile state
        uav = level_state(sc.uav_altitude_m, sc.uav_speed_mps, sc.uav_heading_rad)
        pending = sorted(sc.launches, key=lambda e: e.time_s)
        records: list[LaunchRecord] = []
        engaged = None
        clock = 0.0
        next_ring = 0.0
        recomputed = []
        uav0_pos = uav.position_m
        while len(recomputed) < len(logged):
            while pending and pending[0].time_s <= clock + 1e-9:
                ev = pending.pop(0)
                records.append(
                    LaunchRecord(
                        position_m=launcher_position(
                            uav0_pos, ev.range_m, ev.bearing_rad, ev.altitude_m
                        ),
                        speed_mps=ev.speed_mps,
                        time_s=ev.time_s,
                    )
                )
                if engaged is None:
                    engaged = PolicyId.SE
                next_ring = min(next_ring, clock)
            if records and clock + 1e-9 >= next_ring:
                for idx, rec in enumerate(records):
                    obs = observation_from_geometry(uav, rec, clock)
                    recomputed.append((clock, idx, feature_vector(uav, obs)))
                next_ring = clock + RING_PERIOD_S
            if engaged is not None:
                cmd = evasive_policy_control(engaged, uav)
            else:
                cmd = ControlCommand(uav.heading_rad, 0.0, 0.55)
            uav = step_aircraft(uav, cmd, DEFAULT_DT_S)
            clock += DEFAULT_DT_S

        for (t1, i1, f1), (t2, i2, f2) in zip(logged, recomputed):
            assert t1 == t2 and i1 == i2
            assert np.array_equal(f1, f2)


class TestRealTimeFactor:
    def test_six_threat_session_steps_at_least_ten_times_real_time(self):
        import time

        launches = "\n".join(
            f"[launch]\ntime_s = 0\nrange_km = {55 + 4 * i}\nbearing_deg = {i * 60}\n"
            f"altitude_m = 10000\nspeed_mps = 300\n"
            for i in range(6)
        )
        sc = parse_scenario(
            "format_version = 1\nseed = 1\n[uav]\naltitude_m = 8000\n"
            "speed_mps = 330\nheading_deg = 0\n" + launches
        )
        s = create_session(sc, random_model_set())
        s.paused = False
        session_step(s, 1.0)  # warm-up: fires launches, first ring
        t0 = time.perf_counter()
        session_step(s, 10.0)
        elapsed = time.perf_counter() - t0
        assert len(s.threats) == 6
        assert elapsed < 1.0, f"10 s of simulation took {elapsed:.2f} s wall"


class TestReplay:
    def test_fixed_policy_trace_deterministic(self):
        sc = parse_scenario(TWO_LAUNCH)
        models = random_model_set()
        a = run_replay(sc, models, PolicyId.S)
        b = run_replay(sc, models, PolicyId.S)
        assert a.trace_text == b.trace_text
        assert a.outcome == "all_threats_inactive"

    def test_auto_mode_reengages_each_second(self):
        sc = parse_scenario(TWO_LAUNCH)
        models = random_model_set()
        result = run_replay(sc, models, None)
        assert result.outcome in ("all_threats_inactive", "hit")
        assert "mode=auto" in result.trace_text.splitlines()[1]

    def test_trace_has_versioned_header_and_end(self):
        sc = parse_scenario(TWO_LAUNCH)
        result = run_replay(sc, random_model_set(), PolicyId.W)
        lines = result.trace_text.strip().splitlines()
        assert lines[0] == "replay_trace format_version=1"
        assert lines[-1].startswith("end outcome=")
        assert any(line.startswith("risk_ring") for line in lines)

    def test_close_launch_auto_is_hit(self):
        sc = parse_scenario(CLOSE_LAUNCH)
        result = run_replay(sc, random_model_set(), PolicyId.N)
        assert result.outcome == OUTCOME_HIT
        assert result.min_md_m < 100.0
