"""Live engagement sessions and offline replay.

A session advances UAV truth and all live missile truths in fixed 0.02 s
substeps, fires authored launch events when their time arrives, and
recomputes the risk ring at 1 Hz.  The ring is computed strictly from
launch observations (firing position, launch speed, time since launch) and
the UAV's own state; live missile positions never leak into the features.
Every feature vector that fed a ring is logged so this barrier can be
audited offline.

The operator steers with a desired heading or by engaging an evasive
policy; replay mode optionally re-engages the currently safest policy at
every ring update (auto).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .awareness import RiskRing, assess, monte_carlo_assess, ring_to_text
from .episodes import LaunchRecord, launcher_position, observation_from_geometry, feature_vector
from .flightdyn import (
    AircraftParams,
    AircraftState,
    ControlCommand,
    DEFAULT_AIRCRAFT,
    DEFAULT_DT_S,
    PolicyId,
    evasive_policy_control,
    level_state,
    step_aircraft,
)
from .missile import (
    DEFAULT_GUIDANCE,
    GuidanceConfig,
    MissileState,
    deactivated,
    launch_missile,
    missile_inactive,
    step_missile,
)
from .scenario import Scenario
from .surrogate import MlpModel

OUTCOME_ONGOING = "ongoing"
OUTCOME_HIT = "hit"
OUTCOME_ALL_INACTIVE = "all_threats_inactive"

RING_PERIOD_S = 1.0
CRUISE_THROTTLE = 0.55
TRACE_FORMAT_VERSION = 1
MAX_SESSION_S = 1200.0


class TerminalSessionError(RuntimeError):
    """Raised for commands issued after the session reached an outcome."""


@dataclass
class ThreatTrack:
    launch: LaunchRecord
    missile: MissileState


@dataclass
class SessionState:
    """Mutable world state owned by a single stepper; readers take snapshots."""

    scenario: Scenario
    models: dict[PolicyId, MlpModel] | None
    uav: AircraftState
    clock_s: float = 0.0
    pending: list = field(default_factory=list)  # LaunchEvents not yet fired
    threats: list[ThreatTrack] = field(default_factory=list)
    ring: RiskRing | None = None
    ring_count: int = 0
    next_ring_s: float = 0.0
    desired_heading_rad: float | None = None
    engaged_policy: PolicyId | None = None
    auto_engage: bool = False
    engage_on_first_launch: PolicyId | None = None
    paused: bool = True
    outcome: str = OUTCOME_ONGOING
    feature_log: list = field(default_factory=list)  # (clock, threat_idx, features)
    ring_log: list = field(default_factory=list)  # (clock, RiskRing)
    aircraft: AircraftParams = DEFAULT_AIRCRAFT
    guidance: GuidanceConfig = DEFAULT_GUIDANCE

    @property
    def min_md_m(self) -> float:
        if not self.threats:
            return math.inf
        return min(t.missile.min_distance_m for t in self.threats)


def create_session(
    scenario: Scenario,
    models: dict[PolicyId, MlpModel] | None,
    aircraft: AircraftParams = DEFAULT_AIRCRAFT,
    guidance: GuidanceConfig = DEFAULT_GUIDANCE,
) -> SessionState:
    uav = level_state(scenario.uav_altitude_m, scenario.uav_speed_mps, scenario.uav_heading_rad)
    return SessionState(
        scenario=scenario,
        models=models,
        uav=uav,
        pending=sorted(scenario.launches, key=lambda e: e.time_s),
        aircraft=aircraft,
        guidance=guidance,
    )


def apply_heading_command(session: SessionState, heading_rad: float) -> None:
    if session.outcome != OUTCOME_ONGOING:
        raise TerminalSessionError(f"session already ended: {session.outcome}")
    if not math.isfinite(heading_rad):
        raise ValueError("heading must be finite")
    session.desired_heading_rad = heading_rad % (2.0 * math.pi)
    session.engaged_policy = None
    session.auto_engage = False


def engage_policy(session: SessionState, policy: PolicyId) -> None:
    if session.outcome != OUTCOME_ONGOING:
        raise TerminalSessionError(f"session already ended: {session.outcome}")
    session.engaged_policy = PolicyId(policy)
    session.auto_engage = False


def _uav_command(session: SessionState) -> ControlCommand:
    if session.engaged_policy is not None:
        return evasive_policy_control(session.engaged_policy, session.uav, session.aircraft)
    heading = (
        session.desired_heading_rad
        if session.desired_heading_rad is not None
        else session.uav.heading_rad
    )
    return ControlCommand(heading_rad=heading, pitch_rad=0.0, throttle=CRUISE_THROTTLE)


def _ring_seed(session: SessionState) -> int:
    seq = np.random.SeedSequence(entropy=session.scenario.seed, spawn_key=(session.ring_count,))
    return int(seq.generate_state(1, np.uint64)[0])


def _recompute_ring(session: SessionState) -> None:
    if session.models is None or not session.threats:
        return
    observations = []
    for idx, track in enumerate(session.threats):
        obs = observation_from_geometry(session.uav, track.launch, session.clock_s)
        observations.append(obs)
        session.feature_log.append(
            (session.clock_s, idx, feature_vector(session.uav, obs))
        )
    noise = session.scenario.noise
    if noise is not None:
        ring = monte_carlo_assess(
            session.uav, observations, session.models, noise, seed=_ring_seed(session)
        )
    else:
        ring = assess(session.uav, observations, session.models)
    session.ring_count += 1
    session.ring = ring
    session.ring_log.append((session.clock_s, ring))
    if session.auto_engage:
        session.engaged_policy = ring.safest


def session_step(session: SessionState, dt_wall_s: float) -> SessionState:
    """Advance the session by `dt_wall_s` of simulated time.

    A paused or terminal session is returned unchanged.  The returned object
    is the same (mutated) session, for convenient chaining.
    """
    if dt_wall_s <= 0.0:
        raise ValueError("dt_wall_s must be positive")
    if session.paused or session.outcome != OUTCOME_ONGOING:
        return session
    substeps = max(1, round(dt_wall_s / DEFAULT_DT_S))
    for _ in range(substeps):
        if session.outcome != OUTCOME_ONGOING:
            break
        _advance_one(session, DEFAULT_DT_S)
    return session


def _advance_one(session: SessionState, dt: float) -> None:
    # fire launches whose time has arrived
    while session.pending and session.pending[0].time_s <= session.clock_s + 1e-9:
        event = session.pending.pop(0)
        uav0 = level_state(
            session.scenario.uav_altitude_m,
            session.scenario.uav_speed_mps,
            session.scenario.uav_heading_rad,
        )
        position = launcher_position(
            uav0.position_m, event.range_m, event.bearing_rad, event.altitude_m
        )
        record = LaunchRecord(position_m=position, speed_mps=event.speed_mps, time_s=event.time_s)
        missile = launch_missile(position, event.speed_mps, session.uav.position_m)
        session.threats.append(ThreatTrack(launch=record, missile=missile))
        session.next_ring_s = min(session.next_ring_s, session.clock_s)
        if session.engage_on_first_launch is not None and session.engaged_policy is None:
            session.engaged_policy = session.engage_on_first_launch

    # ring cadence: 1 Hz once at least one threat exists
    if session.threats and session.clock_s + 1e-9 >= session.next_ring_s:
        _recompute_ring(session)
        session.next_ring_s = session.clock_s + RING_PERIOD_S

    cmd = _uav_command(session)
    for track in session.threats:
        if not track.missile.active:
            continue
        track.missile = step_missile(track.missile, session.uav, session.guidance, dt)
    session.uav = step_aircraft(session.uav, cmd, dt, session.aircraft)
    session.clock_s += dt

    hit = any(
        t.missile.min_distance_m < session.guidance.hit_radius_m for t in session.threats
    )
    if hit:
        session.outcome = OUTCOME_HIT
        return
    for track in session.threats:
        if track.missile.active and missile_inactive(track.missile, session.uav, session.guidance):
            track.missile = deactivated(track.missile)
        elif track.missile.active and _passed_beyond(track, session.uav):
            track.missile = deactivated(track.missile)
    if not session.pending and session.threats and all(
        not t.missile.active for t in session.threats
    ):
        session.outcome = OUTCOME_ALL_INACTIVE
    if session.clock_s > MAX_SESSION_S:
        raise RuntimeError(f"session exceeded {MAX_SESSION_S} s without an outcome")


def _passed_beyond(track: ThreatTrack, uav: AircraftState) -> bool:
    """A missile well past its closest approach and opening no longer threatens."""
    m = track.missile
    dx, dy, dz = uav.x_m - m.x_m, uav.y_m - m.y_m, uav.z_m - m.z_m
    rng = math.sqrt(dx * dx + dy * dy + dz * dz)
    if rng <= m.min_distance_m + 500.0:
        return False
    uvx, uvy, uvz = uav.velocity_mps
    return (dx * (uvx - m.vx_mps) + dy * (uvy - m.vy_mps) + dz * (uvz - m.vz_mps)) > 0.0


@dataclass(frozen=True)
class ReplayResult:
    outcome: str
    duration_s: float
    min_md_m: float
    final_ring: RiskRing | None
    trace_text: str


def run_replay(
    scenario: Scenario,
    models: dict[PolicyId, MlpModel],
    policy: PolicyId | None = None,
    aircraft: AircraftParams = DEFAULT_AIRCRAFT,
    guidance: GuidanceConfig = DEFAULT_GUIDANCE,
) -> ReplayResult:
    """Run a scenario to its outcome, steering by a fixed policy or (when
    `policy` is None) by the safest policy re-evaluated at every ring update."""
    session = create_session(scenario, models, aircraft, guidance)
    session.paused = False
    if policy is None:
        session.auto_engage = True
    else:
        session.engage_on_first_launch = PolicyId(policy)
    mode = "auto" if policy is None else PolicyId(policy).name

    rows = []
    guard = 0
    while session.outcome == OUTCOME_ONGOING:
        rows.append(_trace_row(session))
        session_step(session, RING_PERIOD_S)
        guard += 1
        if guard > MAX_SESSION_S:
            raise RuntimeError("replay failed to terminate")
    rows.append(_trace_row(session))

    lines = [
        f"replay_trace format_version={TRACE_FORMAT_VERSION}",
        f"mode={mode} scenario_seed={session.scenario.seed}",
    ]
    lines += rows
    if session.ring is not None:
        lines.append(
            ring_to_text(
                session.ring, session.scenario.red_below_m, session.scenario.orange_below_m
            ).rstrip("\n")
        )
    min_md = session.min_md_m
    lines.append(
        f"end outcome={session.outcome} t_s={session.clock_s!r} min_md_m={min_md!r}"
    )
    return ReplayResult(
        outcome=session.outcome,
        duration_s=session.clock_s,
        min_md_m=min_md,
        final_ring=session.ring,
        trace_text="\n".join(lines) + "\n",
    )


def _trace_row(session: SessionState) -> str:
    u = session.uav
    engaged = session.engaged_policy.name if session.engaged_policy is not None else "-"
    safest = session.ring.safest.name if session.ring is not None else "-"
    return (
        f"row t_s={session.clock_s!r} x_m={u.x_m!r} y_m={u.y_m!r} z_m={u.z_m!r} "
        f"heading_rad={u.heading_rad!r} pitch_rad={u.pitch_rad!r} roll_rad={u.roll_rad!r} "
        f"speed_mps={u.speed_mps!r} engaged={engaged} safest={safest} "
        f"outcome={session.outcome}"
    )
