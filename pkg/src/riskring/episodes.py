"""Engagement episodes: scenario sampling, simulation under a policy, labeling.

One episode puts the UAV against a single missile launched at t = 0 from a
sampled firing position.  The UAV flies the evasive policy from the launch
instant.  States are recorded at a fixed sampling period and the whole
trajectory is labeled with the episode outcome: 0 m for an intercept,
otherwise the smallest UAV-missile distance ever reached (the miss
distance).  Episodes are pure functions of (policy, draw), which makes the
collector trivially parallel: per-episode seeds are derived from the master
seed and results are merged in episode order, so output files are
deterministic regardless of scheduling.

Feature vector layout (order is fixed; SI units, radians):
    0 h      UAV altitude [m]
    1 phi    UAV roll [rad]
    2 theta  UAV pitch [rad]
    3 psi    UAV heading [rad, 0..2pi)
    4 v      UAV speed [m/s]
    5 rho    distance to the firing position [m]
    6 nu     launch speed [m/s]
    7 tau    time since launch [s]
    8 eta    bearing from UAV nose to the firing position [rad, (-pi, pi]]
    9 beta   firing altitude [m]
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .flightdyn import (
    AircraftParams,
    AircraftState,
    DEFAULT_AIRCRAFT,
    DEFAULT_DT_S,
    PolicyId,
    evasive_policy_control,
    level_state,
    shortest_arc,
    step_aircraft,
)
from .missile import (
    DEFAULT_GUIDANCE,
    GuidanceConfig,
    MissileState,
    launch_missile,
    missile_inactive,
    step_missile,
)

FEATURE_NAMES = ("h", "phi", "theta", "psi", "v", "rho", "nu", "tau", "eta", "beta")
FEATURE_COUNT = 10

# Table-of-initial-conditions sampling ranges.
UAV_SPEED_RANGE_MPS = (300.0, 365.0)
UAV_ALTITUDE_RANGE_M = (6000.0, 10000.0)
LAUNCH_SPEED_RANGE_MPS = (280.0, 320.0)
LAUNCH_ALTITUDE_RANGE_M = (9000.0, 11000.0)
FIRING_DISTANCE_RANGE_M = (40000.0, 80000.0)

DEFAULT_SAMPLE_PERIOD_S = 1.0
MAX_EPISODE_S = 600.0  # bug guard; inactivity always triggers well before this
PASS_MARGIN_M = 500.0  # range beyond the frozen minimum that declares a miss


class EpisodeTimeout(RuntimeError):
    """Episode exceeded the hard simulation-time cap (indicates a bug)."""


@dataclass(frozen=True, slots=True)
class LaunchObservation:
    """Operator-available description of one threat: the launch, not the missile."""

    rho_m: float
    nu_mps: float
    tau_s: float
    eta_rad: float
    beta_m: float

    def __post_init__(self):
        values = (self.rho_m, self.nu_mps, self.tau_s, self.eta_rad, self.beta_m)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("non-finite launch observation")
        if self.rho_m < 0.0:
            raise ValueError(f"rho {self.rho_m} must be >= 0")
        if self.tau_s < 0.0:
            raise ValueError(f"tau {self.tau_s} must be >= 0")
        if not -math.pi < self.eta_rad <= math.pi:
            raise ValueError(f"eta {self.eta_rad} outside (-pi, pi]")


@dataclass(frozen=True, slots=True)
class LaunchRecord:
    """Ground truth of one launch event: fixed firing position, speed, time."""

    position_m: tuple[float, float, float]
    speed_mps: float
    time_s: float


@dataclass(frozen=True, slots=True)
class ScenarioDraw:
    """One sampled initial condition for a single-missile episode."""

    uav_speed_mps: float
    uav_altitude_m: float
    uav_heading_rad: float
    launch_speed_mps: float
    launch_altitude_m: float
    firing_distance_m: float
    launch_bearing_rad: float
    seed: int


@dataclass(frozen=True, slots=True)
class LabeledSample:
    features: np.ndarray  # shape (10,), float64, FEATURE_NAMES order
    md_m: float
    episode_id: int
    t_s: float


def sample_initial_conditions(rng_seed) -> ScenarioDraw:
    """Uniform draw from the initial-condition table; same seed, same draw.

    Accepts an int seed or a numpy SeedSequence (as derived per episode by
    the collector); the stored seed is a stable identifier either way.
    """
    if isinstance(rng_seed, np.random.SeedSequence):
        seq = rng_seed
        seed_id = int(seq.generate_state(1, np.uint64)[0])
    else:
        seq = np.random.SeedSequence(rng_seed)
        seed_id = int(rng_seed)
    rng = np.random.default_rng(seq)
    return ScenarioDraw(
        uav_speed_mps=float(rng.uniform(*UAV_SPEED_RANGE_MPS)),
        uav_altitude_m=float(rng.uniform(*UAV_ALTITUDE_RANGE_M)),
        uav_heading_rad=float(rng.uniform(0.0, 2.0 * math.pi)),
        launch_speed_mps=float(rng.uniform(*LAUNCH_SPEED_RANGE_MPS)),
        launch_altitude_m=float(rng.uniform(*LAUNCH_ALTITUDE_RANGE_M)),
        firing_distance_m=float(rng.uniform(*FIRING_DISTANCE_RANGE_M)),
        launch_bearing_rad=float(rng.uniform(0.0, 2.0 * math.pi)),
        seed=seed_id,
    )


def launcher_position(
    uav_position_m: tuple[float, float, float],
    distance_m: float,
    bearing_rad: float,
    altitude_m: float,
) -> tuple[float, float, float]:
    """Place a launcher at a 3-D slant distance and compass bearing from the UAV.

    The horizontal offset is solved from the slant distance and the altitude
    difference so that the distance-to-firing-position feature at launch is
    exactly the drawn firing distance.
    """
    dz = altitude_m - uav_position_m[2]
    horiz = math.sqrt(max(distance_m * distance_m - dz * dz, 0.0))
    return (
        uav_position_m[0] + horiz * math.cos(bearing_rad),
        uav_position_m[1] + horiz * math.sin(bearing_rad),
        altitude_m,
    )


def observation_from_geometry(
    uav: AircraftState, launch: LaunchRecord, now_s: float
) -> LaunchObservation:
    """Assemble the launch observation as seen from the UAV at time `now_s`.

    Distance and bearing are measured to the fixed firing position, not to
    the missile's (unknown) current position.
    """
    if now_s < launch.time_s:
        raise ValueError(f"observation at t={now_s} precedes launch at t={launch.time_s}")
    dx = launch.position_m[0] - uav.x_m
    dy = launch.position_m[1] - uav.y_m
    dz = launch.position_m[2] - uav.z_m
    rho = math.sqrt(dx * dx + dy * dy + dz * dz)
    bearing = math.atan2(dy, dx)
    return LaunchObservation(
        rho_m=rho,
        nu_mps=launch.speed_mps,
        tau_s=now_s - launch.time_s,
        eta_rad=shortest_arc(uav.heading_rad, bearing),
        beta_m=launch.position_m[2],
    )


def feature_vector(uav: AircraftState, obs: LaunchObservation) -> np.ndarray:
    """The 10-component surrogate input (see module docstring for the order)."""
    return np.array(
        [
            uav.z_m,
            uav.roll_rad,
            uav.pitch_rad,
            uav.heading_rad,
            uav.speed_mps,
            obs.rho_m,
            obs.nu_mps,
            obs.tau_s,
            obs.eta_rad,
            obs.beta_m,
        ],
        dtype=np.float64,
    )


def observe_state(uav: AircraftState, launch: LaunchRecord, now_s: float) -> np.ndarray:
    """Feature vector for one threat at time `now_s` (launch must have occurred)."""
    return feature_vector(uav, observation_from_geometry(uav, launch, now_s))


@dataclass(frozen=True, slots=True)
class EpisodeResult:
    samples: list[LabeledSample]
    md_m: float
    hit: bool
    duration_s: float
    # full-rate trajectory of (t, uav, missile) tuples; empty unless requested
    trajectory: tuple


def simulate_episode(
    policy: PolicyId,
    draw: ScenarioDraw,
    sample_period_s: float = DEFAULT_SAMPLE_PERIOD_S,
    episode_id: int = 0,
    aircraft: AircraftParams = DEFAULT_AIRCRAFT,
    guidance: GuidanceConfig = DEFAULT_GUIDANCE,
    dt: float = DEFAULT_DT_S,
    record_trajectory: bool = False,
) -> EpisodeResult:
    """Run one UAV-vs-one-missile episode to termination and label every sample.

    Terminal conditions: intercept (closest approach inside the hit radius,
    labeled 0), a completed miss (range opening beyond the smallest distance
    reached), or missile inactivity.  The miss terminal follows the
    hit/miss/inactive episode semantics of the engagement model; without it
    a missed missile with residual energy would circle back indefinitely.
    """
    if sample_period_s < dt:
        raise ValueError("sample_period must be at least the dynamics dt")
    steps_per_sample = int(round(sample_period_s / dt))

    uav = level_state(draw.uav_altitude_m, draw.uav_speed_mps, draw.uav_heading_rad)
    launch_pos = launcher_position(
        uav.position_m, draw.firing_distance_m, draw.launch_bearing_rad, draw.launch_altitude_m
    )
    launch = LaunchRecord(position_m=launch_pos, speed_mps=draw.launch_speed_mps, time_s=0.0)
    missile = launch_missile(launch_pos, draw.launch_speed_mps, uav.position_m)

    max_steps = int(MAX_EPISODE_S / dt)
    times: list[float] = []
    features: list[np.ndarray] = []
    trajectory = [] if record_trajectory else None

    hit = False
    step = 0
    while True:
        t = step * dt
        if step % steps_per_sample == 0:
            times.append(t)
            features.append(observe_state(uav, launch, t))
        if record_trajectory:
            trajectory.append((t, uav, missile))

        cmd = evasive_policy_control(policy, uav, aircraft)
        missile = step_missile(missile, uav, guidance, dt)
        uav = step_aircraft(uav, cmd, dt, aircraft)
        step += 1

        if missile.min_distance_m < guidance.hit_radius_m:
            hit = True
            break
        dx = uav.x_m - missile.x_m
        dy = uav.y_m - missile.y_m
        dz = uav.z_m - missile.z_m
        rng = math.sqrt(dx * dx + dy * dy + dz * dz)
        if rng > missile.min_distance_m + PASS_MARGIN_M and missile_passed(missile, uav):
            break
        if missile_inactive(missile, uav, guidance):
            break
        if step >= max_steps:
            raise EpisodeTimeout(f"episode exceeded {MAX_EPISODE_S} s (policy={policy!r})")

    t_end = step * dt
    if record_trajectory:
        trajectory.append((t_end, uav, missile))
    md = 0.0 if hit else missile.min_distance_m
    samples = [
        LabeledSample(features=f, md_m=md, episode_id=episode_id, t_s=t)
        for f, t in zip(features, times)
    ]
    return EpisodeResult(
        samples=samples,
        md_m=md,
        hit=hit,
        duration_s=t_end,
        trajectory=tuple(trajectory) if record_trajectory else (),
    )


def missile_passed(missile: MissileState, uav: AircraftState) -> bool:
    """Range rate positive: the missile is currently moving away from the UAV."""
    uvx, uvy, uvz = uav.velocity_mps
    dx = uav.x_m - missile.x_m
    dy = uav.y_m - missile.y_m
    dz = uav.z_m - missile.z_m
    return (
        dx * (uvx - missile.vx_mps) + dy * (uvy - missile.vy_mps) + dz * (uvz - missile.vz_mps)
    ) > 0.0


def run_episode(
    policy: PolicyId,
    draw: ScenarioDraw,
    sample_period_s: float = DEFAULT_SAMPLE_PERIOD_S,
    episode_id: int = 0,
    aircraft: AircraftParams = DEFAULT_AIRCRAFT,
    guidance: GuidanceConfig = DEFAULT_GUIDANCE,
    dt: float = DEFAULT_DT_S,
) -> list[LabeledSample]:
    """Simulate one episode and return its uniformly labeled samples."""
    return simulate_episode(
        policy, draw, sample_period_s, episode_id, aircraft, guidance, dt
    ).samples


def episode_seed(master_seed: int, episode_id: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(episode_id,))


def _collect_range(args) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    policy, seed, first, last, sample_period_s, aircraft, guidance, dt = args
    feats, mds, ts, eids = [], [], [], []
    for eid in range(first, last):
        draw = sample_initial_conditions(episode_seed(seed, eid))
        result = simulate_episode(
            policy, draw, sample_period_s, eid, aircraft, guidance, dt
        )
        for s in result.samples:
            feats.append(s.features)
            mds.append(s.md_m)
            ts.append(s.t_s)
            eids.append(eid)
    return (
        np.asarray(feats, dtype=np.float64).reshape(len(mds), FEATURE_COUNT),
        np.asarray(mds, dtype=np.float64),
        np.asarray(ts, dtype=np.float64),
        np.asarray(eids, dtype=np.uint64),
    )


def collect_dataset(
    policy: PolicyId,
    n_episodes: int,
    seed: int,
    sample_period_s: float = DEFAULT_SAMPLE_PERIOD_S,
    aircraft: AircraftParams = DEFAULT_AIRCRAFT,
    guidance: GuidanceConfig = DEFAULT_GUIDANCE,
    dt: float = DEFAULT_DT_S,
    workers: int | None = None,
) -> Dataset:
    """Run `n_episodes` independent episodes of one policy into a dataset.

    Episode seeds are derived from the master seed, so the output is
    byte-identical for a given (policy, n_episodes, seed) no matter how many
    workers execute it.
    """
    if n_episodes <= 0:
        raise ValueError("n_episodes must be positive")
    workers = workers if workers is not None else min(os.cpu_count() or 1, 8)
    chunk = max(1, math.ceil(n_episodes / max(workers * 4, 1)))
    ranges = [
        (policy, seed, first, min(first + chunk, n_episodes), sample_period_s,
         aircraft, guidance, dt)
        for first in range(0, n_episodes, chunk)
    ]
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_collect_range, ranges))
    else:
        parts = [_collect_range(r) for r in ranges]
    features = np.concatenate([p[0] for p in parts])
    labels = np.concatenate([p[1] for p in parts])
    times = np.concatenate([p[2] for p in parts])
    episode_ids = np.concatenate([p[3] for p in parts])
    return Dataset(
        policy=PolicyId(policy),
        seed=seed,
        aircraft_digest=aircraft.digest(),
        guidance_digest=guidance.digest(),
        features=features,
        labels=labels,
        times=times,
        episode_ids=episode_ids,
    )
