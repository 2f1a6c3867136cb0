"""Proportional-navigation missile with boost-sustain-coast propulsion.

Guidance is pure PN computed from exact relative kinematics: lateral
acceleration N * los_rate * closing_speed in the horizontal plane, and the
same law in the vertical plane once inside terminal range.  During
mid-course (range above terminal range) the vertical channel instead tracks
a climb altitude to reduce drag.  The commanded acceleration is held over
each integration step while axial thrust, quadratic air-density-scaled
drag, and gravity act continuously.

The missile is granted perfect target knowledge; only the operator-facing
feature pipeline is restricted to launch observations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace

from .constants import (
    GRAVITY_MPS2,
    air_density_ratio,
    load_packaged_text,
    parse_kv_text,
    render_kv_text,
    sha256_digest,
)
from .flightdyn import AircraftState, MAX_STEP_S


class MissilePhase(enum.IntEnum):
    BOOST = 0
    SUSTAIN = 1
    COAST = 2


@dataclass(frozen=True, slots=True)
class GuidanceConfig:
    """Missile guidance and propulsion constants; defaults in data/missile.cfg."""

    nav_constant: float = 4.0
    midcourse_climb_altitude_m: float = 12500.0
    terminal_range_m: float = 10000.0
    boost_duration_s: float = 6.0
    boost_accel_mps2: float = 150.0
    sustain_duration_s: float = 10.0
    sustain_accel_mps2: float = 25.0
    drag_per_meter: float = 8.0e-5
    max_lateral_accel_mps2: float = 300.0
    lifetime_s: float = 300.0
    hit_radius_m: float = 100.0
    altitude_hold_p: float = 0.05
    altitude_hold_d: float = 0.45
    altitude_hold_accel_limit_mps2: float = 60.0

    def to_text(self) -> str:
        values = {f.name: float(getattr(self, f.name)) for f in fields(self)}
        return render_kv_text(values, "missile guidance and propulsion constants")

    @classmethod
    def from_text(cls, text: str) -> "GuidanceConfig":
        return cls(**parse_kv_text(text))

    @classmethod
    def from_file(cls, path) -> "GuidanceConfig":
        with open(path, "r") as fh:
            return cls.from_text(fh.read())

    def digest(self) -> bytes:
        return sha256_digest(self.to_text().encode())


DEFAULT_GUIDANCE = GuidanceConfig.from_text(load_packaged_text("missile.cfg"))


@dataclass(frozen=True, slots=True)
class MissileState:
    """Missile truth state plus the running within-step minimum target distance."""

    x_m: float
    y_m: float
    z_m: float
    vx_mps: float
    vy_mps: float
    vz_mps: float
    time_since_launch_s: float
    phase: MissilePhase
    min_distance_m: float
    active: bool = True

    @property
    def speed_mps(self) -> float:
        return math.sqrt(self.vx_mps**2 + self.vy_mps**2 + self.vz_mps**2)

    @property
    def position_m(self) -> tuple[float, float, float]:
        return (self.x_m, self.y_m, self.z_m)


def launch_missile(
    launch_pos_m: tuple[float, float, float],
    launch_speed_mps: float,
    target_pos_m: tuple[float, float, float],
) -> MissileState:
    """Missile at the firing position, flying at the target's current position."""
    dx = target_pos_m[0] - launch_pos_m[0]
    dy = target_pos_m[1] - launch_pos_m[1]
    dz = target_pos_m[2] - launch_pos_m[2]
    rng = math.sqrt(dx * dx + dy * dy + dz * dz)
    if rng <= 0.0:
        raise ValueError("launch position coincides with target")
    scale = launch_speed_mps / rng
    return MissileState(
        x_m=launch_pos_m[0],
        y_m=launch_pos_m[1],
        z_m=launch_pos_m[2],
        vx_mps=dx * scale,
        vy_mps=dy * scale,
        vz_mps=dz * scale,
        time_since_launch_s=0.0,
        phase=MissilePhase.BOOST,
        min_distance_m=rng,
        active=True,
    )


def pn_lateral_accel(
    los_rate_rps: float,
    closing_speed_mps: float,
    nav_constant: float,
    max_accel_mps2: float = DEFAULT_GUIDANCE.max_lateral_accel_mps2,
) -> float:
    """PN law a = N * los_rate * closing_speed, clamped to the lateral limit."""
    accel = nav_constant * los_rate_rps * closing_speed_mps
    if accel > max_accel_mps2:
        return max_accel_mps2
    if accel < -max_accel_mps2:
        return -max_accel_mps2
    return accel


def _relative_kinematics(missile: MissileState, target: AircraftState):
    """(dx, dy, dz, dvx, dvy, dvz) of the target relative to the missile."""
    tvx, tvy, tvz = target.velocity_mps
    return (
        target.x_m - missile.x_m,
        target.y_m - missile.y_m,
        target.z_m - missile.z_m,
        tvx - missile.vx_mps,
        tvy - missile.vy_mps,
        tvz - missile.vz_mps,
    )


def guidance_command(
    missile: MissileState,
    target: AircraftState,
    cfg: GuidanceConfig = DEFAULT_GUIDANCE,
) -> tuple[float, float, float]:
    """Commanded acceleration vector (m/s^2), excluding thrust, drag and gravity.

    Horizontal channel: PN on the horizontal line-of-sight rate.  Vertical
    channel: PN on the elevation rate inside terminal range, otherwise a PD
    altitude-hold (with gravity feedforward) toward the mid-course climb
    altitude.
    """
    if not missile.active:
        raise ValueError("guidance_command requires an active missile")
    dx, dy, dz, dvx, dvy, dvz = _relative_kinematics(missile, target)
    r_h2 = dx * dx + dy * dy
    r2 = r_h2 + dz * dz
    rng = math.sqrt(r2)
    if rng < 1.0:
        return (0.0, 0.0, 0.0)
    closing = -(dx * dvx + dy * dvy + dz * dvz) / rng

    # Horizontal plane PN.
    if r_h2 > 1.0:
        los_bearing = math.atan2(dy, dx)
        los_rate_h = (dx * dvy - dy * dvx) / r_h2
        a_h = pn_lateral_accel(los_rate_h, closing, cfg.nav_constant, cfg.max_lateral_accel_mps2)
        ax = -a_h * math.sin(los_bearing)
        ay = a_h * math.cos(los_bearing)
    else:
        los_bearing = 0.0
        ax = ay = 0.0

    if rng > cfg.terminal_range_m:
        # Mid-course: hold the climb altitude instead of vertical PN.
        az = GRAVITY_MPS2 + cfg.altitude_hold_p * (
            cfg.midcourse_climb_altitude_m - missile.z_m
        ) - cfg.altitude_hold_d * missile.vz_mps
        limit = cfg.altitude_hold_accel_limit_mps2
        az = -limit if az < -limit else limit if az > limit else az
        return (ax, ay, az)

    # Terminal: PN in the vertical line-of-sight plane as well.
    r_h = math.sqrt(r_h2)
    elevation = math.atan2(dz, r_h)
    r_h_rate = (dx * dvx + dy * dvy) / r_h if r_h > 1.0 else 0.0
    elev_rate = (r_h * dvz - dz * r_h_rate) / r2
    a_v = pn_lateral_accel(elev_rate, closing, cfg.nav_constant, cfg.max_lateral_accel_mps2)
    sin_e = math.sin(elevation)
    cos_e = math.cos(elevation)
    return (
        ax - a_v * sin_e * math.cos(los_bearing),
        ay - a_v * sin_e * math.sin(los_bearing),
        a_v * cos_e,
    )


def _axial_accel(tau: float, cfg: GuidanceConfig) -> float:
    if tau < cfg.boost_duration_s:
        return cfg.boost_accel_mps2
    if tau < cfg.boost_duration_s + cfg.sustain_duration_s:
        return cfg.sustain_accel_mps2
    return 0.0


def _phase_for(tau: float, cfg: GuidanceConfig) -> MissilePhase:
    if tau < cfg.boost_duration_s:
        return MissilePhase.BOOST
    if tau < cfg.boost_duration_s + cfg.sustain_duration_s:
        return MissilePhase.SUSTAIN
    return MissilePhase.COAST


def cpa_within_step(
    p_rel_m: tuple[float, float, float],
    v_rel_mps: tuple[float, float, float],
    dt: float,
) -> float:
    """Minimum of |p_rel + v_rel * t| over t in [0, dt], assuming uniform motion."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    px, py, pz = p_rel_m
    vx, vy, vz = v_rel_mps
    v2 = vx * vx + vy * vy + vz * vz
    if v2 > 0.0:
        t_star = -(px * vx + py * vy + pz * vz) / v2
        t_star = 0.0 if t_star < 0.0 else dt if t_star > dt else t_star
    else:
        t_star = 0.0
    cx = px + vx * t_star
    cy = py + vy * t_star
    cz = pz + vz * t_star
    return math.sqrt(cx * cx + cy * cy + cz * cz)


def _missile_deriv(
    z: float,
    vx: float,
    vy: float,
    vz: float,
    tau: float,
    acmd: tuple[float, float, float],
    cfg: GuidanceConfig,
):
    """Velocity/acceleration derivative with guidance held, thrust/drag/gravity live."""
    speed = math.sqrt(vx * vx + vy * vy + vz * vz)
    thrust = _axial_accel(tau, cfg)
    drag = cfg.drag_per_meter * air_density_ratio(z) * speed
    if speed > 0.0:
        axial = thrust / speed - drag
        ax = acmd[0] + axial * vx
        ay = acmd[1] + axial * vy
        az = acmd[2] + axial * vz - GRAVITY_MPS2
    else:
        ax, ay, az = acmd[0], acmd[1], acmd[2] - GRAVITY_MPS2
    return (vx, vy, vz, ax, ay, az)


def step_missile(
    missile: MissileState,
    target: AircraftState,
    cfg: GuidanceConfig = DEFAULT_GUIDANCE,
    dt: float = 0.02,
) -> MissileState:
    """Advance the missile by `dt` seconds toward the target (one RK4 step).

    The guidance command is computed once and held across the step.  The
    running minimum target distance is updated with the continuous
    closest-point-of-approach inside the step, not just the endpoints.
    """
    if not 0.0 < dt <= MAX_STEP_S:
        raise ValueError(f"dt {dt} outside (0, {MAX_STEP_S}] s")
    if not missile.active:
        raise ValueError("cannot step an inactive missile")
    if not all(
        math.isfinite(val)
        for val in (
            missile.x_m, missile.y_m, missile.z_m,
            missile.vx_mps, missile.vy_mps, missile.vz_mps,
        )
    ):
        raise ValueError("non-finite missile state")

    acmd = guidance_command(missile, target, cfg)

    dx, dy, dz, dvx, dvy, dvz = _relative_kinematics(missile, target)
    cpa = cpa_within_step((dx, dy, dz), (dvx, dvy, dvz), dt)
    new_min = cpa if cpa < missile.min_distance_m else missile.min_distance_m

    x, y, z = missile.x_m, missile.y_m, missile.z_m
    vx, vy, vz = missile.vx_mps, missile.vy_mps, missile.vz_mps
    tau = missile.time_since_launch_s

    k1 = _missile_deriv(z, vx, vy, vz, tau, acmd, cfg)
    h = 0.5 * dt
    k2 = _missile_deriv(
        z + h * k1[2], vx + h * k1[3], vy + h * k1[4], vz + h * k1[5], tau + h, acmd, cfg
    )
    k3 = _missile_deriv(
        z + h * k2[2], vx + h * k2[3], vy + h * k2[4], vz + h * k2[5], tau + h, acmd, cfg
    )
    k4 = _missile_deriv(
        z + dt * k3[2], vx + dt * k3[3], vy + dt * k3[4], vz + dt * k3[5], tau + dt, acmd, cfg
    )
    w = dt / 6.0
    new_tau = tau + dt
    return MissileState(
        x_m=x + w * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
        y_m=y + w * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
        z_m=z + w * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
        vx_mps=vx + w * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3]),
        vy_mps=vy + w * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4]),
        vz_mps=vz + w * (k1[5] + 2.0 * (k2[5] + k3[5]) + k4[5]),
        time_since_launch_s=new_tau,
        phase=_phase_for(new_tau, cfg),
        min_distance_m=new_min,
        active=True,
    )


def missile_inactive(
    missile: MissileState,
    target: AircraftState,
    cfg: GuidanceConfig = DEFAULT_GUIDANCE,
) -> bool:
    """True once interception has become impossible.

    That is: lifetime exceeded, ground impact, or the missile has burned
    out (coast phase) and is slower than the target while the range is
    opening.  The coast condition matters: a tail-chase launch starts
    slower than the target but still has its whole propulsion budget.
    """
    if missile.time_since_launch_s > cfg.lifetime_s:
        return True
    if missile.z_m <= 0.0:
        return True
    if missile.phase is not MissilePhase.COAST:
        return False
    dx, dy, dz, dvx, dvy, dvz = _relative_kinematics(missile, target)
    range_opening = (dx * dvx + dy * dvy + dz * dvz) > 0.0
    return range_opening and missile.speed_mps < target.speed_mps


def deactivated(missile: MissileState) -> MissileState:
    return replace(missile, active=False)
