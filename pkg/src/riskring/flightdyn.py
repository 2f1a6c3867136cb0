"""3-DOF point-mass aircraft model and the eight compass-direction evasive policies.

The aircraft is a point mass flying coordinated turns: bank angle is slewed
toward a demand proportional to heading error, turn rate follows from the
bank angle, pitch is slewed toward the commanded pitch at a fixed rate, and
speed evolves from thrust minus drag minus the gravity component along the
flight path (descending trades altitude for speed).  Integration is fixed
step RK4.  All functions are pure: identical inputs give bit-identical
outputs, so episodes are reproducible and safe to evaluate concurrently.

Axes: x = North, y = East, z = Up (flat earth).  Heading is radians in
[0, 2pi), 0 = North, clockwise (toward East) positive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields

from .constants import (
    GRAVITY_MPS2,
    SEA_LEVEL_DENSITY_KGPM3,
    air_density_ratio,
    load_packaged_text,
    parse_kv_text,
    render_kv_text,
    sha256_digest,
)

TWO_PI = 2.0 * math.pi

MAX_STEP_S = 0.1
DEFAULT_DT_S = 0.02  # chosen so the Richardson half-step check passes with margin
MIN_SPEED_MPS = 1.0  # numerical floor, never reached in practice


def wrap_heading(angle_rad: float) -> float:
    """Normalize an angle to [0, 2pi)."""
    wrapped = math.fmod(angle_rad, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # adding 2pi to a tiny negative can round up to exactly 2pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def shortest_arc(from_rad: float, to_rad: float) -> float:
    """Signed angular difference in (-pi, pi]; adding it to `from` reaches `to` mod 2pi.

    Ties at exactly pi resolve to +pi (a clockwise half turn).
    """
    if not (math.isfinite(from_rad) and math.isfinite(to_rad)):
        raise ValueError("shortest_arc requires finite angles")
    diff = math.fmod(to_rad - from_rad, TWO_PI)
    if diff > math.pi:
        diff -= TWO_PI
    elif diff <= -math.pi:
        diff += TWO_PI
    return diff


class PolicyId(enum.IntEnum):
    """The eight evasive-maneuver policies, clockwise from North."""

    N = 0
    NE = 1
    E = 2
    SE = 3
    S = 4
    SW = 5
    W = 6
    NW = 7

    @property
    def heading_rad(self) -> float:
        return self.value * (math.pi / 4.0)


@dataclass(frozen=True, slots=True)
class AircraftParams:
    """Point-mass model constants; see data/aircraft.cfg for the shipped defaults."""

    mass_kg: float = 12000.0
    wing_area_m2: float = 27.87
    cd0: float = 0.025
    induced_drag_factor: float = 0.12
    max_thrust_n: float = 130000.0
    max_bank_rad: float = math.radians(80.0)
    max_pitch_rad: float = math.radians(30.0)
    dive_pitch_rad: float = math.radians(-15.0)
    floor_altitude_m: float = 1000.0
    max_load_factor: float = 9.0
    bank_gain: float = 4.0              # bank demand per rad of heading error
    roll_time_constant_s: float = 0.3
    roll_rate_limit_rps: float = math.radians(120.0)
    pitch_time_constant_s: float = 0.5
    pitch_rate_limit_rps: float = math.radians(10.0)

    def to_text(self) -> str:
        values = {f.name: float(getattr(self, f.name)) for f in fields(self)}
        return render_kv_text(values, "aircraft point-mass model constants")

    @classmethod
    def from_text(cls, text: str) -> "AircraftParams":
        return cls(**parse_kv_text(text))

    @classmethod
    def from_file(cls, path) -> "AircraftParams":
        with open(path, "r") as fh:
            return cls.from_text(fh.read())

    def digest(self) -> bytes:
        """SHA-256 of the canonical text form, recorded in dataset headers."""
        return sha256_digest(self.to_text().encode())


DEFAULT_AIRCRAFT = AircraftParams.from_text(load_packaged_text("aircraft.cfg"))


@dataclass(frozen=True, slots=True)
class AircraftState:
    """UAV kinematic truth.  Altitude is the z position; speed is true airspeed."""

    x_m: float
    y_m: float
    z_m: float
    roll_rad: float
    pitch_rad: float
    heading_rad: float
    speed_mps: float

    @property
    def altitude_m(self) -> float:
        return self.z_m

    @property
    def position_m(self) -> tuple[float, float, float]:
        return (self.x_m, self.y_m, self.z_m)

    @property
    def velocity_mps(self) -> tuple[float, float, float]:
        """Velocity vector implied by speed, heading and pitch (no sideslip)."""
        ct = math.cos(self.pitch_rad)
        return (
            self.speed_mps * ct * math.cos(self.heading_rad),
            self.speed_mps * ct * math.sin(self.heading_rad),
            self.speed_mps * math.sin(self.pitch_rad),
        )


@dataclass(frozen=True, slots=True)
class ControlCommand:
    """Autopilot demand: absolute heading, pitch, and throttle in [0, 1]."""

    heading_rad: float
    pitch_rad: float
    throttle: float

    def __post_init__(self):
        if not (
            math.isfinite(self.heading_rad)
            and math.isfinite(self.pitch_rad)
            and math.isfinite(self.throttle)
        ):
            raise ValueError("non-finite control command")
        if not 0.0 <= self.throttle <= 1.0:
            raise ValueError(f"throttle {self.throttle} outside [0, 1]")


def level_state(
    altitude_m: float, speed_mps: float, heading_rad: float, x_m: float = 0.0, y_m: float = 0.0
) -> AircraftState:
    """Wings-level, zero-pitch state, the Table-of-initial-conditions starting point."""
    return AircraftState(
        x_m=x_m,
        y_m=y_m,
        z_m=altitude_m,
        roll_rad=0.0,
        pitch_rad=0.0,
        heading_rad=wrap_heading(heading_rad),
        speed_mps=speed_mps,
    )


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def _deriv(
    z: float,
    psi: float,
    theta: float,
    phi: float,
    v: float,
    cmd_heading: float,
    cmd_pitch: float,
    throttle: float,
    p: AircraftParams,
):
    """Time derivative of (x, y, z, psi, theta, phi, v) under a held command."""
    heading_err = math.fmod(cmd_heading - psi, TWO_PI)
    if heading_err > math.pi:
        heading_err -= TWO_PI
    elif heading_err <= -math.pi:
        heading_err += TWO_PI
    phi_des = _clamp(p.bank_gain * heading_err, -p.max_bank_rad, p.max_bank_rad)
    dphi = _clamp(
        (phi_des - phi) / p.roll_time_constant_s, -p.roll_rate_limit_rps, p.roll_rate_limit_rps
    )
    dtheta = _clamp(
        (cmd_pitch - theta) / p.pitch_time_constant_s,
        -p.pitch_rate_limit_rps,
        p.pitch_rate_limit_rps,
    )
    dpsi = GRAVITY_MPS2 * math.tan(phi) / v

    density_ratio = air_density_ratio(z)
    q_s = 0.5 * SEA_LEVEL_DENSITY_KGPM3 * density_ratio * v * v * p.wing_area_m2
    load = min(1.0 / math.cos(phi), p.max_load_factor)
    weight = p.mass_kg * GRAVITY_MPS2
    drag = q_s * p.cd0 + p.induced_drag_factor * (load * weight) ** 2 / q_s
    thrust = throttle * p.max_thrust_n * density_ratio
    dv = (thrust - drag) / p.mass_kg - GRAVITY_MPS2 * math.sin(theta)

    cos_theta = math.cos(theta)
    return (
        v * cos_theta * math.cos(psi),
        v * cos_theta * math.sin(psi),
        v * math.sin(theta),
        dpsi,
        dtheta,
        dphi,
        dv,
    )


def step_aircraft(
    state: AircraftState,
    cmd: ControlCommand,
    dt: float,
    params: AircraftParams = DEFAULT_AIRCRAFT,
) -> AircraftState:
    """Advance the aircraft by `dt` seconds (one RK4 step) under a held command.

    Bank and pitch never exceed their limits in the returned state; the
    heading is normalized to [0, 2pi).  Raises on non-finite inputs or a dt
    outside (0, 0.1] s.
    """
    if not 0.0 < dt <= MAX_STEP_S:
        raise ValueError(f"dt {dt} outside (0, {MAX_STEP_S}] s")
    x = state.x_m
    y = state.y_m
    z = state.z_m
    psi = state.heading_rad
    theta = state.pitch_rad
    phi = state.roll_rad
    v = state.speed_mps
    if not (
        math.isfinite(x)
        and math.isfinite(y)
        and math.isfinite(z)
        and math.isfinite(psi)
        and math.isfinite(theta)
        and math.isfinite(phi)
        and math.isfinite(v)
    ):
        raise ValueError("non-finite aircraft state")
    if v <= 0.0:
        raise ValueError(f"speed {v} must be positive")

    ch = cmd.heading_rad
    cp = _clamp(cmd.pitch_rad, -params.max_pitch_rad, params.max_pitch_rad)
    thr = cmd.throttle

    k1 = _deriv(z, psi, theta, phi, v, ch, cp, thr, params)
    h = 0.5 * dt
    k2 = _deriv(
        z + h * k1[2], psi + h * k1[3], theta + h * k1[4], phi + h * k1[5], v + h * k1[6],
        ch, cp, thr, params,
    )
    k3 = _deriv(
        z + h * k2[2], psi + h * k2[3], theta + h * k2[4], phi + h * k2[5], v + h * k2[6],
        ch, cp, thr, params,
    )
    k4 = _deriv(
        z + dt * k3[2], psi + dt * k3[3], theta + dt * k3[4], phi + dt * k3[5], v + dt * k3[6],
        ch, cp, thr, params,
    )
    w = dt / 6.0
    return AircraftState(
        x_m=x + w * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
        y_m=y + w * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
        z_m=z + w * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
        heading_rad=wrap_heading(psi + w * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])),
        pitch_rad=_clamp(
            theta + w * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4]),
            -params.max_pitch_rad,
            params.max_pitch_rad,
        ),
        roll_rad=_clamp(
            phi + w * (k1[5] + 2.0 * (k2[5] + k3[5]) + k4[5]),
            -params.max_bank_rad,
            params.max_bank_rad,
        ),
        speed_mps=max(v + w * (k1[6] + 2.0 * (k2[6] + k3[6]) + k4[6]), MIN_SPEED_MPS),
    )


def fly(
    state: AircraftState,
    cmd: ControlCommand,
    duration_s: float,
    dt: float = DEFAULT_DT_S,
    params: AircraftParams = DEFAULT_AIRCRAFT,
) -> AircraftState:
    """Hold one command for a duration by composing fixed RK4 steps."""
    steps = int(round(duration_s / dt))
    for _ in range(steps):
        state = step_aircraft(state, cmd, dt, params)
    return state


def evasive_policy_control(
    policy: PolicyId, state: AircraftState, params: AircraftParams = DEFAULT_AIRCRAFT
) -> ControlCommand:
    """Control law of one evasive policy: its compass heading, full throttle,
    and a fixed dive until the altitude floor is reached."""
    pitch = params.dive_pitch_rad if state.z_m > params.floor_altitude_m else 0.0
    return ControlCommand(heading_rad=PolicyId(policy).heading_rad, pitch_rad=pitch, throttle=1.0)
