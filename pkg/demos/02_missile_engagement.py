"""Proportional-navigation engagement geometry.

One head-on interception and one long-range escape, with the mid-course
climb visible in the altitude profile.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from riskring.flightdyn import ControlCommand, level_state, step_aircraft
from riskring.missile import DEFAULT_GUIDANCE, launch_missile, missile_inactive, step_missile

DT = 0.02


def engage(range_km, evading=False):
    """Launch at a UAV flying North; optionally the UAV flees South."""
    uav = level_state(8000.0, 330.0, heading_rad=0.0)
    missile = launch_missile((range_km * 1e3, 0.0, 10000.0), 300.0, uav.position_m)
    heading = math.pi if evading else 0.0
    cmd = ControlCommand(heading, math.radians(-15.0) if evading else 0.0, 1.0)
    m_path, u_path = [], []
    t = 0.0
    while t < 300.0:
        m_path.append((missile.x_m, missile.y_m, missile.z_m))
        u_path.append((uav.x_m, uav.y_m, uav.z_m))
        missile = step_missile(missile, uav, DEFAULT_GUIDANCE, DT)
        uav = step_aircraft(uav, cmd, DT)
        t += DT
        if missile.min_distance_m < DEFAULT_GUIDANCE.hit_radius_m:
            break
        if missile_inactive(missile, uav, DEFAULT_GUIDANCE):
            break
        dx = uav.x_m - missile.x_m
        dy = uav.y_m - missile.y_m
        dz = uav.z_m - missile.z_m
        if math.sqrt(dx * dx + dy * dy + dz * dz) > missile.min_distance_m + 2000.0:
            break
    return m_path, u_path, missile.min_distance_m, t


def main():
    fig, axes = plt.subplots(2, 2, figsize=(12, 8))
    for col, (rng_km, evading, title) in enumerate(
        (
            (35, False, "head-on at 35 km: intercept"),
            (70, True, "fleeing from 70 km: missile falls short"),
        )
    ):
        m_path, u_path, md, t_end = engage(rng_km, evading)
        ax = axes[0][col]
        ax.plot([p[0] / 1e3 for p in m_path], [p[2] / 1e3 for p in m_path], "r-", label="missile")
        ax.plot([p[0] / 1e3 for p in u_path], [p[2] / 1e3 for p in u_path], "b-", label="UAV")
        ax.set_xlabel("North [km]")
        ax.set_ylabel("altitude [km]")
        ax.set_title(f"{title}\nMD {md:.0f} m after {t_end:.0f} s")
        ax.legend()

        ax = axes[1][col]
        ts = [i * DT for i in range(len(m_path))]
        speeds = []
        for i in range(1, len(m_path)):
            d = math.dist(m_path[i], m_path[i - 1])
            speeds.append(d / DT)
        ax.plot(ts[1:], speeds)
        ax.set_xlabel("time [s]")
        ax.set_ylabel("missile speed [m/s]")
        ax.set_title("boost, sustain, then coasting decay")
    fig.tight_layout()
    fig.savefig("demo02_engagement.png", dpi=110)
    print("wrote demo02_engagement.png")


if __name__ == "__main__":
    main()
