"""Point-mass flight model and the eight evasive policies.

Flies the aircraft through a commanded turn, then runs every compass
policy from the same start and plots the ground tracks with the altitude
profile of the dive.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from riskring.flightdyn import (
    ControlCommand,
    PolicyId,
    evasive_policy_control,
    level_state,
    step_aircraft,
)

DT = 0.02


def track(policy, duration_s=90.0):
    state = level_state(8000.0, 330.0, heading_rad=0.0)
    xs, ys, zs = [state.x_m], [state.y_m], [state.z_m]
    for _ in range(int(duration_s / DT)):
        cmd = evasive_policy_control(policy, state)
        state = step_aircraft(state, cmd, DT)
        xs.append(state.x_m)
        ys.append(state.y_m)
        zs.append(state.z_m)
    return xs, ys, zs


def main():
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(12, 6))

    for policy in PolicyId:
        xs, ys, zs = track(policy)
        ax1.plot([y / 1e3 for y in ys], [x / 1e3 for x in xs], label=policy.name)
    ax1.set_xlabel("East [km]")
    ax1.set_ylabel("North [km]")
    ax1.set_title("Evasive policy ground tracks (90 s, from northbound cruise)")
    ax1.axis("equal")
    ax1.legend(ncol=2, fontsize=8)

    xs, ys, zs = track(PolicyId.S, duration_s=180.0)
    ts = [i * DT for i in range(len(zs))]
    ax2.plot(ts, [z / 1e3 for z in zs])
    ax2.set_xlabel("time [s]")
    ax2.set_ylabel("altitude [km]")
    ax2.set_title("Dive profile: descend at full throttle, level at the floor")

    fig.tight_layout()
    fig.savefig("demo01_flight.png", dpi=110)
    print("wrote demo01_flight.png")

    # a held command is an equilibrium: heading and altitude stay put
    state = level_state(8000.0, 330.0, 1.0)
    cmd = ControlCommand(heading_rad=1.0, pitch_rad=0.0, throttle=0.5)
    for _ in range(500):
        state = step_aircraft(state, cmd, DT)
    print(f"equilibrium check: heading {state.heading_rad:.9f} rad, altitude {state.z_m:.3f} m")


if __name__ == "__main__":
    main()
