"""Risk rings for multi-threat situations, using the committed fixture models.

Reproduces the three headline situations: a spread of threats with safe
corridors, four close launches with no way out, and one threat at maximum
range.  Also shows Monte-Carlo bands under the reference sensor noise.
"""

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from riskring.awareness import (
    SensorNoiseConfig,
    assess,
    color_map,
    monte_carlo_assess,
    ring_to_text,
)
from riskring.episodes import LaunchObservation
from riskring.flightdyn import PolicyId, level_state
from riskring.surrogate import load_model_set

MANIFEST = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "models", "manifest.txt")


def threat(rho_km, eta_deg, nu=300.0, tau=0.0, beta=10000.0):
    return LaunchObservation(
        rho_m=rho_km * 1e3, nu_mps=nu, tau_s=tau,
        eta_rad=math.radians(eta_deg), beta_m=beta,
    )


def draw_ring(ax, ring, title):
    colors = {"red": "#d62728", "orange": "#ff9f1c", "green": "#2ca02c"}
    for entry in ring.entries:
        start = 90.0 - entry.policy.value * 45.0 - 22.5
        wedge = plt.matplotlib.patches.Wedge(
            (0, 0), 1.0, start, start + 45.0, width=0.35,
            facecolor=colors[color_map(entry.md_m)],
            edgecolor="black" if entry.policy == ring.safest else "white",
            linewidth=2.5 if entry.policy == ring.safest else 0.5,
            hatch="///" if entry.extrapolated else None,
        )
        ax.add_patch(wedge)
        ang = math.radians(90.0 - entry.policy.value * 45.0)
        ax.text(1.15 * math.cos(ang), 1.15 * math.sin(ang), entry.policy.name,
                ha="center", va="center", fontsize=9)
    ax.plot(0, 0, marker=(3, 0, 0), markersize=16, color="k")
    ax.set_xlim(-1.4, 1.4)
    ax.set_ylim(-1.4, 1.4)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(title, fontsize=10)


def main():
    models = load_model_set(MANIFEST)
    uav = level_state(8000.0, 330.0, heading_rad=0.0)

    spread = [threat(31, 20), threat(40, -65), threat(58, 160)]
    boxed = [threat(12, 45), threat(12, 135), threat(12, -135), threat(12, -45)]
    far = [threat(80, 0)]

    fig, axes = plt.subplots(1, 3, figsize=(12, 4.2))
    for ax, threats, title in (
        (axes[0], spread, "three threats: northern options risky"),
        (axes[1], boxed, "four close launches: no safe option"),
        (axes[2], far, "one launch at 80 km: everything is green"),
    ):
        ring = assess(uav, threats, models)
        draw_ring(ax, ring, title)
    fig.tight_layout()
    fig.savefig("demo04_rings.png", dpi=110)
    print("wrote demo04_rings.png")

    print("\nthree-threat ring, deterministic:")
    print(ring_to_text(assess(uav, spread, models)))

    noisy = monte_carlo_assess(uav, spread, models, SensorNoiseConfig(), seed=1)
    print("with the reference sensor noise (90% lower bounds / medians / upper):")
    print(ring_to_text(noisy))


if __name__ == "__main__":
    main()
