"""Human-editable scenario files: key = value lines with [section] headers.

Authoring units are degrees and kilometers (matching how engagement
geometries are usually written down); everything is converted to SI and
radians at load.  A scenario holds the UAV initial state, a list of
[launch] events (repeatable section), an optional [noise] block enabling
Monte-Carlo rings, and an optional [models] block pointing at a model-set
manifest.

Example:

    format_version = 1
    seed = 7

    [uav]
    altitude_m = 8000
    speed_mps = 330
    heading_deg = 0

    [models]
    manifest = models/manifest.txt

    [launch]
    time_s = 0
    range_km = 50
    bearing_deg = 45
    altitude_m = 10000
    speed_mps = 300
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .awareness import SensorNoiseConfig

SCENARIO_FORMAT_VERSION = 1


class ScenarioFormatError(ValueError):
    """Malformed scenario text or out-of-range values."""


@dataclass(frozen=True, slots=True)
class LaunchEvent:
    """One authored launch: where and when a missile is fired.

    The range is the 3-D distance from the UAV's initial position; the
    bearing is the absolute compass bearing seen from there.
    """

    time_s: float
    range_m: float
    bearing_rad: float
    altitude_m: float
    speed_mps: float


@dataclass(frozen=True, slots=True)
class Scenario:
    seed: int
    uav_altitude_m: float
    uav_speed_mps: float
    uav_heading_rad: float
    launches: tuple[LaunchEvent, ...]
    noise: SensorNoiseConfig | None = None
    manifest_path: str | None = None
    red_below_m: float = 200.0
    orange_below_m: float = 2000.0


def _parse_sections(text: str):
    """Yield (section_name, dict) pairs; the top level is section ''."""
    sections: list[tuple[str, dict]] = [("", {})]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            sections.append((line[1:-1].strip().lower(), {}))
            continue
        if "=" not in line:
            raise ScenarioFormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        sections[-1][1][key.strip().lower()] = val.strip()
    return sections


def _num(section: dict, key: str, where: str, default=None) -> float:
    if key not in section:
        if default is not None:
            return default
        raise ScenarioFormatError(f"[{where}] is missing '{key}'")
    try:
        value = float(section[key])
    except ValueError as exc:
        raise ScenarioFormatError(f"[{where}] {key}: bad number {section[key]!r}") from exc
    if not math.isfinite(value):
        raise ScenarioFormatError(f"[{where}] {key}: must be finite")
    return value


def parse_scenario(text: str) -> Scenario:
    sections = _parse_sections(text)
    top = sections[0][1]
    if "format_version" not in top:
        raise ScenarioFormatError("missing format_version")
    if int(float(top["format_version"])) != SCENARIO_FORMAT_VERSION:
        raise ScenarioFormatError(f"unsupported format_version {top['format_version']}")
    seed = int(float(top.get("seed", "0")))

    uav = next((body for name, body in sections if name == "uav"), None)
    if uav is None:
        raise ScenarioFormatError("missing [uav] section")
    heading_deg = _num(uav, "heading_deg", "uav")
    if not 0.0 <= heading_deg < 360.0:
        raise ScenarioFormatError(f"[uav] heading_deg {heading_deg} outside [0, 360)")

    launches = []
    for name, body in sections:
        if name != "launch":
            continue
        bearing_deg = _num(body, "bearing_deg", "launch")
        if not 0.0 <= bearing_deg < 360.0:
            raise ScenarioFormatError(f"[launch] bearing_deg {bearing_deg} outside [0, 360)")
        launches.append(
            LaunchEvent(
                time_s=_num(body, "time_s", "launch", default=0.0),
                range_m=_num(body, "range_km", "launch") * 1000.0,
                bearing_rad=math.radians(bearing_deg),
                altitude_m=_num(body, "altitude_m", "launch"),
                speed_mps=_num(body, "speed_mps", "launch"),
            )
        )
    if any(b.time_s < a.time_s for a, b in zip(launches, launches[1:])):
        raise ScenarioFormatError("launch times must be non-decreasing")

    noise = None
    noise_body = next((body for name, body in sections if name == "noise"), None)
    if noise_body is not None:
        noise = SensorNoiseConfig(
            sigma_rho_m=_num(noise_body, "sigma_rho_m", "noise", default=100.0),
            sigma_tau_s=_num(noise_body, "sigma_tau_s", "noise", default=1.0),
            sigma_eta_rad=math.radians(_num(noise_body, "sigma_eta_deg", "noise", default=0.1)),
            sigma_beta_m=_num(noise_body, "sigma_beta_m", "noise", default=100.0),
            sigma_nu_mps=_num(noise_body, "sigma_nu_mps", "noise", default=5.0),
            sample_count=int(_num(noise_body, "sample_count", "noise", default=256.0)),
            quantile=_num(noise_body, "quantile", "noise", default=0.1),
            values_are_variances=bool(
                int(_num(noise_body, "values_are_variances", "noise", default=0.0))
            ),
        )

    manifest = None
    models_body = next((body for name, body in sections if name == "models"), None)
    if models_body is not None and "manifest" in models_body:
        manifest = models_body["manifest"]

    colors = next((body for name, body in sections if name == "colors"), None) or {}
    return Scenario(
        seed=seed,
        uav_altitude_m=_num(uav, "altitude_m", "uav"),
        uav_speed_mps=_num(uav, "speed_mps", "uav"),
        uav_heading_rad=math.radians(heading_deg),
        launches=tuple(launches),
        noise=noise,
        manifest_path=manifest,
        red_below_m=_num(colors, "red_below_m", "colors", default=200.0),
        orange_below_m=_num(colors, "orange_below_m", "colors", default=2000.0),
    )


def load_scenario(path) -> Scenario:
    """Parse a scenario file; the manifest path is resolved relative to it."""
    with open(path, "r") as fh:
        scenario = parse_scenario(fh.read())
    if scenario.manifest_path is not None and not os.path.isabs(scenario.manifest_path):
        resolved = os.path.join(os.path.dirname(os.path.abspath(path)), scenario.manifest_path)
        scenario = Scenario(
            seed=scenario.seed,
            uav_altitude_m=scenario.uav_altitude_m,
            uav_speed_mps=scenario.uav_speed_mps,
            uav_heading_rad=scenario.uav_heading_rad,
            launches=scenario.launches,
            noise=scenario.noise,
            manifest_path=resolved,
            red_below_m=scenario.red_below_m,
            orange_below_m=scenario.orange_below_m,
        )
    return scenario
