"""Plain-text key=value constants files, their hashes, and shared physical constants.

Every tunable physical parameter of the simulation lives in one of two
constants files (aircraft and missile guidance).  Files are hashed with
SHA-256 and the digests are embedded in dataset headers so that any
trained model can be traced back to the exact dynamics it was trained on.
"""

from __future__ import annotations

import hashlib
import math
from importlib import resources

GRAVITY_MPS2 = 9.80665
SEA_LEVEL_DENSITY_KGPM3 = 1.225
DENSITY_SCALE_HEIGHT_M = 8500.0

CONSTANTS_FORMAT_VERSION = 1


class ConstantsFormatError(ValueError):
    """Raised for malformed or incompatible constants files."""


def air_density_ratio(altitude_m: float) -> float:
    """Exponential-atmosphere density divided by the sea-level value."""
    return math.exp(-altitude_m / DENSITY_SCALE_HEIGHT_M)


def parse_kv_text(text: str) -> dict[str, float]:
    """Parse `key = value` lines into a dict of floats.

    Blank lines and `#` comments are ignored.  A `format_version` key is
    required and checked against the supported version.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConstantsFormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ConstantsFormatError(f"line {lineno}: bad numeric value {val.strip()!r}") from exc
    version = values.pop("format_version", None)
    if version is None:
        raise ConstantsFormatError("missing format_version")
    if int(version) != CONSTANTS_FORMAT_VERSION:
        raise ConstantsFormatError(f"unsupported format_version {version:g}")
    return values


def render_kv_text(values: dict[str, float], header: str) -> str:
    """Render constants back to canonical text (fixed key order, repr floats)."""
    lines = [f"# {header}", f"format_version = {CONSTANTS_FORMAT_VERSION}"]
    lines += [f"{key} = {value!r}" for key, value in values.items()]
    return "\n".join(lines) + "\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_digest(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def load_packaged_text(filename: str) -> str:
    """Read one of the default constants files shipped with the package."""
    return resources.files("riskring.data").joinpath(filename).read_text()
