"""Binary training-dataset files: magic "BVRD", little-endian, seekable.

Layout:
    offset  0   magic b"BVRD"
    offset  4   u32 format version (currently 1)
    offset  8   u32 policy index (0..7)
    offset 12   u32 reserved (zero)
    offset 16   u64 sample count
    offset 24   u64 master seed
    offset 32   32-byte SHA-256 of the aircraft constants
    offset 64   32-byte SHA-256 of the guidance constants
    offset 96   rows

Each row is 10 feature f64 + label f64 + time f64 + episode id u64
(104 bytes).  Reads validate magic, version, size and finiteness and fail
loudly rather than returning partial data.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .flightdyn import PolicyId

DATASET_MAGIC = b"BVRD"
DATASET_VERSION = 1
_HEADER = struct.Struct("<4sIIIQQ32s32s")

ROW_DTYPE = np.dtype(
    [("features", "<f8", (10,)), ("md", "<f8"), ("t", "<f8"), ("episode", "<u8")]
)


class DatasetFormatError(ValueError):
    """Bad magic/version, truncated file, or non-finite content."""


@dataclass(frozen=True)
class Dataset:
    """In-memory dataset: parallel arrays plus the provenance header fields."""

    policy: PolicyId
    seed: int
    aircraft_digest: bytes
    guidance_digest: bytes
    features: np.ndarray  # (n, 10) float64
    labels: np.ndarray  # (n,) float64, miss distance in meters
    times: np.ndarray  # (n,) float64, seconds since launch
    episode_ids: np.ndarray  # (n,) uint64

    def __post_init__(self):
        n = len(self.labels)
        if self.features.shape != (n, 10):
            raise DatasetFormatError(f"feature block shape {self.features.shape} != ({n}, 10)")
        if len(self.times) != n or len(self.episode_ids) != n:
            raise DatasetFormatError("column lengths disagree")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_episodes(self) -> int:
        return len(np.unique(self.episode_ids))

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(
            DATASET_MAGIC,
            DATASET_VERSION,
            int(self.policy),
            0,
            len(self),
            self.seed,
            self.aircraft_digest,
            self.guidance_digest,
        )
        rows = np.empty(len(self), dtype=ROW_DTYPE)
        rows["features"] = self.features
        rows["md"] = self.labels
        rows["t"] = self.times
        rows["episode"] = self.episode_ids
        return header + rows.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "Dataset":
        if len(blob) < _HEADER.size:
            raise DatasetFormatError("file shorter than the header")
        magic, version, policy, _, count, seed, digest_a, digest_g = _HEADER.unpack_from(blob)
        if magic != DATASET_MAGIC:
            raise DatasetFormatError(f"bad magic {magic!r}; not a version-{DATASET_VERSION} dataset")
        if version != DATASET_VERSION:
            raise DatasetFormatError(f"unsupported dataset version {version}")
        if policy > 7:
            raise DatasetFormatError(f"policy index {policy} out of range")
        expected = _HEADER.size + count * ROW_DTYPE.itemsize
        if len(blob) != expected:
            raise DatasetFormatError(
                f"truncated or padded file: {len(blob)} bytes, expected {expected}"
            )
        rows = np.frombuffer(blob, dtype=ROW_DTYPE, offset=_HEADER.size, count=count)
        features = rows["features"].astype(np.float64, copy=True)
        labels = rows["md"].astype(np.float64, copy=True)
        times = rows["t"].astype(np.float64, copy=True)
        if not (np.all(np.isfinite(features)) and np.all(np.isfinite(labels)) and np.all(np.isfinite(times))):
            raise DatasetFormatError("non-finite values in dataset rows")
        return cls(
            policy=PolicyId(policy),
            seed=seed,
            aircraft_digest=digest_a,
            guidance_digest=digest_g,
            features=features,
            labels=labels,
            times=times,
            episode_ids=rows["episode"].astype(np.uint64, copy=True),
        )

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def read(cls, path) -> "Dataset":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())
