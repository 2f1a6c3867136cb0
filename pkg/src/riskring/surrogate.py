"""Per-policy miss-distance surrogate: a fixed 10-128-256-256-64-1 tanh MLP.

Everything is double precision and deterministic.  Inputs and labels are
z-scored with statistics computed on the training split and stored in the
model, because the raw features span five orders of magnitude (meters vs
radians) and tanh saturates without scaling.  Training is plain
mini-batch gradient descent: reset gradients, forward, MSE loss,
backpropagate, update, with a seeded shuffle every epoch.  The validation
split is drawn by episode, not by sample, since all samples of an episode
share one label.

Predictions are clamped to zero at inference only; the loss sees the raw
network output so gradients stay unbiased.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from .constants import sha256_hex
from .dataset import Dataset
from .episodes import FEATURE_NAMES
from .flightdyn import PolicyId

LAYER_DIMS = (10, 128, 256, 256, 64, 1)

MODEL_MAGIC = b"BVRM"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    """Bad magic/version/shape in a model file."""


class TrainingError(ValueError):
    """Dataset unusable for training (empty, or a constant feature)."""


@dataclass
class TrainConfig:
    """Training hyperparameters; the defaults are the reference configuration
    (400 epochs, learning rate 3e-4, batch 64)."""

    epochs: int = 400
    learning_rate: float = 3e-4
    batch_size: int = 64
    seed: int = 0
    val_fraction: float = 0.1

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")


@dataclass
class MlpModel:
    """Weights, biases, normalization statistics and training provenance."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    feature_mean: np.ndarray
    feature_std: np.ndarray
    label_mean: float
    label_std: float
    policy: PolicyId
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shapes = [w.shape for w in self.weights]
        expected = [(LAYER_DIMS[i], LAYER_DIMS[i + 1]) for i in range(len(LAYER_DIMS) - 1)]
        if shapes != expected:
            raise ModelFormatError(f"weight shapes {shapes} do not match {expected}")
        if [b.shape for b in self.biases] != [(d,) for d in LAYER_DIMS[1:]]:
            raise ModelFormatError("bias shapes do not match the layer dims")
        if self.feature_mean.shape != (10,) or self.feature_std.shape != (10,):
            raise ModelFormatError("normalization statistics must have 10 entries")
        if not np.all(self.feature_std > 0.0) or not self.label_std > 0.0:
            raise ModelFormatError("normalization std must be positive")
        finite = all(np.all(np.isfinite(a)) for a in self.weights + self.biases)
        if not finite:
            raise ModelFormatError("non-finite model parameters")


def normalize_features(model: MlpModel, x: np.ndarray) -> np.ndarray:
    return (x - model.feature_mean) / model.feature_std


def denormalize_label(model: MlpModel, y_norm: float) -> float:
    return y_norm * model.label_std + model.label_mean


def predict_one(model: MlpModel, x: np.ndarray) -> float:
    """Single-vector prediction core; `x` must be a finite float64 (10,) array.

    This is the one and only inference path for risk-ring work: batched BLAS
    products are not bitwise-identical to single-vector ones, and the
    aggregation contracts require exact reproducibility.  The compiled
    kernel behind it is shared with the row-parallel Monte-Carlo evaluator,
    which therefore produces bitwise-identical values.
    """
    from ._fastmlp import predict_one_compiled

    return predict_one_compiled(model, x)


def forward(model: MlpModel, x) -> float:
    """Predicted miss distance in meters for one feature vector.

    Normalizes with the stored statistics, runs the five layers (tanh after
    all but the last), denormalizes, and clamps negatives to zero.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (10,):
        raise ValueError(f"expected a 10-component feature vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite feature vector")
    return predict_one(model, x)


def predict_batch(model: MlpModel, features: np.ndarray) -> np.ndarray:
    """Vectorized predictions in meters for an (n, 10) feature block.

    Note: BLAS accumulation order differs between batched and single-vector
    products, so results can differ from `forward` in the last ulp; the risk
    ring uses `forward` exclusively for that reason.
    """
    a = (np.asarray(features, dtype=np.float64) - model.feature_mean) / model.feature_std
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        a = a @ w + b
        if i < last:
            np.tanh(a, out=a)
    y = a[:, 0] * model.label_std + model.label_mean
    return np.maximum(y, 0.0)


def mse_loss(predictions, labels) -> float:
    """Mean squared error; training applies it in normalized label space."""
    p = np.asarray(predictions, dtype=np.float64).reshape(-1)
    l = np.asarray(labels, dtype=np.float64).reshape(-1)
    if len(p) != len(l):
        raise ValueError(f"length mismatch: {len(p)} predictions vs {len(l)} labels")
    if len(p) == 0:
        raise ValueError("empty batch")
    d = p - l
    return float(np.mean(d * d))


def _forward_cache(model: MlpModel, x_norm: np.ndarray) -> list[np.ndarray]:
    """Activations [a0..a5] for a normalized batch; a5 is the raw output."""
    acts = [x_norm]
    a = x_norm
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        a = a @ w + b
        if i < last:
            a = np.tanh(a)
        acts.append(a)
    return acts


def backward(model: MlpModel, x_norm: np.ndarray, y_norm: np.ndarray):
    """Exact gradients of the batch-mean MSE w.r.t. every weight and bias.

    Inputs are in normalized space; `y_norm` has shape (n,) or (n, 1).
    Returns (grad_weights, grad_biases) with the same shapes as the params.
    """
    x_norm = np.asarray(x_norm, dtype=np.float64)
    y = np.asarray(y_norm, dtype=np.float64).reshape(-1, 1)
    if len(x_norm) == 0:
        raise ValueError("empty batch")
    acts = _forward_cache(model, x_norm)
    n = len(x_norm)
    delta = 2.0 * (acts[-1] - y) / n
    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    for i in range(len(model.weights) - 1, -1, -1):
        grad_w[i] = acts[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (1.0 - acts[i] * acts[i])
    return grad_w, grad_b


class _SgdWorkspace:
    """Reusable buffers for one batch size; cuts allocation out of the hot loop."""

    def __init__(self, batch: int):
        self.x = np.empty((batch, LAYER_DIMS[0]))
        self.y = np.empty((batch, 1))
        self.z = [np.empty((batch, d)) for d in LAYER_DIMS[1:]]
        self.t = [np.empty((batch, d)) for d in LAYER_DIMS[1:]]
        self.gw = [np.empty((LAYER_DIMS[i], LAYER_DIMS[i + 1])) for i in range(len(LAYER_DIMS) - 1)]

    def step(self, model: MlpModel, xn: np.ndarray, yn: np.ndarray, idx: np.ndarray, lr: float):
        np.take(xn, idx, axis=0, out=self.x)
        np.take(yn, idx, axis=0, out=self.y)
        ws, bs = model.weights, model.biases
        last = len(ws) - 1
        a = self.x
        for i in range(len(ws)):
            np.dot(a, ws[i], out=self.z[i])
            self.z[i] += bs[i]
            if i < last:
                np.tanh(self.z[i], out=self.z[i])
            a = self.z[i]
        # delta for the output layer lives in t[last]
        d = self.t[last]
        np.subtract(self.z[last], self.y, out=d)
        d *= 2.0 / len(idx)
        for i in range(last, -1, -1):
            src = self.x if i == 0 else self.z[i - 1]
            np.dot(src.T, d, out=self.gw[i])
            gb = d.sum(axis=0)
            if i > 0:
                np.dot(d, ws[i].T, out=self.t[i - 1])
                tmp = self.z[i - 1]
                # tanh'(z) = 1 - a^2, reusing the activation buffer
                np.multiply(tmp, tmp, out=tmp)
                np.subtract(1.0, tmp, out=tmp)
                self.t[i - 1] *= tmp
                d = self.t[i - 1]
            self.gw[i] *= lr
            ws[i] -= self.gw[i]
            gb *= lr
            bs[i] -= gb


def init_parameters(rng: np.random.Generator):
    """Scaled-uniform fan-in initialization: U(+-sqrt(1/fan_in)), zero biases."""
    weights, biases = [], []
    for i in range(len(LAYER_DIMS) - 1):
        limit = math.sqrt(1.0 / LAYER_DIMS[i])
        weights.append(rng.uniform(-limit, limit, size=(LAYER_DIMS[i], LAYER_DIMS[i + 1])))
        biases.append(np.zeros(LAYER_DIMS[i + 1]))
    return weights, biases


def split_by_episode(episode_ids: np.ndarray, val_fraction: float, rng: np.random.Generator):
    """Boolean (train_mask, val_mask) with whole episodes held out."""
    unique = np.unique(episode_ids)
    n_val = int(round(val_fraction * len(unique)))
    n_val = min(n_val, len(unique) - 1)
    order = rng.permutation(len(unique))
    val_episodes = set(unique[order[:n_val]].tolist())
    val_mask = np.isin(episode_ids, list(val_episodes)) if val_episodes else np.zeros(
        len(episode_ids), dtype=bool
    )
    return ~val_mask, val_mask


def train(dataset: Dataset, cfg: TrainConfig = TrainConfig()) -> MlpModel:
    """Train one surrogate on one policy's dataset; fully deterministic.

    Raises TrainingError for an empty dataset or a zero-variance feature
    (the offending feature is named).
    """
    if len(dataset) == 0:
        raise TrainingError("cannot train on an empty dataset")
    rng = np.random.default_rng(cfg.seed)

    train_mask, val_mask = split_by_episode(dataset.episode_ids, cfg.val_fraction, rng)
    x_train = dataset.features[train_mask]
    y_train = dataset.labels[train_mask]

    mean = x_train.mean(axis=0)
    std = x_train.std(axis=0)
    for i, s in enumerate(std):
        if s == 0.0:
            raise TrainingError(
                f"feature '{FEATURE_NAMES[i]}' has zero variance in the training split"
            )
    label_mean = float(y_train.mean())
    label_std = float(y_train.std())
    if label_std == 0.0:
        label_std = 1.0  # constant labels: degenerate but legal

    weights, biases = init_parameters(rng)
    model = MlpModel(
        weights=weights,
        biases=biases,
        feature_mean=mean,
        feature_std=std,
        label_mean=label_mean,
        label_std=label_std,
        policy=dataset.policy,
    )

    xn = (x_train - mean) / std
    yn = ((y_train - label_mean) / label_std).reshape(-1, 1)
    n = len(xn)
    batch = min(cfg.batch_size, n)
    workspaces: dict[int, _SgdWorkspace] = {}

    with threadpool_limits(limits=1, user_api="blas"):
        for _ in range(cfg.epochs):
            perm = rng.permutation(n)
            for start in range(0, n, batch):
                idx = perm[start : start + batch]
                ws = workspaces.get(len(idx))
                if ws is None:
                    ws = workspaces[len(idx)] = _SgdWorkspace(len(idx))
                ws.step(model, xn, yn, idx, cfg.learning_rate)

    def norm_mse(mask) -> float | None:
        if not np.any(mask):
            return None
        feats = (dataset.features[mask] - mean) / std
        labels = (dataset.labels[mask] - label_mean) / label_std
        preds = _forward_cache(model, feats)[-1][:, 0]
        return mse_loss(preds, labels)

    model.metadata = {
        "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate,
        "batch_size": cfg.batch_size,
        "seed": cfg.seed,
        "val_fraction": cfg.val_fraction,
        "optimizer": "sgd",
        "regularization": "none",
        "dataset_sha256": sha256_hex(dataset.to_bytes()),
        "dataset_seed": dataset.seed,
        "aircraft_sha256": dataset.aircraft_digest.hex(),
        "guidance_sha256": dataset.guidance_digest.hex(),
        "n_samples": len(dataset),
        "n_episodes": int(dataset.n_episodes),
        "n_train_samples": int(train_mask.sum()),
        "n_val_samples": int(val_mask.sum()),
        "final_train_mse": norm_mse(train_mask),
        "final_val_mse": norm_mse(val_mask),
        "feature_min": x_train.min(axis=0).tolist(),
        "feature_max": x_train.max(axis=0).tolist(),
    }
    return model


def save_model(model: MlpModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(model_to_bytes(model))


def model_to_bytes(model: MlpModel) -> bytes:
    parts = [
        struct.pack(
            "<4sIII", MODEL_MAGIC, MODEL_VERSION, int(model.policy), len(LAYER_DIMS)
        ),
        struct.pack(f"<{len(LAYER_DIMS)}I", *LAYER_DIMS),
        model.feature_mean.astype("<f8").tobytes(),
        model.feature_std.astype("<f8").tobytes(),
        struct.pack("<dd", model.label_mean, model.label_std),
    ]
    for w, b in zip(model.weights, model.biases):
        parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    blob = json.dumps(model.metadata, sort_keys=True, separators=(",", ":")).encode()
    parts.append(struct.pack("<Q", len(blob)))
    parts.append(blob)
    return b"".join(parts)


def load_model(path) -> MlpModel:
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())


def model_from_bytes(blob: bytes) -> MlpModel:
    view = memoryview(blob)
    off = 0

    def take(n: int) -> memoryview:
        nonlocal off
        if off + n > len(view):
            raise ModelFormatError("truncated model file")
        out = view[off : off + n]
        off += n
        return out

    magic, version, policy, n_dims = struct.unpack("<4sIII", take(16))
    if magic != MODEL_MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}; not a surrogate model file")
    if version != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {version}")
    if n_dims != len(LAYER_DIMS):
        raise ModelFormatError(f"expected {len(LAYER_DIMS)} layer dims, found {n_dims}")
    dims = struct.unpack(f"<{n_dims}I", take(4 * n_dims))
    if dims != LAYER_DIMS:
        raise ModelFormatError(f"layer dims {dims} do not match {LAYER_DIMS}")

    feature_mean = np.frombuffer(take(80), dtype="<f8").copy()
    feature_std = np.frombuffer(take(80), dtype="<f8").copy()
    label_mean, label_std = struct.unpack("<dd", take(16))
    weights, biases = [], []
    for i in range(len(LAYER_DIMS) - 1):
        din, dout = LAYER_DIMS[i], LAYER_DIMS[i + 1]
        weights.append(np.frombuffer(take(8 * din * dout), dtype="<f8").reshape(din, dout).copy())
        biases.append(np.frombuffer(take(8 * dout), dtype="<f8").copy())
    (md_len,) = struct.unpack("<Q", take(8))
    metadata = json.loads(bytes(take(md_len)).decode())
    if off != len(view):
        raise ModelFormatError(f"{len(view) - off} trailing bytes after the metadata block")
    return MlpModel(
        weights=weights,
        biases=biases,
        feature_mean=feature_mean,
        feature_std=feature_std,
        label_mean=label_mean,
        label_std=label_std,
        policy=PolicyId(policy),
        metadata=metadata,
    )


def write_manifest(paths: dict[PolicyId, str], manifest_path) -> None:
    lines = ["# surrogate model set: one model file per policy"]
    lines += [f"{p.name} = {paths[p]}" for p in PolicyId]
    with open(manifest_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model_set(manifest_path) -> dict[PolicyId, MlpModel]:
    """Read a manifest naming all eight per-policy model files and load them.

    Paths are resolved relative to the manifest's directory.
    """
    import os

    base = os.path.dirname(os.path.abspath(manifest_path))
    entries: dict[PolicyId, str] = {}
    with open(manifest_path, "r") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, _, rel = line.partition("=")
            policy = PolicyId[name.strip()]
            if policy in entries:
                raise ModelFormatError(f"duplicate manifest entry for {policy.name}")
            entries[policy] = rel.strip()
    missing = [p.name for p in PolicyId if p not in entries]
    if missing:
        raise ModelFormatError(f"manifest missing policies: {', '.join(missing)}")
    models = {}
    for policy, rel in entries.items():
        model = load_model(os.path.join(base, rel))
        if model.policy != policy:
            raise ModelFormatError(
                f"manifest lists {rel} under {policy.name} but the file is for {model.policy.name}"
            )
        models[policy] = model
    return models
