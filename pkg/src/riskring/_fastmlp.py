"""Compiled single-vector MLP inference (numba).

The risk ring's exactness contracts pin every prediction to one code path:
`_kernel_one` is that path.  `_kernel_rows` evaluates many feature rows in
parallel by calling the same compiled `_kernel_one` per row, so its values
are bitwise-identical to the single-vector ones; only the throughput
changes.  Weights are passed transposed (dout, din) so the inner dot runs
over contiguous memory.

Imported lazily: training and data collection never pay the JIT cost.
"""

import math

import numba
import numpy as np
from numba import njit, prange

numba.config.THREADING_LAYER = "workqueue"  # always available, no TBB-version noise


@njit(cache=True, fastmath=True)
def _kernel_one(x, mean, std, wt0, b0, wt1, b1, wt2, b2, wt3, b3, wt4, b4, lmean, lstd):
    a = (x - mean) / std
    h0 = np.empty(wt0.shape[0])
    for j in range(wt0.shape[0]):
        s = b0[j]
        row = wt0[j]
        for i in range(a.shape[0]):
            s += a[i] * row[i]
        h0[j] = math.tanh(s)
    h1 = np.empty(wt1.shape[0])
    for j in range(wt1.shape[0]):
        s = b1[j]
        row = wt1[j]
        for i in range(h0.shape[0]):
            s += h0[i] * row[i]
        h1[j] = math.tanh(s)
    h2 = np.empty(wt2.shape[0])
    for j in range(wt2.shape[0]):
        s = b2[j]
        row = wt2[j]
        for i in range(h1.shape[0]):
            s += h1[i] * row[i]
        h2[j] = math.tanh(s)
    h3 = np.empty(wt3.shape[0])
    for j in range(wt3.shape[0]):
        s = b3[j]
        row = wt3[j]
        for i in range(h2.shape[0]):
            s += h2[i] * row[i]
        h3[j] = math.tanh(s)
    s = b4[0]
    row = wt4[0]
    for i in range(h3.shape[0]):
        s += h3[i] * row[i]
    y = s * lstd + lmean
    return y if y > 0.0 else 0.0


@njit(cache=True, parallel=True)
def _kernel_rows(xs, mean, std, wt0, b0, wt1, b1, wt2, b2, wt3, b3, wt4, b4, lmean, lstd, out):
    for r in prange(xs.shape[0]):
        out[r] = _kernel_one(
            xs[r], mean, std, wt0, b0, wt1, b1, wt2, b2, wt3, b3, wt4, b4, lmean, lstd
        )


def kernel_args(model):
    """Transposed-weight argument tuple for the kernels, cached on the model."""
    cached = getattr(model, "_kernel_cache", None)
    if cached is None:
        wts = [np.ascontiguousarray(w.T) for w in model.weights]
        bs = [np.ascontiguousarray(b) for b in model.biases]
        cached = (
            np.ascontiguousarray(model.feature_mean),
            np.ascontiguousarray(model.feature_std),
            wts[0], bs[0], wts[1], bs[1], wts[2], bs[2], wts[3], bs[3], wts[4], bs[4],
            model.label_mean,
            model.label_std,
        )
        model._kernel_cache = cached
    return cached


def predict_one_compiled(model, x: np.ndarray) -> float:
    # contiguity pins one compiled signature, hence one rounding behavior
    return _kernel_one(np.ascontiguousarray(x), *kernel_args(model))


def predict_rows_compiled(model, xs: np.ndarray) -> np.ndarray:
    out = np.empty(xs.shape[0])
    _kernel_rows(np.ascontiguousarray(xs), *kernel_args(model), out)
    return out
