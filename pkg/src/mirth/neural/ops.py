"""Forward/backward primitives for the hand-written networks.

Everything is double precision and pure: forward functions return
(output, cache) and the matching backward consumes (cache, upstream
gradient).  Padding is handled with explicit masks so that encoder
outputs never depend on positions past the last real token.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

__all__ = [
    "embed_forward",
    "embed_backward",
    "affine_forward",
    "affine_backward",
    "relu_forward",
    "relu_backward",
    "conv1d_forward",
    "conv1d_backward",
    "masked_maxpool_forward",
    "masked_maxpool_backward",
    "lstm_forward",
    "lstm_backward",
    "softmax_cross_entropy",
]


# -- embedding lookup ---------------------------------------------------------

def embed_forward(ids: np.ndarray, matrix: np.ndarray, oov_vector: np.ndarray):
    """ids: (B, T) with -1 = padding, -2 = OOV, else row index."""
    B, T = ids.shape
    D = matrix.shape[1]
    x = np.zeros((B, T, D), dtype=np.float64)
    real = ids >= 0
    if real.any():
        x[real] = matrix[ids[real]]
    oov = ids == -2
    if oov.any():
        x[oov] = oov_vector
    mask = (ids != -1).astype(np.float64)
    return x, mask


def embed_backward(dx: np.ndarray, ids: np.ndarray, n_rows: int) -> np.ndarray:
    grad = np.zeros((n_rows, dx.shape[2]), dtype=np.float64)
    real = ids >= 0
    if real.any():
        np.add.at(grad, ids[real], dx[real])
    return grad


# -- dense layers -------------------------------------------------------------

def affine_forward(x: np.ndarray, W: np.ndarray, b: np.ndarray):
    return x @ W + b, (x, W)


def affine_backward(dout: np.ndarray, cache):
    x, W = cache
    return dout @ W.T, x.T @ dout, dout.sum(axis=0)


def relu_forward(x: np.ndarray):
    return np.maximum(x, 0.0), x


def relu_backward(dout: np.ndarray, cache):
    return dout * (cache > 0.0)


# -- 1-D convolution over time (same padding) ---------------------------------

def conv1d_forward(x: np.ndarray, W: np.ndarray, b: np.ndarray, kernel_size: int):
    """x: (B, T, D); W: (kernel_size * D, C); zero-padded to keep length T."""
    B, T, D = x.shape
    pad = kernel_size // 2
    xp = np.zeros((B, T + 2 * pad, D), dtype=np.float64)
    xp[:, pad : pad + T] = x
    cols = np.concatenate([xp[:, i : i + T] for i in range(kernel_size)], axis=2)
    out = cols @ W + b
    return out, (cols, W, (B, T, D), kernel_size)


def conv1d_backward(dout: np.ndarray, cache):
    cols, W, (B, T, D), kernel_size = cache
    pad = kernel_size // 2
    C = W.shape[1]
    dW = cols.reshape(-1, W.shape[0]).T @ dout.reshape(-1, C)
    db = dout.sum(axis=(0, 1))
    dcols = dout @ W.T
    dxp = np.zeros((B, T + 2 * pad, D), dtype=np.float64)
    for i in range(kernel_size):
        dxp[:, i : i + T] += dcols[:, :, i * D : (i + 1) * D]
    return dxp[:, pad : pad + T], dW, db


# -- masked global max pooling -------------------------------------------------

def masked_maxpool_forward(h: np.ndarray, mask: np.ndarray):
    """Max over time restricted to real tokens; all-padding rows pool to 0."""
    masked = np.where(mask[:, :, None] > 0, h, -np.inf)
    idx = np.argmax(masked, axis=1)  # first maximum: deterministic routing
    out = np.take_along_axis(masked, idx[:, None, :], axis=1)[:, 0, :]
    empty = mask.sum(axis=1) == 0
    if empty.any():
        out[empty] = 0.0
    return out, (idx, h.shape, empty)


def masked_maxpool_backward(dout: np.ndarray, cache):
    idx, shape, empty = cache
    dh = np.zeros(shape, dtype=np.float64)
    dout = dout.copy()
    if empty.any():
        dout[empty] = 0.0
    np.put_along_axis(dh, idx[:, None, :], dout[:, None, :], axis=1)
    return dh


# -- LSTM ----------------------------------------------------------------------

def lstm_forward(x: np.ndarray, mask: np.ndarray, Wx: np.ndarray, Wh: np.ndarray,
                 b: np.ndarray):
    """Single-layer LSTM; returns the hidden state at each row's last real token.

    Gate layout in the fused matrices is [input, forget, cell, output].
    Masked steps leave state untouched, so trailing padding cannot change
    the result and an all-padding row yields the zero initial state.
    """
    B, T, D = x.shape
    H = Wh.shape[0]
    h = np.zeros((B, H), dtype=np.float64)
    c = np.zeros((B, H), dtype=np.float64)
    steps = []
    for t in range(T):
        m = mask[:, t : t + 1]
        xt = x[:, t]
        z = xt @ Wx + h @ Wh + b
        i = expit(z[:, :H])
        f = expit(z[:, H : 2 * H])
        g = np.tanh(z[:, 2 * H : 3 * H])
        o = expit(z[:, 3 * H :])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        steps.append((xt, h, c, i, f, g, o, tc, m))
        h = m * h_new + (1.0 - m) * h
        c = m * c_new + (1.0 - m) * c
    return h, (steps, Wx, Wh, (B, T, D))


def lstm_backward(dh_last: np.ndarray, cache):
    steps, Wx, Wh, (B, T, D) = cache
    H = Wh.shape[0]
    dWx = np.zeros_like(Wx)
    dWh = np.zeros_like(Wh)
    db = np.zeros(4 * H, dtype=np.float64)
    dx = np.zeros((B, T, D), dtype=np.float64)
    dh = dh_last
    dc = np.zeros((B, H), dtype=np.float64)
    for t in range(T - 1, -1, -1):
        xt, h_prev, c_prev, i, f, g, o, tc, m = steps[t]
        dh_new = dh * m
        dh_old = dh * (1.0 - m)
        dc_total = dc * m + dh_new * o * (1.0 - tc * tc)
        dc_old = dc * (1.0 - m)
        do = dh_new * tc
        di = dc_total * g
        df = dc_total * c_prev
        dg = dc_total * i
        dz = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g * g),
                do * o * (1.0 - o),
            ],
            axis=1,
        )
        dWx += xt.T @ dz
        dWh += h_prev.T @ dz
        db += dz.sum(axis=0)
        dx[:, t] = dz @ Wx.T
        dh = dz @ Wh.T + dh_old
        dc = dc_total * f + dc_old
    return dx, dWx, dWh, db


# -- loss ------------------------------------------------------------------------

def softmax_cross_entropy(logits: np.ndarray, y: np.ndarray):
    """Mean cross-entropy; returns (loss, dlogits, probabilities)."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_p = shifted - log_z
    n = logits.shape[0]
    loss = -log_p[np.arange(n), y].mean()
    probs = np.exp(log_p)
    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    return loss, dlogits, probs
