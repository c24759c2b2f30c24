"""Masked recurrent layers with explicit backward passes.

All layers take a padded batch ``x`` of shape ``[N, T, D]`` and a 0/1 mask
``[N, T]``.  At a padded step the state is carried through unchanged, so a
forward layer's last column holds each row's final state and a reversed
layer starts from zeros at each row's last real step.

LSTM gates are packed in the order input, forget, output, candidate in a
single ``W`` of shape ``[D + H, 4H]`` acting on ``[x_t; h_{t-1}]``.
"""
from __future__ import annotations

import numpy as np


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def softmax(z, axis=-1):
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def lstm_step(x, h, c, W, b):
    """One unmasked LSTM step; returns ``(h_new, c_new, gates)``."""
    H = h.shape[-1]
    z = np.concatenate([x, h], axis=-1) @ W + b
    i = sigmoid(z[..., :H])
    f = sigmoid(z[..., H:2 * H])
    o = sigmoid(z[..., 2 * H:3 * H])
    g = np.tanh(z[..., 3 * H:])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new, (i, f, o, g)


def _steps(T, reverse):
    return range(T - 1, -1, -1) if reverse else range(T)


def lstm_forward(x, mask, W, b, reverse=False):
    N, T, _ = x.shape
    H = b.shape[0] // 4
    h = np.zeros((N, H), dtype=x.dtype)
    c = np.zeros((N, H), dtype=x.dtype)
    hs = np.zeros((N, T, H), dtype=x.dtype)
    cache = []
    for t in _steps(T, reverse):
        h_new, c_new, gates = lstm_step(x[:, t], h, c, W, b)
        m = mask[:, t, None]
        cache.append((t, h, c, c_new, gates))
        h = m * h_new + (1.0 - m) * h
        c = m * c_new + (1.0 - m) * c
        hs[:, t] = h
    return hs, (x, mask, W, cache)


def lstm_backward(dhs, state):
    """Gradients ``(dx, dW, db)`` given upstream ``dhs`` of shape ``[N, T, H]``."""
    x, mask, W, cache = state
    D = x.shape[2]
    H = W.shape[1] // 4
    dx = np.zeros_like(x)
    dW = np.zeros_like(W)
    db = np.zeros(W.shape[1], dtype=W.dtype)
    dh_next = np.zeros((x.shape[0], H), dtype=x.dtype)
    dc_next = np.zeros_like(dh_next)
    for t, h_prev, c_prev, c_new, (i, f, o, g) in reversed(cache):
        m = mask[:, t, None]
        dh = dhs[:, t] + dh_next
        tc = np.tanh(c_new)
        dh_new = m * dh
        dc_new = m * dc_next + dh_new * o * (1.0 - tc * tc)
        dz = np.concatenate([
            dc_new * g * i * (1.0 - i),
            dc_new * c_prev * f * (1.0 - f),
            dh_new * tc * o * (1.0 - o),
            dc_new * i * (1.0 - g * g),
        ], axis=1)
        xh = np.concatenate([x[:, t], h_prev], axis=1)
        dW += xh.T @ dz
        db += dz.sum(axis=0)
        dxh = dz @ W.T
        dx[:, t] = dxh[:, :D]
        dh_next = dxh[:, D:] + (1.0 - m) * dh
        dc_next = dc_new * f + (1.0 - m) * dc_next
    return dx, dW, db


def rnn_forward(x, mask, W, b, reverse=False):
    """Elman layer ``h_t = tanh([x_t; h_{t-1}] W + b)``."""
    N, T, _ = x.shape
    H = b.shape[0]
    h = np.zeros((N, H), dtype=x.dtype)
    hs = np.zeros((N, T, H), dtype=x.dtype)
    cache = []
    for t in _steps(T, reverse):
        h_new = np.tanh(np.concatenate([x[:, t], h], axis=1) @ W + b)
        m = mask[:, t, None]
        cache.append((t, h, h_new))
        h = m * h_new + (1.0 - m) * h
        hs[:, t] = h
    return hs, (x, mask, W, cache)


def rnn_backward(dhs, state):
    x, mask, W, cache = state
    D = x.shape[2]
    dx = np.zeros_like(x)
    dW = np.zeros_like(W)
    db = np.zeros(W.shape[1], dtype=W.dtype)
    dh_next = np.zeros((x.shape[0], W.shape[1]), dtype=x.dtype)
    for t, h_prev, h_new in reversed(cache):
        m = mask[:, t, None]
        dh = dhs[:, t] + dh_next
        dz = m * dh * (1.0 - h_new * h_new)
        xh = np.concatenate([x[:, t], h_prev], axis=1)
        dW += xh.T @ dz
        db += dz.sum(axis=0)
        dxh = dz @ W.T
        dx[:, t] = dxh[:, :D]
        dh_next = dxh[:, D:] + (1.0 - m) * dh
    return dx, dW, db
