"""Independent reference computations used as test oracles.

Nothing here calls the dynamic programs or backward passes under test.
"""
import itertools
import math

import numpy as np


def enumerate_paths(T, k):
    return itertools.product(range(k), repeat=T)


def brute_path_score(emissions, transitions, path):
    k = emissions.shape[1]
    s = transitions[k, path[0]] + transitions[path[-1], k]
    for t, y in enumerate(path):
        s += emissions[t, y]
    for a, b in zip(path, path[1:]):
        s += transitions[a, b]
    return s


def brute_best(emissions, transitions):
    """Max score and the tie-broken optimal path.

    Lowest-index choices at each backpointer, taken from the last position
    backwards, select the optimal path whose reversal is lexicographically
    smallest.
    """
    T, k = emissions.shape
    scored = [(brute_path_score(emissions, transitions, p), p) for p in enumerate_paths(T, k)]
    best = max(s for s, _ in scored)
    winners = [p for s, p in scored if s == best]
    return best, list(min(winners, key=lambda p: p[::-1]))


def brute_log_partition(emissions, transitions):
    T, k = emissions.shape
    scores = [brute_path_score(emissions, transitions, p) for p in enumerate_paths(T, k)]
    m = max(scores)
    return m + math.log(sum(math.exp(s - m) for s in scores))


def brute_marginals(emissions, transitions):
    T, k = emissions.shape
    log_z = brute_log_partition(emissions, transitions)
    node = np.zeros((T, k))
    for p in enumerate_paths(T, k):
        w = math.exp(brute_path_score(emissions, transitions, p) - log_z)
        for t, y in enumerate(p):
            node[t, y] += w
    return node


def central_difference(f, array, h):
    """Numerical gradient of scalar ``f()`` w.r.t. every entry of ``array`` (in place)."""
    grad = np.zeros_like(array)
    for idx in np.ndindex(array.shape):
        orig = array[idx]
        array[idx] = orig + h
        plus = f()
        array[idx] = orig - h
        minus = f()
        array[idx] = orig
        grad[idx] = (plus - minus) / (2 * h)
    return grad


def relative_error(analytic, numeric, floor=1e-8):
    """Elementwise |a - n| / max(|a|, |n|, floor)."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    den = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / den


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def scalar_lstm_step(x, h, c, W, b):
    """Closed-form LSTM step for scalar input, state and gates (i, f, o, g)."""
    z = [x * W[0][j] + h * W[1][j] + b[j] for j in range(4)]
    i, f, o = sigmoid(z[0]), sigmoid(z[1]), sigmoid(z[2])
    g = math.tanh(z[3])
    c_new = f * c + i * g
    return o * math.tanh(c_new), c_new
