"""Exact inference on a first-order linear chain.

Scores come as an emission matrix ``[T, K]`` and a transition matrix
``[K + 1, K + 1]`` whose last row holds start (BOS -> tag) scores and whose
last column holds stop (tag -> EOS) scores.  The corner entry is unused.
"""
from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ..errors import ContractError, NumericError


def _check(emissions, transitions):
    emissions = np.asarray(emissions, dtype=np.float64)
    transitions = np.asarray(transitions, dtype=np.float64)
    if emissions.ndim != 2 or emissions.shape[0] == 0:
        raise ValueError("emissions must be a non-empty [T, K] matrix")
    k = emissions.shape[1]
    if transitions.shape != (k + 1, k + 1):
        raise ContractError(f"transitions must be {(k + 1, k + 1)}, got {transitions.shape}")
    if np.isnan(emissions).any() or np.isnan(transitions).any():
        raise NumericError("NaN in chain scores")
    return emissions, transitions


def path_score(emissions, transitions, path) -> float:
    """Total score of one tag path, summed left to right."""
    emissions, transitions = _check(emissions, transitions)
    k = emissions.shape[1]
    score = transitions[k, path[0]]
    for t, y in enumerate(path):
        score += emissions[t, y]
        if t > 0:
            score += transitions[path[t - 1], y]
    return float(score + transitions[path[-1], k])


def viterbi(emissions, transitions) -> list[int]:
    """Highest-scoring path; ties go to the lowest tag index."""
    emissions, transitions = _check(emissions, transitions)
    T, k = emissions.shape
    inner = transitions[:k, :k]
    delta = transitions[k, :k] + emissions[0]
    back = np.zeros((T, k), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + inner
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(k)] + emissions[t]
    delta = delta + transitions[:k, k]
    best = int(np.argmax(delta))
    path = [best]
    for t in range(T - 1, 0, -1):
        best = int(back[t, best])
        path.append(best)
    path.reverse()
    return path


def _alphas(emissions, transitions):
    T, k = emissions.shape
    inner = transitions[:k, :k]
    alpha = np.empty((T, k))
    alpha[0] = transitions[k, :k] + emissions[0]
    for t in range(1, T):
        alpha[t] = logsumexp(alpha[t - 1][:, None] + inner, axis=0) + emissions[t]
    return alpha


def _betas(emissions, transitions):
    T, k = emissions.shape
    inner = transitions[:k, :k]
    beta = np.empty((T, k))
    beta[T - 1] = transitions[:k, k]
    for t in range(T - 2, -1, -1):
        beta[t] = logsumexp(inner + (emissions[t + 1] + beta[t + 1])[None, :], axis=1)
    return beta


def forward_log_partition(emissions, transitions) -> float:
    """log of the sum over all paths of exp(path score)."""
    emissions, transitions = _check(emissions, transitions)
    k = emissions.shape[1]
    alpha = _alphas(emissions, transitions)
    return float(logsumexp(alpha[-1] + transitions[:k, k]))


def forward_backward(emissions, transitions):
    """Posterior marginals.

    Returns ``(log_z, node, pair)`` where ``node[t, y]`` is P(y_t = y) and
    ``pair[t, a, b]`` is P(y_t = a, y_{t+1} = b).
    """
    emissions, transitions = _check(emissions, transitions)
    T, k = emissions.shape
    alpha = _alphas(emissions, transitions)
    beta = _betas(emissions, transitions)
    log_z = float(logsumexp(alpha[-1] + transitions[:k, k]))
    node = np.exp(alpha + beta - log_z)
    if T > 1:
        pair = np.exp(alpha[:-1, :, None] + transitions[None, :k, :k]
                      + (emissions[1:] + beta[1:])[:, None, :] - log_z)
    else:
        pair = np.zeros((0, k, k))
    return log_z, node, pair
