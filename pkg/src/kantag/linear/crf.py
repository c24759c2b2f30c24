"""Linear-chain CRF: negative log-likelihood, its gradient, and Adagrad training."""
from __future__ import annotations

import logging

import numpy as np

from ..corpus import Dataset, Sentence
from ..errors import ContractError
from ..features import DEFAULT_CONFIG, FeatureTemplateConfig, build_dictionary, vectorize
from .chain import forward_backward
from .model import LinearChainModel, TrainConfig, emission_scores

log = logging.getLogger(__name__)

ADAGRAD_EPS = 1e-8


def check_trainable(train: Dataset):
    if len(train.sentences) == 0:
        raise ValueError("training set is empty")
    if not train.is_gold_tagged():
        raise ValueError("training set has tokens without gold tags")


def prepare_instances(sentences, config, dictionary, tagset):
    """Vectorize sentences once: list of (per-token id arrays, gold index array)."""
    out = []
    for s in sentences:
        gold = np.array([tagset.index(t) for t in s.gold_tags], dtype=np.int64)
        out.append((vectorize(s.forms, config, dictionary), gold))
    return out


def _flatten(vectors):
    rows = np.concatenate(vectors) if vectors else np.zeros(0, dtype=np.int64)
    tok = np.repeat(np.arange(len(vectors)), [len(v) for v in vectors])
    return rows.astype(np.int64), tok


def nll_and_gradient(W, Tr, instances, l2: float = 0.0):
    """Objective ``sum(log Z - gold score) + l2/2 * |w|^2`` and its gradient.

    Returns ``(loss, grad_emission, grad_transition)``.
    """
    k = W.shape[1]
    gW = np.zeros_like(W)
    gT = np.zeros_like(Tr)
    loss = 0.0
    for vectors, gold in instances:
        em = emission_scores(W, vectors)
        log_z, node, pair = forward_backward(em, Tr)
        gold_score = (em[np.arange(len(gold)), gold].sum() + Tr[k, gold[0]]
                      + Tr[gold[:-1], gold[1:]].sum() + Tr[gold[-1], k])
        loss += log_z - gold_score
        rows, tok = _flatten(vectors)
        if len(rows):
            np.add.at(gW, rows, node[tok])
            np.add.at(gW, (rows, gold[tok]), -1.0)
        gT[:k, :k] += pair.sum(axis=0)
        gT[k, :k] += node[0]
        gT[:k, k] += node[-1]
        np.add.at(gT, (gold[:-1], gold[1:]), -1.0)
        gT[k, gold[0]] -= 1.0
        gT[gold[-1], k] -= 1.0
    if l2:
        loss += 0.5 * l2 * (np.sum(W * W) + np.sum(Tr * Tr))
        gW += l2 * W
        gT += l2 * Tr
    return float(loss), gW, gT


def crf_loss_and_gradient(model: LinearChainModel, batch, l2: float = 0.0):
    """Loss and gradient for ``batch``, a list of ``(sentence, gold tags)``.

    Gold tags may be labels or indices; sentences may be
    :class:`~kantag.corpus.Sentence` objects or lists of forms.
    """
    instances = []
    for sentence, gold in batch:
        words = sentence.forms if isinstance(sentence, Sentence) else list(sentence)
        if len(gold) != len(words):
            raise ContractError("gold tag sequence length differs from sentence length")
        idx = [g if isinstance(g, (int, np.integer)) else model.tagset.index(g) for g in gold]
        if any(not 0 <= i < model.n_tags for i in idx):
            raise ContractError("gold tag index outside the tagset")
        instances.append((vectorize(words, model.config, model.dictionary),
                          np.asarray(idx, dtype=np.int64)))
    return nll_and_gradient(model.emission_weights, model.transition_weights, instances, l2)


def train_crf(train: Dataset, config: FeatureTemplateConfig = DEFAULT_CONFIG,
              tc: TrainConfig | None = None) -> LinearChainModel:
    """Fit a CRF with mini-batch Adagrad.

    Each mini-batch gets the regulariser scaled by ``len(batch) / N`` so an
    epoch sees the full ``l2`` penalty once.  ``model.history`` holds the
    summed objective of each epoch (for full-batch runs: the objective at the
    start of that epoch).
    """
    tc = tc or TrainConfig()
    check_trainable(train)
    tagset = train.tagset
    dictionary = build_dictionary(train, config)
    instances = prepare_instances(train.sentences, config, dictionary, tagset)
    n, k = len(instances), len(tagset)
    W = np.zeros((len(dictionary), k))
    Tr = np.zeros((k + 1, k + 1))
    GW = np.zeros_like(W)
    GT = np.zeros_like(Tr)
    rng = np.random.default_rng(tc.seed)
    batch_size = n if tc.full_batch else tc.batch_size
    history = []
    for epoch in range(tc.epochs):
        order = rng.permutation(n) if tc.shuffle else np.arange(n)
        total = 0.0
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            loss, gW, gT = nll_and_gradient(W, Tr, [instances[i] for i in idx],
                                            tc.l2 * len(idx) / n)
            total += loss
            GW += gW * gW
            GT += gT * gT
            W -= tc.learning_rate * gW / (np.sqrt(GW) + ADAGRAD_EPS)
            Tr -= tc.learning_rate * gT / (np.sqrt(GT) + ADAGRAD_EPS)
        history.append(total)
        log.info("crf epoch %d objective %.6f", epoch + 1, total)
    model = LinearChainModel("crf", W, Tr, tagset, dictionary, config, history)
    return model.freeze()
