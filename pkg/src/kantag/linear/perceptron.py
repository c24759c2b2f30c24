"""Averaged structured perceptron over the CRF feature set."""
from __future__ import annotations

import logging

import numpy as np

from ..corpus import Dataset
from ..features import DEFAULT_CONFIG, FeatureTemplateConfig, build_dictionary
from .chain import viterbi
from .crf import check_trainable, prepare_instances
from .model import LinearChainModel, TrainConfig, emission_scores

log = logging.getLogger(__name__)


def perceptron_update(W, Tr, vectors, gold, pred, step: float = 1.0) -> bool:
    """Add ``step`` x (gold path counts - predicted path counts) in place.

    Returns False, leaving the weights untouched, when the paths agree.
    """
    gold = np.asarray(gold)
    pred = np.asarray(pred)
    if np.array_equal(gold, pred):
        return False
    k = W.shape[1]
    for t, ids in enumerate(vectors):
        if gold[t] != pred[t] and len(ids):
            W[ids, gold[t]] += step
            W[ids, pred[t]] -= step
    for path, sign in ((gold, step), (pred, -step)):
        Tr[k, path[0]] += sign
        np.add.at(Tr, (path[:-1], path[1:]), sign)
        Tr[path[-1], k] += sign
    return True


def train_structured_perceptron(train: Dataset, config: FeatureTemplateConfig = DEFAULT_CONFIG,
                                tc: TrainConfig | None = None) -> LinearChainModel:
    """Collins perceptron with weight averaging over every sentence visit.

    Only ``epochs``, ``seed`` and ``shuffle`` from ``tc`` are used.
    ``model.history`` records the number of mistaken sentences per epoch.
    """
    tc = tc or TrainConfig(epochs=10)
    check_trainable(train)
    tagset = train.tagset
    dictionary = build_dictionary(train, config)
    instances = prepare_instances(train.sentences, config, dictionary, tagset)
    n, k = len(instances), len(tagset)
    W = np.zeros((len(dictionary), k))
    Tr = np.zeros((k + 1, k + 1))
    # averaging trick: avg = w - u / c, with u accumulating c * delta
    uW = np.zeros_like(W)
    uT = np.zeros_like(Tr)
    c = 1
    rng = np.random.default_rng(tc.seed)
    history = []
    for epoch in range(tc.epochs):
        order = rng.permutation(n) if tc.shuffle else np.arange(n)
        mistakes = 0
        for i in order:
            vectors, gold = instances[i]
            pred = viterbi(emission_scores(W, vectors), Tr)
            if perceptron_update(W, Tr, vectors, gold, pred, 1.0):
                perceptron_update(uW, uT, vectors, gold, pred, float(c))
                mistakes += 1
            c += 1
        history.append(mistakes)
        log.info("perceptron epoch %d mistakes %d", epoch + 1, mistakes)
    avg_W = W - uW / c
    avg_T = Tr - uT / c
    return LinearChainModel("perceptron", avg_W, avg_T, tagset, dictionary, config,
                            history).freeze()
