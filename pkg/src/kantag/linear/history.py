"""One-vs-rest linear hinge-loss tagger with predicted-tag history.

Each token is classified independently from the static features of a
five-word window plus ``prev1=``/``prev2=`` features naming the two previous
tags.  Training feeds gold history (teacher forcing); decoding runs greedily
left to right on its own predictions.
"""
from __future__ import annotations

import logging

import numpy as np

from ..corpus import Dataset
from ..features import BOS, DEFAULT_CONFIG, FeatureTemplateConfig, build_dictionary, vectorize
from .crf import check_trainable
from .model import BIAS_FEATURE, HistoryClassifierModel, TrainConfig, history_feature_names

log = logging.getLogger(__name__)

_RESCALE_BELOW = 1e-9


def hinge_subgradient(scores, gold: int) -> np.ndarray:
    """Subgradient of ``sum_k max(0, 1 - y_k * s_k)`` w.r.t. the scores.

    ``y_k`` is +1 for the gold class and -1 for every other class.
    """
    scores = np.asarray(scores, dtype=np.float64)
    y = -np.ones_like(scores)
    y[gold] = 1.0
    return np.where(y * scores < 1.0, -y, 0.0)


def hinge_loss(scores, gold: int) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    y = -np.ones_like(scores)
    y[gold] = 1.0
    return float(np.maximum(0.0, 1.0 - y * scores).sum())


def token_examples(sentences, config, dictionary, tagset):
    """Token-level training examples ``(feature ids, gold index)`` with gold history."""
    out = []
    for s in sentences:
        static = vectorize(s.forms, config, dictionary)
        prev1 = prev2 = BOS
        for ids, tag in zip(static, s.gold_tags):
            hist = [dictionary.get(n) for n in (BIAS_FEATURE, f"prev1={prev1}", f"prev2={prev2}")]
            ids = np.concatenate([ids, np.array([h for h in hist if h is not None],
                                                dtype=np.int64)])
            out.append((ids, tagset.index(tag)))
            prev2, prev1 = prev1, tag
    return out


def train_history_classifier(train: Dataset, config: FeatureTemplateConfig = DEFAULT_CONFIG,
                             tc: TrainConfig | None = None) -> HistoryClassifierModel:
    """Stochastic subgradient descent on the L2-regularised one-vs-rest hinge loss.

    Per-example objective is ``l2/2 |w|^2 + hinge``; epoch ``e`` (from 0)
    uses step size ``learning_rate / (1 + e)``.  The window radius is forced
    to 2.  ``model.history`` holds the summed hinge loss per epoch.
    """
    tc = tc or TrainConfig(epochs=10, learning_rate=0.1, l2=1e-5)
    check_trainable(train)
    config = config.replace(window=2)
    tagset = train.tagset
    dictionary = build_dictionary(train, config, extra=history_feature_names(tagset))
    examples = token_examples(train.sentences, config, dictionary, tagset)
    n = len(examples)
    # weights are scale * V so the L2 shrink is O(1) per step
    V = np.zeros((len(dictionary), len(tagset)))
    scale = 1.0
    rng = np.random.default_rng(tc.seed)
    history = []
    for epoch in range(tc.epochs):
        eta = tc.learning_rate / (1.0 + epoch)
        order = rng.permutation(n) if tc.shuffle else np.arange(n)
        total = 0.0
        for i in order:
            ids, gold = examples[i]
            scores = scale * V[ids].sum(axis=0)
            total += hinge_loss(scores, gold)
            g = hinge_subgradient(scores, gold)
            if tc.l2:
                shrink = 1.0 - eta * tc.l2
                if shrink <= 0.0:
                    V[:] = 0.0
                    scale = 1.0
                else:
                    scale *= shrink
            if g.any():
                V[ids] -= (eta / scale) * g
            if scale < _RESCALE_BELOW:
                V *= scale
                scale = 1.0
        history.append(total)
        log.info("svm epoch %d hinge %.4f", epoch + 1, total)
    model = HistoryClassifierModel("svm", V * scale, tagset, dictionary, config, history)
    return model.freeze()
