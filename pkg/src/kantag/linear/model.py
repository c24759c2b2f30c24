"""Model containers, decoding entry point and the text model-file format."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..corpus import Sentence, TagSet
from ..errors import ContractError, ParseError
from ..features import (BOS, FeatureDictionary, FeatureTemplateConfig, parse_key_values,
                        vectorize)
from .chain import viterbi

FORMAT_VERSION = 1
CHAIN_KINDS = ("crf", "perceptron")
HISTORY_KINDS = ("svm",)
BIAS_FEATURE = "bias"


@dataclass
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.1
    l2: float = 1e-5
    seed: int = 0
    shuffle: bool = True
    batch_size: int = 8
    full_batch: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(eq=False)
class LinearChainModel:
    """Emission weights ``[n_features, n_tags]`` plus chain transitions.

    ``transition_weights`` is ``[n_tags + 1, n_tags + 1]``: the extra row is
    BOS -> tag and the extra column is tag -> EOS.
    """

    kind: str
    emission_weights: np.ndarray
    transition_weights: np.ndarray
    tagset: TagSet
    dictionary: FeatureDictionary
    config: FeatureTemplateConfig
    history: list = field(default_factory=list)

    def __post_init__(self):
        k = len(self.tagset)
        if self.emission_weights.shape != (len(self.dictionary), k):
            raise ContractError(
                f"emission_weights shape {self.emission_weights.shape} does not match "
                f"dictionary/tagset ({len(self.dictionary)}, {k})")
        if self.transition_weights.shape != (k + 1, k + 1):
            raise ContractError(f"transition_weights must be {(k + 1, k + 1)}")

    @property
    def n_tags(self):
        return len(self.tagset)

    def freeze(self):
        self.emission_weights.setflags(write=False)
        self.transition_weights.setflags(write=False)
        return self

    def emissions(self, words) -> np.ndarray:
        return emission_scores(self.emission_weights, vectorize(words, self.config, self.dictionary))


@dataclass(eq=False)
class HistoryClassifierModel:
    """One weight column per tag over static, bias and ``prev1=``/``prev2=`` features."""

    kind: str
    weights: np.ndarray
    tagset: TagSet
    dictionary: FeatureDictionary
    config: FeatureTemplateConfig
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.weights.shape != (len(self.dictionary), len(self.tagset)):
            raise ContractError(
                f"weights shape {self.weights.shape} does not match dictionary/tagset")
        if self.config.window != 2:
            raise ContractError("history classifier requires window = 2")

    @property
    def n_tags(self):
        return len(self.tagset)

    def freeze(self):
        self.weights.setflags(write=False)
        return self

    def history_ids(self, prev1: str, prev2: str) -> list[int]:
        d = self.dictionary
        ids = [d.get(BIAS_FEATURE), d.get(f"prev1={prev1}"), d.get(f"prev2={prev2}")]
        return [i for i in ids if i is not None]


def history_feature_names(tagset: TagSet) -> list[str]:
    labels = [BOS, *tagset.labels]
    return [BIAS_FEATURE] + [f"prev1={t}" for t in labels] + [f"prev2={t}" for t in labels]


def emission_scores(weights: np.ndarray, vectors) -> np.ndarray:
    out = np.zeros((len(vectors), weights.shape[1]))
    for t, ids in enumerate(vectors):
        if len(ids):
            out[t] = weights[ids].sum(axis=0)
    return out


def _forms(sentence):
    if isinstance(sentence, Sentence):
        return sentence.forms
    return list(sentence)


def tag_indices(model, sentence) -> list[int]:
    words = _forms(sentence)
    if not words:
        raise ValueError("cannot tag an empty sentence")
    if isinstance(model, LinearChainModel):
        return viterbi(model.emissions(words), model.transition_weights)
    if isinstance(model, HistoryClassifierModel):
        return greedy_decode(model, words)
    raise TypeError(f"not a linear model: {type(model).__name__}")


def tag_sentence(model, sentence) -> list[str]:
    labels = model.tagset.labels
    return [labels[i] for i in tag_indices(model, sentence)]


def greedy_decode(model: HistoryClassifierModel, words) -> list[int]:
    labels = model.tagset.labels
    static = vectorize(words, model.config, model.dictionary)
    prev1 = prev2 = BOS
    out = []
    for ids in static:
        hist = model.history_ids(prev1, prev2)
        scores = model.weights[ids].sum(axis=0) + model.weights[hist].sum(axis=0)
        y = int(np.argmax(scores))
        out.append(y)
        prev2, prev1 = prev1, labels[y]
    return out


# -- model files -----------------------------------------------------------------

def _w(x: float) -> str:
    return format(float(x), ".17g")


def dumps_model(model) -> str:
    lines = [f"#version {FORMAT_VERSION}", f"model\t{model.kind}"]
    for kv in model.config.to_text().splitlines():
        lines.append(f"config\t{kv}")
    lines += [f"tag\t{i}\t{t}" for i, t in enumerate(model.tagset.labels)]
    lines += [f"feature\t{i}\t{name}" for i, name in enumerate(model.dictionary)]
    weights = model.emission_weights if isinstance(model, LinearChainModel) else model.weights
    rows, cols = np.nonzero(weights)
    lines += [f"{r}\t{c}\t{_w(weights[r, c])}" for r, c in zip(rows.tolist(), cols.tolist())]
    if isinstance(model, LinearChainModel):
        tr = model.transition_weights
        rows, cols = np.nonzero(tr)
        lines += [f"trans\t{r}\t{c}\t{_w(tr[r, c])}" for r, c in zip(rows.tolist(), cols.tolist())]
    return "\n".join(lines) + "\n"


def loads_model(text: str):
    lines = text.split("\n")
    if not lines or lines[0].strip() != f"#version {FORMAT_VERSION}":
        raise ParseError("missing '#version 1' header", 1)
    kind = None
    config_lines, tags, feats, weights, trans = [], [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        head, _, rest = line.partition("\t")
        try:
            if head == "model":
                kind = rest
            elif head == "config":
                config_lines.append(rest)
            elif head == "tag":
                idx, label = rest.split("\t", 1)
                tags.append((int(idx), label))
            elif head == "feature":
                idx, name = rest.split("\t", 1)
                feats.append((int(idx), name))
            elif head == "trans":
                a, b, w = rest.split("\t")
                trans.append((int(a), int(b), float(w)))
            else:
                b, w = rest.split("\t")
                weights.append((int(head), int(b), float(w)))
        except ValueError as exc:
            raise ParseError(f"malformed model line: {exc}", lineno) from None
    if kind not in CHAIN_KINDS + HISTORY_KINDS:
        raise ContractError(f"model: unknown model kind {kind!r}")
    try:
        config = FeatureTemplateConfig.from_mapping(parse_key_values("\n".join(config_lines)))
    except ValueError as exc:
        raise ContractError(f"config: {exc}") from None
    for field_name, items in (("tag", tags), ("feature", feats)):
        if [i for i, _ in items] != list(range(len(items))):
            raise ContractError(f"{field_name}: ids must be dense and ordered")
    tagset = TagSet(label for _, label in tags)
    dictionary = FeatureDictionary(name for _, name in feats).freeze()
    n_f, k = len(dictionary), len(tagset)
    w = np.zeros((n_f, k))
    for r, c, v in weights:
        if not (0 <= r < n_f):
            raise ContractError(f"feature_id {r} outside the dictionary (size {n_f})")
        if not (0 <= c < k):
            raise ContractError(f"tag_id {c} outside the tagset (size {k})")
        w[r, c] = v
    if kind in HISTORY_KINDS:
        if trans:
            raise ContractError("trans: transition weights are not valid for an svm model")
        if config.window != 2:
            raise ContractError(f"window: svm models require window 2, found {config.window}")
        return HistoryClassifierModel(kind, w, tagset, dictionary, config).freeze()
    tr = np.zeros((k + 1, k + 1))
    for a, b, v in trans:
        if not (0 <= a <= k and 0 <= b <= k):
            raise ContractError(f"trans: index ({a}, {b}) outside {(k + 1, k + 1)}")
        tr[a, b] = v
    return LinearChainModel(kind, w, tr, tagset, dictionary, config).freeze()
