"""Sparse binary feature templates for the linear taggers.

Every token yields its word identity, code-point prefixes and suffixes, and a
coarse length flag.  Neighbours inside the context window contribute the same
atomic features under an ``[offset]`` prefix, and optional word bigrams and
trigrams are drawn from the window.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError

BOS = "<BOS>"
EOS = "<EOS>"


@dataclass(frozen=True)
class FeatureTemplateConfig:
    prefix_max_len: int = 3
    suffix_max_len: int = 4
    length_threshold: int = 3
    window: int = 1
    use_bigrams: bool = False
    use_trigrams: bool = False

    def __post_init__(self):
        if self.prefix_max_len < 0 or self.suffix_max_len < 0:
            raise ValueError("affix lengths must be non-negative")
        if self.window not in (0, 1, 2):
            raise ValueError(f"window must be 0, 1 or 2, got {self.window}")

    def replace(self, **changes) -> "FeatureTemplateConfig":
        return replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{k} = {_fmt(v)}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "FeatureTemplateConfig":
        return cls.from_mapping(parse_key_values(text))

    @classmethod
    def from_mapping(cls, values) -> "FeatureTemplateConfig":
        kinds = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in kinds:
                raise ValueError(f"unknown feature config key {key!r}")
            kwargs[key] = parse_bool(raw) if kinds[key] in (bool, "bool") else int(raw)
        return cls(**kwargs)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def parse_bool(raw) -> bool:
    if isinstance(raw, bool):
        return raw
    value = str(raw).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError("empty key", lineno)
        out[key] = value
    return out


DEFAULT_CONFIG = FeatureTemplateConfig()


def token_atomic_features(form: str, config: FeatureTemplateConfig = DEFAULT_CONFIG) -> list[str]:
    if not form:
        raise ValueError("cannot extract features from an empty form")
    n = len(form)
    feats = [f"w={form}"]
    feats += [f"p{k}={form[:k]}" for k in range(1, min(config.prefix_max_len, n) + 1)]
    feats += [f"s{k}={form[-k:]}" for k in range(1, min(config.suffix_max_len, n) + 1)]
    feats.append("len=MORE" if n > config.length_threshold else "len=LESS")
    return feats


def _word_at(words: Sequence[str], j: int) -> str:
    if j < 0:
        return BOS
    if j >= len(words):
        return EOS
    return words[j]


def _offset(o: int) -> str:
    return f"[{o:+d}]"


def extract_token_features(words: Sequence[str], i: int,
                           config: FeatureTemplateConfig = DEFAULT_CONFIG) -> list[str]:
    """Feature strings for position ``i`` of the word sequence ``words``.

    A :class:`~kantag.corpus.Sentence` may be passed in place of ``words``.
    """
    if hasattr(words, "forms"):
        words = words.forms
    if not 0 <= i < len(words):
        raise ValueError(f"position {i} out of range for a {len(words)}-token sentence")
    feats = token_atomic_features(words[i], config)
    w = config.window
    for o in [*range(-w, 0), *range(1, w + 1)]:
        j = i + o
        prefix = _offset(o)
        if 0 <= j < len(words):
            feats += [prefix + f for f in token_atomic_features(words[j], config)]
        else:
            feats.append(f"{prefix}w={_word_at(words, j)}")
    if config.use_bigrams:
        for o in range(-w, w):
            feats.append(f"bg{_offset(o)}={_word_at(words, i + o)}_{_word_at(words, i + o + 1)}")
    if config.use_trigrams:
        for o in range(-w, w - 1):
            a, b, c = (_word_at(words, i + o + k) for k in range(3))
            feats.append(f"tg{_offset(o)}={a}_{b}_{c}")
    return feats


def sentence_features(words: Sequence[str], config: FeatureTemplateConfig) -> list[list[str]]:
    if hasattr(words, "forms"):
        words = words.forms
    return [extract_token_features(words, i, config) for i in range(len(words))]


class FeatureDictionary:
    """Dense string -> id map; frozen dictionaries never grow."""

    VERSION = 1

    def __init__(self, features: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self._names: list[str] = []
        self.frozen = False
        for f in features:
            self.add(f)

    def add(self, feature: str) -> int:
        idx = self._ids.get(feature)
        if idx is not None:
            return idx
        if self.frozen:
            raise RuntimeError("dictionary is frozen")
        if "\t" in feature or "\n" in feature:
            raise ValueError(f"feature contains TAB or newline: {feature!r}")
        idx = len(self._names)
        self._ids[feature] = idx
        self._names.append(feature)
        return idx

    def freeze(self) -> "FeatureDictionary":
        self.frozen = True
        return self

    def get(self, feature: str, default=None):
        return self._ids.get(feature, default)

    def __getitem__(self, feature):
        return self._ids[feature]

    def __contains__(self, feature):
        return feature in self._ids

    def __len__(self):
        return len(self._names)

    def __iter__(self):
        return iter(self._names)

    def __eq__(self, other):
        return isinstance(other, FeatureDictionary) and self._names == other._names

    def name(self, idx: int) -> str:
        return self._names[idx]

    def to_text(self) -> str:
        return f"#version {self.VERSION}\n" + "".join(
            f"{name}\t{i}\n" for i, name in enumerate(self._names))

    @classmethod
    def from_text(cls, text: str) -> "FeatureDictionary":
        lines = text.split("\n")
        if not lines or lines[0].strip() != f"#version {cls.VERSION}":
            raise ParseError("missing '#version 1' header", 1)
        d = cls()
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            name, sep, idx = line.rpartition("\t")
            if not sep:
                raise ParseError("expected feature<TAB>id", lineno)
            if int(idx) != len(d):
                raise ParseError(f"ids must be dense and ordered, got {idx}", lineno)
            d.add(name)
        return d.freeze()


def build_dictionary(dataset, config: FeatureTemplateConfig = DEFAULT_CONFIG,
                     extra: Iterable[str] = ()) -> FeatureDictionary:
    """Collect every feature string seen in ``dataset`` in first-seen order."""
    sentences = dataset.sentences if hasattr(dataset, "sentences") else dataset
    if len(sentences) == 0:
        raise ValueError("cannot build a dictionary from an empty dataset")
    d = FeatureDictionary()
    for s in sentences:
        for feats in sentence_features(s, config):
            for f in feats:
                d.add(f)
    for f in extra:
        d.add(f)
    return d.freeze()


def vectorize(words: Sequence[str], config: FeatureTemplateConfig,
              dictionary: FeatureDictionary) -> list[np.ndarray]:
    """Per-token sorted arrays of known feature ids; unknown features are dropped."""
    out = []
    for feats in sentence_features(words, config):
        ids = {dictionary.get(f) for f in feats}
        ids.discard(None)
        out.append(np.array(sorted(ids), dtype=np.int64))
    return out
