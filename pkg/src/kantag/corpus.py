"""Column-format corpora: reading, writing, splitting and profiling.

A corpus file holds one token per line as ``form<TAB>tag`` with a blank line
after every sentence.  The tag column may be absent for raw input.  Comment
lines starting with ``#`` are allowed only before the first token.
"""
from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractError, ParseError, ValidationError

TAG_PATTERN = re.compile(r"[A-Z_]+")
_WS = re.compile(r"\s")


@dataclass(frozen=True)
class Token:
    form: str
    gold_tag: str | None = None
    pred_tag: str | None = None

    def __post_init__(self):
        if not self.form:
            raise ValueError("token form must be non-empty")
        if _WS.search(self.form):
            raise ValueError(f"token form contains whitespace: {self.form!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("a sentence needs at least one token")
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def gold_tags(self) -> list[str | None]:
        return [t.gold_tag for t in self.tokens]

    @property
    def pred_tags(self) -> list[str | None]:
        return [t.pred_tag for t in self.tokens]

    @classmethod
    def from_forms(cls, forms: Iterable[str], tags: Iterable[str] | None = None) -> "Sentence":
        forms = list(forms)
        if tags is None:
            return cls(tuple(Token(f) for f in forms))
        tags = list(tags)
        if len(tags) != len(forms):
            raise ValueError("forms and tags differ in length")
        return cls(tuple(Token(f, t) for f, t in zip(forms, tags)))

    def with_predictions(self, tags: Sequence[str]) -> "Sentence":
        if len(tags) != len(self.tokens):
            raise ContractError(
                f"got {len(tags)} predicted tags for a {len(self.tokens)}-token sentence")
        return Sentence(tuple(Token(t.form, t.gold_tag, p) for t, p in zip(self.tokens, tags)))


class TagSet:
    """Ordered, immutable inventory of tag labels."""

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("tag labels must be unique")
        self._labels = labels
        self._index = {label: i for i, label in enumerate(labels)}

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def index(self, label: str) -> int:
        return self._index[label]

    def __contains__(self, label):
        return label in self._index

    def __len__(self):
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __eq__(self, other):
        return isinstance(other, TagSet) and self._labels == other._labels

    def __hash__(self):
        return hash(self._labels)

    def __repr__(self):
        return f"TagSet({list(self._labels)!r})"


def _observed_tags(sentences: Iterable[Sentence]) -> list[str]:
    seen = set()
    for s in sentences:
        for t in s:
            if t.gold_tag is not None:
                seen.add(t.gold_tag)
    return sorted(seen)


@dataclass(frozen=True)
class Dataset:
    sentences: tuple[Sentence, ...]
    tagset: TagSet = None  # derived from gold tags when omitted

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if self.tagset is None:
            object.__setattr__(self, "tagset", TagSet(_observed_tags(self.sentences)))
        else:
            for si, s in enumerate(self.sentences):
                for ti, t in enumerate(s):
                    if t.gold_tag is not None and t.gold_tag not in self.tagset:
                        raise ValidationError(
                            f"sentence {si} token {ti}: tag {t.gold_tag!r} not in tagset")

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def is_gold_tagged(self) -> bool:
        return all(t.gold_tag is not None for s in self.sentences for t in s)


def parse_column_corpus(text: str, strict: bool = False, tagset: TagSet | None = None,
                        allow_pred_column: bool = False) -> Dataset:
    """Parse column-format text into a :class:`Dataset`.

    With ``allow_pred_column`` a third column is accepted and read as the
    predicted tag (the ``form<TAB>gold<TAB>pred`` layout written by tagging).
    ``strict`` enforces the ``[A-Z_]+`` tag shape; a supplied ``tagset``
    additionally closes the label inventory.
    """
    max_fields = 3 if allow_pred_column else 2
    sentences: list[Sentence] = []
    current: list[Token] = []
    in_header = True
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if in_header and line.startswith("#"):
            continue
        if not line.strip():
            if current:
                sentences.append(Sentence(tuple(current)))
                current = []
            continue
        in_header = False
        fields = line.split("\t")
        if len(fields) > max_fields:
            raise ParseError(f"expected at most {max_fields} TAB-separated fields, got {len(fields)}",
                             lineno)
        form = fields[0].strip(" ")
        if not form:
            raise ParseError("empty token form", lineno)
        if _WS.search(form):
            raise ParseError(f"token form contains whitespace: {form!r}", lineno)
        tags = [f.strip(" ") or None for f in fields[1:]]
        for tag in tags:
            if tag is None:
                continue
            if strict and not TAG_PATTERN.fullmatch(tag):
                raise ValidationError(f"line {lineno}: tag {tag!r} does not match [A-Z_]+")
            if tagset is not None and tag not in tagset:
                raise ValidationError(f"line {lineno}: tag {tag!r} not in the supplied tagset")
        gold = tags[0] if tags else None
        pred = tags[1] if len(tags) > 1 else None
        current.append(Token(form, gold, pred))
    if current:
        sentences.append(Sentence(tuple(current)))
    return Dataset(tuple(sentences), tagset)


def serialize_column_corpus(dataset: Dataset, column: str = "gold") -> str:
    """Write ``dataset`` back to column text.

    ``column`` is ``"gold"``, ``"pred"`` or ``"both"`` (three columns).
    """
    if column not in ("gold", "pred", "both"):
        raise ValueError(f"unknown column {column!r}")
    out = []
    for si, s in enumerate(dataset.sentences):
        for ti, t in enumerate(s):
            needed = {"gold": (t.gold_tag,), "pred": (t.pred_tag,),
                      "both": (t.gold_tag, t.pred_tag)}[column]
            if any(v is None for v in needed):
                raise ContractError(f"sentence {si} token {ti}: missing {column} tag")
            out.append("\t".join((t.form,) + needed))
            out.append("\n")
        out.append("\n")
    return "".join(out)


def serialize_forms(dataset: Dataset) -> str:
    return "".join("".join(t.form + "\n" for t in s) + "\n" for s in dataset.sentences)


def split_dataset(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Random sentence-level split.

    The test side receives ``floor(test_fraction * n + 0.5)`` sentences
    (round half up); both sides keep corpus order and the parent tagset.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(dataset.sentences)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    n_test = int(math.floor(test_fraction * n + 0.5))
    order = np.random.default_rng(seed).permutation(n)
    test_idx = set(order[:n_test].tolist())
    train = tuple(s for i, s in enumerate(dataset.sentences) if i not in test_idx)
    test = tuple(s for i, s in enumerate(dataset.sentences) if i in test_idx)
    return Dataset(train, dataset.tagset), Dataset(test, dataset.tagset)


@dataclass
class StatsReport:
    n_sentences: int
    n_tokens: int
    tag_histogram: dict[str, int] = field(default_factory=dict)
    vocab_size: int = 0
    oov_tokens: int = 0
    oov_types: int = 0

    def as_key_values(self) -> str:
        lines = [
            f"n_sentences\t{self.n_sentences}",
            f"n_tokens\t{self.n_tokens}",
            f"vocab_size\t{self.vocab_size}",
            f"oov_tokens\t{self.oov_tokens}",
            f"oov_types\t{self.oov_types}",
        ]
        lines += [f"tag:{tag}\t{n}" for tag, n in sorted(self.tag_histogram.items())]
        return "\n".join(lines) + "\n"

    def as_table(self) -> str:
        rows = [
            ("sentences", self.n_sentences),
            ("tokens", self.n_tokens),
            ("vocabulary", self.vocab_size),
            ("OOV tokens", self.oov_tokens),
            ("OOV types", self.oov_types),
        ]
        width = max(len(name) for name, _ in rows)
        out = [f"{name:<{width}}  {value:>9}" for name, value in rows]
        if self.tag_histogram:
            tw = max(len(t) for t in self.tag_histogram)
            out.append("")
            out.append(f"{'tag':<{tw}}  {'count':>9}")
            for tag, n in sorted(self.tag_histogram.items(), key=lambda kv: (-kv[1], kv[0])):
                out.append(f"{tag:<{tw}}  {n:>9}")
        return "\n".join(out) + "\n"


def corpus_stats(dataset: Dataset, reference_vocab: set[str] | None = None) -> StatsReport:
    forms = Counter(t.form for s in dataset.sentences for t in s)
    tags = Counter(t.gold_tag for s in dataset.sentences for t in s if t.gold_tag is not None)
    n_tokens = sum(forms.values())
    oov_tokens = oov_types = 0
    if reference_vocab is not None:
        unseen = [f for f in forms if f not in reference_vocab]
        oov_types = len(unseen)
        oov_tokens = sum(forms[f] for f in unseen)
    return StatsReport(
        n_sentences=len(dataset.sentences),
        n_tokens=n_tokens,
        tag_histogram=dict(tags),
        vocab_size=len(forms),
        oov_tokens=oov_tokens,
        oov_types=oov_types,
    )


def inconsistency_report(dataset: Dataset) -> dict[str, dict[str, int]]:
    """Forms that carry two or more distinct gold tags, with per-tag counts."""
    counts: dict[str, Counter] = defaultdict(Counter)
    for si, s in enumerate(dataset.sentences):
        for ti, t in enumerate(s):
            if t.gold_tag is None:
                raise ContractError(f"sentence {si} token {ti}: missing gold tag")
            counts[t.form][t.gold_tag] += 1
    return {form: dict(c) for form, c in counts.items() if len(c) >= 2}


def format_inconsistencies(report: Mapping[str, Mapping[str, int]]) -> str:
    """One ``form<TAB>tag:count,...`` line per form, most frequent form first."""
    rows = sorted(report.items(), key=lambda kv: (-sum(kv[1].values()), kv[0]))
    lines = []
    for form, tags in rows:
        parts = sorted(tags.items(), key=lambda kv: (-kv[1], kv[0]))
        lines.append(form + "\t" + ",".join(f"{t}:{n}" for t, n in parts))
    return "".join(line + "\n" for line in lines)


def read_corpus(path, **kwargs) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_column_corpus(fh.read(), **kwargs)


def read_vocab(path) -> set[str]:
    """Word list: first whitespace-separated field of each non-empty line.

    An embedding file works as-is; a ``V d`` header line is skipped.
    """
    vocab = set()
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            parts = line.split()
            if not parts:
                continue
            if i == 0 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            vocab.add(parts[0])
    return vocab
