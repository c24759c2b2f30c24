"""Macro-averaged tagging metrics, confusion matrices and error listings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Dataset
from .errors import ContractError


@dataclass(frozen=True)
class TagScore:
    precision: float
    recall: float
    f1: float
    gold_support: int
    pred_count: int


@dataclass
class EvalReport:
    per_tag: dict[str, TagScore]
    macro_p: float
    macro_r: float
    macro_f: float
    overall_accuracy: float
    n_tokens: int

    def as_key_values(self) -> str:
        lines = [
            f"macro_p\t{self.macro_p:.4f}",
            f"macro_r\t{self.macro_r:.4f}",
            f"macro_f\t{self.macro_f:.4f}",
            f"accuracy\t{self.overall_accuracy:.4f}",
            f"n_tokens\t{self.n_tokens}",
        ]
        for tag, s in self.per_tag.items():
            lines.append(f"tag:{tag}\t{s.precision:.4f}\t{s.recall:.4f}\t{s.f1:.4f}"
                         f"\t{s.gold_support}\t{s.pred_count}")
        return "\n".join(lines) + "\n"

    def as_table(self) -> str:
        w = max([len("tag")] + [len(t) for t in self.per_tag])
        head = f"{'tag':<{w}}  {'P':>6}  {'R':>6}  {'F1':>6}  {'gold':>7}  {'pred':>7}"
        out = [head, "-" * len(head)]
        for tag, s in self.per_tag.items():
            out.append(f"{tag:<{w}}  {s.precision:6.4f}  {s.recall:6.4f}  {s.f1:6.4f}  "
                       f"{s.gold_support:7d}  {s.pred_count:7d}")
        out.append("-" * len(head))
        out.append(f"{'macro':<{w}}  {self.macro_p:6.4f}  {self.macro_r:6.4f}  {self.macro_f:6.4f}")
        out.append(f"accuracy {self.overall_accuracy:.4f} over {self.n_tokens} tokens")
        return "\n".join(out) + "\n"


@dataclass
class ConfusionMatrix:
    """Counts with gold tags on rows and predicted tags on columns."""

    labels: tuple[str, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_tsv(self) -> str:
        lines = ["gold\\pred\t" + "\t".join(self.labels)]
        for label, row in zip(self.labels, self.counts):
            lines.append(label + "\t" + "\t".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def aligned_tags(gold: Dataset, pred: Dataset) -> tuple[list[str], list[str]]:
    """Flatten gold and predicted tags, checking the two corpora line up.

    A prediction token's ``pred_tag`` is used when present, else its
    ``gold_tag`` column (a plain two-column prediction file).
    """
    if len(gold.sentences) != len(pred.sentences):
        n = min(len(gold.sentences), len(pred.sentences))
        raise ContractError(f"sentence {n}: gold has {len(gold.sentences)} sentences, "
                            f"prediction has {len(pred.sentences)}")
    g_tags, p_tags = [], []
    for si, (gs, ps) in enumerate(zip(gold.sentences, pred.sentences)):
        if len(gs) != len(ps):
            raise ContractError(f"sentence {si}: {len(gs)} gold tokens vs {len(ps)} predicted")
        for ti, (gt, pt) in enumerate(zip(gs, ps)):
            if gt.form != pt.form:
                raise ContractError(f"sentence {si} token {ti}: form {gt.form!r} != {pt.form!r}")
            p = pt.pred_tag if pt.pred_tag is not None else pt.gold_tag
            if gt.gold_tag is None or p is None:
                raise ContractError(f"sentence {si} token {ti}: missing tag")
            g_tags.append(gt.gold_tag)
            p_tags.append(p)
    return g_tags, p_tags


def _labels(gold_tags, pred_tags, tagset=None):
    labels = list(tagset.labels) if tagset is not None else []
    extra = sorted(set(gold_tags).union(pred_tags).difference(labels))
    return tuple(labels + extra)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def scores_from_tags(gold_tags, pred_tags, labels=None) -> EvalReport:
    labels = tuple(labels) if labels is not None else _labels(gold_tags, pred_tags)
    m = _confusion(gold_tags, pred_tags, labels)
    per_tag = {}
    for i, tag in enumerate(labels):
        tp = int(m[i, i])
        support = int(m[i].sum())
        predicted = int(m[:, i].sum())
        if support == 0 and predicted == 0:
            continue
        p, r = _ratio(tp, predicted), _ratio(tp, support)
        f = 2 * p * r / (p + r) if p + r else 0.0
        per_tag[tag] = TagScore(p, r, f, support, predicted)
    scored = [s for s in per_tag.values() if s.gold_support > 0]
    n = len(gold_tags)

    def mean(xs):
        return float(sum(xs) / len(xs)) if xs else 0.0

    return EvalReport(
        per_tag=per_tag,
        macro_p=mean([s.precision for s in scored]),
        macro_r=mean([s.recall for s in scored]),
        macro_f=mean([s.f1 for s in scored]),
        overall_accuracy=_ratio(int(np.trace(m)), n),
        n_tokens=n,
    )


def evaluate(gold: Dataset, pred: Dataset) -> EvalReport:
    """Per-tag and macro P/R/F1 plus token accuracy.

    Macro means run over tags with gold support; tags only ever predicted
    still get a per-tag row.  Zero denominators give 0.
    """
    g, p = aligned_tags(gold, pred)
    return scores_from_tags(g, p, _labels(g, p, gold.tagset))


def _confusion(gold_tags, pred_tags, labels):
    index = {t: i for i, t in enumerate(labels)}
    m = np.zeros((len(labels), len(labels)), dtype=np.int64)
    if gold_tags:
        np.add.at(m, ([index[t] for t in gold_tags], [index[t] for t in pred_tags]), 1)
    return m


def confusion_matrix(gold: Dataset, pred: Dataset) -> ConfusionMatrix:
    g, p = aligned_tags(gold, pred)
    labels = _labels(g, p, gold.tagset)
    return ConfusionMatrix(labels, _confusion(g, p, labels))


def top_confusions(m: ConfusionMatrix, k: int) -> list[tuple[str, str, int]]:
    """Largest off-diagonal cells; ties broken by (gold index, pred index)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cells = [(-int(m.counts[i, j]), i, j)
             for i, j in zip(*np.nonzero(m.counts)) if i != j]
    cells.sort()
    return [(m.labels[i], m.labels[j], -c) for c, i, j in cells[:k]]


def format_confusions(items) -> str:
    return "".join(f"{g}\t{p}\t{n}\n" for g, p, n in items)
