"""Word-vector tables: text-format loading and seeded vectors for unknown words."""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParseError

log = logging.getLogger(__name__)

OOV_SCALE = 0.1


def oov_vector(word: str, dim: int, seed: int) -> np.ndarray:
    """Uniform ``[-0.1, 0.1]`` vector that depends only on ``(word, dim, seed)``."""
    digest = hashlib.sha256(f"{seed}\x00{word}".encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    return rng.uniform(-OOV_SCALE, OOV_SCALE, size=dim)


@dataclass
class EmbeddingTable:
    vocab: dict[str, int]
    vectors: np.ndarray
    trainable: bool = True
    oov_seed: int = 0
    duplicates: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[1] == 0:
            raise ValueError("vectors must be a [V, d] matrix with d > 0")
        if len(self.vocab) != self.vectors.shape[0]:
            raise ValueError("vocab size does not match the number of vectors")
        if sorted(self.vocab.values()) != list(range(len(self.vocab))):
            raise ValueError("vocab indices must cover 0..V-1 exactly")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.vocab)

    def __contains__(self, word):
        return word in self.vocab

    def lookup(self, word: str) -> np.ndarray:
        idx = self.vocab.get(word)
        if idx is None:
            return oov_vector(word, self.dim, self.oov_seed)
        return self.vectors[idx]

    def extend(self, words) -> int:
        """Append seeded random rows for words not yet in the table; returns how many."""
        new = list(dict.fromkeys(w for w in words if w not in self.vocab))
        if not new:
            return 0
        rows = np.stack([oov_vector(w, self.dim, self.oov_seed) for w in new])
        for w in new:
            self.vocab[w] = len(self.vocab)
        self.vectors = np.concatenate([self.vectors, rows.astype(self.vectors.dtype)])
        return len(new)

    @classmethod
    def random(cls, words, dim: int, seed: int = 0, trainable: bool = True) -> "EmbeddingTable":
        """Table over ``words`` (first occurrence order) with seeded random rows."""
        table = cls({}, np.zeros((0, dim)), trainable, seed)
        table.extend(words)
        return table


def load_embeddings(text: str, expected_dim: int | None = None, trainable: bool = False,
                    oov_seed: int = 0) -> EmbeddingTable:
    """Parse space-separated ``word v1 ... vd`` lines with an optional ``V d`` header.

    Later duplicates of a word are ignored; their number is kept in
    ``table.duplicates``.
    """
    vocab: dict[str, int] = {}
    rows = []
    dim = expected_dim
    duplicates = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        parts = line.rstrip("\r").split()
        if not parts:
            continue
        if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            header_dim = int(parts[1])
            if dim is not None and header_dim != dim:
                raise ParseError(f"header dimension {header_dim} != expected {dim}", lineno)
            dim = header_dim
            continue
        word, values = parts[0], parts[1:]
        if dim is None:
            dim = len(values)
            if dim == 0:
                raise ParseError("row has no vector components", lineno)
        if len(values) != dim:
            raise ParseError(f"expected {dim} components, got {len(values)}", lineno)
        try:
            vec = np.array([float(v) for v in values])
        except ValueError:
            raise ParseError(f"non-numeric component in row for {word!r}", lineno) from None
        if not np.isfinite(vec).all():
            raise ParseError(f"non-finite component in row for {word!r}", lineno)
        if word in vocab:
            duplicates += 1
            continue
        vocab[word] = len(rows)
        rows.append(vec)
    if dim is None:
        raise ParseError("embedding file holds no vectors")
    vectors = np.stack(rows) if rows else np.zeros((0, dim))
    if duplicates:
        log.warning("embedding file: %d duplicate words ignored", duplicates)
    return EmbeddingTable(vocab, vectors, trainable, oov_seed, duplicates)


def read_embeddings(path, **kwargs) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        return load_embeddings(fh.read(), **kwargs)
