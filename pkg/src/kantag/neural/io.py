"""Text serialisation of neural tagger parameters.

Layout::

    #version 1
    model<TAB>neural
    arch<TAB>kind=bilstm use_word=true ...
    word_trainable<TAB>true
    oov_seed<TAB>0
    tag<TAB>0<TAB>ADJ
    dim<TAB>fwd_W<TAB>rows<TAB>cols        (one per block: the dimension table)
    word<TAB>0<TAB>form                     (word vocabulary)
    char<TAB>0<TAB><UNK>                    (character vocabulary)
    block<TAB>fwd_W<TAB>rows<TAB>cols
    <row of space-separated floats>         (rows lines, row-major)
"""
from __future__ import annotations

import numpy as np

from ..corpus import TagSet
from ..errors import ContractError, ParseError
from .tagger import Architecture, NeuralTaggerParams

FORMAT_VERSION = 1


def _row(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def dumps_neural(params: NeuralTaggerParams) -> str:
    lines = [f"#version {FORMAT_VERSION}", "model\tneural", f"arch\t{params.arch.describe()}",
             f"word_trainable\t{'true' if params.word_trainable else 'false'}",
             f"oov_seed\t{params.oov_seed}"]
    lines += [f"tag\t{i}\t{t}" for i, t in enumerate(params.tagset.labels)]
    names = sorted(params.blocks)
    for name in names:
        m = np.atleast_2d(params.blocks[name])
        lines.append(f"dim\t{name}\t{m.shape[0]}\t{m.shape[1]}")
    for key, vocab in (("word", params.word_vocab), ("char", params.char_vocab)):
        if vocab is not None:
            lines += [f"{key}\t{i}\t{w}" for w, i in sorted(vocab.items(), key=lambda kv: kv[1])]
    for name in names:
        m = np.atleast_2d(params.blocks[name])
        lines.append(f"block\t{name}\t{m.shape[0]}\t{m.shape[1]}")
        lines += [_row(r) for r in m]
    return "\n".join(lines) + "\n"


def loads_neural(text: str) -> NeuralTaggerParams:
    lines = text.split("\n")
    if not lines or lines[0].strip() != f"#version {FORMAT_VERSION}":
        raise ParseError("missing '#version 1' header", 1)
    header = {}
    tags, dims = [], {}
    vocabs = {"word": [], "char": []}
    blocks = {}
    i = 1
    while i < len(lines):
        line = lines[i]
        lineno = i + 1
        i += 1
        if not line:
            continue
        head, _, rest = line.partition("\t")
        try:
            if head in ("model", "arch", "word_trainable", "oov_seed"):
                header[head] = rest
            elif head == "tag":
                idx, label = rest.split("\t", 1)
                tags.append((int(idx), label))
            elif head == "dim":
                name, r, c = rest.split("\t")
                dims[name] = (int(r), int(c))
            elif head in vocabs:
                idx, item = rest.split("\t", 1)
                vocabs[head].append((int(idx), item))
            elif head == "block":
                name, r, c = rest.split("\t")
                r, c = int(r), int(c)
                if dims.get(name) != (r, c):
                    raise ContractError(f"{name}: block shape {(r, c)} disagrees with the "
                                        f"dimension table {dims.get(name)}")
                rows = [np.array(lines[i + k].split(), dtype=np.float64) for k in range(r)]
                if any(len(row) != c for row in rows):
                    raise ParseError(f"block {name}: expected {c} values per row", lineno)
                blocks[name] = np.stack(rows) if rows else np.zeros((0, c))
                i += r
            else:
                raise ParseError(f"unexpected record {head!r}", lineno)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, (ParseError, ContractError)):
                raise
            raise ParseError(f"malformed line: {exc}", lineno) from None
    if header.get("model") != "neural":
        raise ContractError(f"model: expected 'neural', found {header.get('model')!r}")
    try:
        arch = Architecture.parse(header.get("arch", ""))
    except (ValueError, TypeError) as exc:
        raise ContractError(f"arch: {exc}") from None
    if set(dims) != set(blocks):
        raise ContractError("dim: dimension table and parameter blocks disagree")

    def as_map(items, field):
        if [k for k, _ in items] != list(range(len(items))):
            raise ContractError(f"{field}: indices must be dense and ordered")
        return {w: k for k, w in items} if items else None

    word_vocab = as_map(vocabs["word"], "word")
    char_vocab = as_map(vocabs["char"], "char")
    if arch.use_word and word_vocab is None:
        word_vocab = {}
    for name in list(blocks):
        if name.endswith("_b"):
            blocks[name] = blocks[name].reshape(-1)
    params = NeuralTaggerParams(arch, TagSet(t for _, t in sorted(tags)), blocks, word_vocab,
                                char_vocab, header.get("word_trainable") == "true",
                                int(header.get("oov_seed", 0)))
    return params.freeze()
