"""Recurrent POS tagger over word and/or character-composed word vectors.

Each token's input is the concatenation of its word-table vector and a
vector composed from its characters: a forward and a backward LSTM run over
the character embeddings, their final states are concatenated and linearly
projected.  A sentence-level SimpleRNN, LSTM or BiLSTM reads the inputs and a
softmax layer scores the tags at every position.

Parameters live in ``NeuralTaggerParams.blocks``, a dict of named arrays:

=================  ==========================================
``word_emb``       ``[V, word_dim]``
``char_emb``       ``[C, char_dim]`` (row 0 is the unknown char)
``char_fwd_W/b``   char LSTM, left to right
``char_bwd_W/b``   char LSTM, right to left
``char_proj_W/b``  ``[2 * char_hidden, char_out]``
``fwd_W/b``        sentence layer (``rnn`` or ``lstm``)
``bwd_W/b``        backward sentence LSTM (``bilstm`` only)
``out_W/b``        softmax projection
=================  ==========================================
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from ..corpus import Sentence, TagSet
from ..errors import ContractError, NumericError
from .embeddings import EmbeddingTable, oov_vector
from .layers import lstm_backward, lstm_forward, rnn_backward, rnn_forward, softmax

KINDS = ("rnn", "lstm", "bilstm")
UNK_CHAR = "<UNK>"


@dataclass(frozen=True)
class Architecture:
    kind: str = "bilstm"
    use_word: bool = True
    use_char: bool = False
    word_dim: int = 300
    char_dim: int = 32
    char_hidden: int = 64
    char_out: int = 128
    hidden: int = 128

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown recurrent kind {self.kind!r}; expected one of {KINDS}")
        if not (self.use_word or self.use_char):
            raise ValueError("enable word embeddings, character composition, or both")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, int) and not isinstance(v, bool) and v <= 0:
                raise ValueError(f"{f.name} must be positive")

    @property
    def input_dim(self) -> int:
        return self.word_dim * self.use_word + self.char_out * self.use_char

    @property
    def output_hidden(self) -> int:
        return self.hidden * (2 if self.kind == "bilstm" else 1)

    def replace(self, **changes) -> "Architecture":
        return replace(self, **changes)

    def describe(self) -> str:
        return " ".join(f"{k}={_fmt(v)}" for k, v in asdict(self).items())

    @classmethod
    def parse(cls, line: str) -> "Architecture":
        kinds = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for item in line.split():
            key, _, raw = item.partition("=")
            if key not in kinds:
                raise ValueError(f"unknown architecture field {key!r}")
            if kinds[key] in (bool, "bool"):
                kwargs[key] = raw == "true"
            elif kinds[key] in (int, "int"):
                kwargs[key] = int(raw)
            else:
                kwargs[key] = raw
        return cls(**kwargs)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


@dataclass(eq=False)
class NeuralTaggerParams:
    arch: Architecture
    tagset: TagSet
    blocks: dict
    word_vocab: dict | None = None
    char_vocab: dict | None = None
    word_trainable: bool = True
    oov_seed: int = 0

    def __post_init__(self):
        a = self.arch
        expected = {"out_W": (a.output_hidden, len(self.tagset)), "out_b": (len(self.tagset),)}
        rec_in = a.input_dim + a.hidden
        gate = 4 * a.hidden if a.kind != "rnn" else a.hidden
        expected["fwd_W"] = (rec_in, gate)
        expected["fwd_b"] = (gate,)
        if a.kind == "bilstm":
            expected["bwd_W"] = (rec_in, gate)
            expected["bwd_b"] = (gate,)
        if a.use_word:
            if self.word_vocab is None:
                raise ContractError("word embeddings enabled but no word vocabulary given")
            expected["word_emb"] = (len(self.word_vocab), a.word_dim)
        if a.use_char:
            if self.char_vocab is None:
                raise ContractError("character composition enabled but no char vocabulary given")
            ch = a.char_hidden
            expected["char_emb"] = (len(self.char_vocab), a.char_dim)
            for d in ("fwd", "bwd"):
                expected[f"char_{d}_W"] = (a.char_dim + ch, 4 * ch)
                expected[f"char_{d}_b"] = (4 * ch,)
            expected["char_proj_W"] = (2 * ch, a.char_out)
            expected["char_proj_b"] = (a.char_out,)
        if set(expected) != set(self.blocks):
            raise ContractError(
                f"parameter blocks {sorted(self.blocks)} do not match {sorted(expected)}")
        for name, shape in expected.items():
            if self.blocks[name].shape != shape:
                raise ContractError(f"{name}: shape {self.blocks[name].shape}, expected {shape}")

    @property
    def n_tags(self) -> int:
        return len(self.tagset)

    @property
    def n_parameters(self) -> int:
        return sum(b.size for b in self.blocks.values())

    def copy(self) -> "NeuralTaggerParams":
        return replace(self, blocks={k: v.copy() for k, v in self.blocks.items()},
                       word_vocab=None if self.word_vocab is None else dict(self.word_vocab),
                       char_vocab=None if self.char_vocab is None else dict(self.char_vocab))

    def freeze(self) -> "NeuralTaggerParams":
        for b in self.blocks.values():
            b.setflags(write=False)
        return self

    def word_vector(self, word: str) -> np.ndarray:
        idx = self.word_vocab.get(word)
        if idx is None:
            return oov_vector(word, self.arch.word_dim, self.oov_seed)
        return self.blocks["word_emb"][idx]


def _glorot(rng, shape):
    bound = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-bound, bound, size=shape)


def _lstm_bias(hidden):
    b = np.zeros(4 * hidden)
    b[hidden:2 * hidden] = 1.0
    return b


def build_char_vocab(words) -> dict:
    vocab = {UNK_CHAR: 0}
    for w in words:
        for ch in w:
            vocab.setdefault(ch, len(vocab))
    return vocab


def init_params(arch: Architecture, tagset: TagSet, words, embeddings: EmbeddingTable | None = None,
                seed: int = 0, freeze_word_embeddings: bool = False) -> NeuralTaggerParams:
    """Fresh parameters for ``arch``.

    ``words`` is the training word list; it seeds the character vocabulary and
    extends the word table with seeded random rows for unknown words.  With
    ``embeddings`` the table starts from the pretrained vectors, otherwise it is
    random over the training words.
    """
    words = list(words)
    rng = np.random.default_rng(seed)
    blocks = {}
    word_vocab = char_vocab = None
    if arch.use_word:
        if embeddings is not None:
            if embeddings.dim != arch.word_dim:
                arch = arch.replace(word_dim=embeddings.dim)
            table = EmbeddingTable(dict(embeddings.vocab), embeddings.vectors.astype(np.float64),
                                   not freeze_word_embeddings, seed)
            table.extend(words)
        else:
            table = EmbeddingTable.random(words, arch.word_dim, seed, not freeze_word_embeddings)
        word_vocab = table.vocab
        blocks["word_emb"] = table.vectors
    if arch.use_char:
        char_vocab = build_char_vocab(words)
        ch = arch.char_hidden
        blocks["char_emb"] = _glorot(rng, (len(char_vocab), arch.char_dim))
        for d in ("fwd", "bwd"):
            blocks[f"char_{d}_W"] = _glorot(rng, (arch.char_dim + ch, 4 * ch))
            blocks[f"char_{d}_b"] = _lstm_bias(ch)
        blocks["char_proj_W"] = _glorot(rng, (2 * ch, arch.char_out))
        blocks["char_proj_b"] = np.zeros(arch.char_out)
    rec_in = arch.input_dim + arch.hidden
    if arch.kind == "rnn":
        blocks["fwd_W"] = _glorot(rng, (rec_in, arch.hidden))
        blocks["fwd_b"] = np.zeros(arch.hidden)
    else:
        directions = ("fwd", "bwd") if arch.kind == "bilstm" else ("fwd",)
        for d in directions:
            blocks[f"{d}_W"] = _glorot(rng, (rec_in, 4 * arch.hidden))
            blocks[f"{d}_b"] = _lstm_bias(arch.hidden)
    blocks["out_W"] = _glorot(rng, (arch.output_hidden, len(tagset)))
    blocks["out_b"] = np.zeros(len(tagset))
    return NeuralTaggerParams(arch, tagset, blocks, word_vocab, char_vocab,
                              not freeze_word_embeddings, seed)


@dataclass
class Batch:
    """Padded sentence batch.

    ``word_ids`` is -1 for padding and for words missing from the table;
    ``oov_vectors`` carries the seeded vectors of the latter.  ``form_index``
    points each token at a row of the unique-form character matrix.
    """

    sentences: list
    mask: np.ndarray
    word_ids: np.ndarray | None = None
    oov_vectors: np.ndarray | None = None
    form_index: np.ndarray | None = None
    char_ids: np.ndarray | None = None
    char_mask: np.ndarray | None = None
    gold: np.ndarray | None = None

    @property
    def n_real(self) -> int:
        return int(self.mask.sum())


def _words(sentence):
    return sentence.forms if isinstance(sentence, Sentence) else list(sentence)


def make_batch(params: NeuralTaggerParams, sentences, gold=None, use_gold=True) -> Batch:
    """Pad ``sentences`` (Sentence objects or word lists).

    ``gold`` is an optional list of tag-index sequences aligned with the
    sentences; when omitted and the sentences carry gold tags they are used.
    """
    words = [_words(s) for s in sentences]
    if not words or any(len(w) == 0 for w in words):
        raise ValueError("batch needs at least one non-empty sentence")
    B, T = len(words), max(len(w) for w in words)
    mask = np.zeros((B, T))
    for i, w in enumerate(words):
        mask[i, :len(w)] = 1.0
    batch = Batch(words, mask)
    arch = params.arch
    if arch.use_word:
        ids = np.full((B, T), -1, dtype=np.int64)
        oov = np.zeros((B, T, arch.word_dim))
        for i, ws in enumerate(words):
            for t, w in enumerate(ws):
                idx = params.word_vocab.get(w)
                if idx is None:
                    oov[i, t] = oov_vector(w, arch.word_dim, params.oov_seed)
                else:
                    ids[i, t] = idx
        batch.word_ids, batch.oov_vectors = ids, oov
    if arch.use_char:
        forms = {}
        index = np.zeros((B, T), dtype=np.int64)
        for i, ws in enumerate(words):
            for t, w in enumerate(ws):
                index[i, t] = forms.setdefault(w, len(forms))
        L = max(len(f) for f in forms)
        cids = np.zeros((len(forms), L), dtype=np.int64)
        cmask = np.zeros((len(forms), L))
        for f, u in forms.items():
            cids[u, :len(f)] = [params.char_vocab.get(ch, 0) for ch in f]
            cmask[u, :len(f)] = 1.0
        batch.form_index, batch.char_ids, batch.char_mask = index, cids, cmask
    if use_gold and gold is None and all(isinstance(s, Sentence) for s in sentences) \
            and all(t.gold_tag is not None for s in sentences for t in s):
        gold = [[params.tagset.index(t) for t in s.gold_tags] for s in sentences]
    if gold is not None:
        g = np.zeros((B, T), dtype=np.int64)
        for i, seq in enumerate(gold):
            if len(seq) != len(words[i]):
                raise ContractError(f"sentence {i}: gold length differs from sentence length")
            g[i, :len(seq)] = seq
        if (g < 0).any() or (g >= params.n_tags).any():
            raise ContractError("gold tag index outside the tagset")
        batch.gold = g
    return batch


def _compose(blocks, char_ids, char_mask):
    ce = blocks["char_emb"][char_ids]
    hf, sf = lstm_forward(ce, char_mask, blocks["char_fwd_W"], blocks["char_fwd_b"])
    hb, sb = lstm_forward(ce, char_mask, blocks["char_bwd_W"], blocks["char_bwd_b"], reverse=True)
    final = np.concatenate([hf[:, -1], hb[:, 0]], axis=1)
    out = final @ blocks["char_proj_W"] + blocks["char_proj_b"]
    return out, (ce, sf, sb, final, hf.shape)


def compose_word_vector(params: NeuralTaggerParams, form: str) -> np.ndarray:
    """Character-composed vector of one word form."""
    if not form:
        raise ValueError("cannot compose an empty word")
    if not params.arch.use_char:
        raise ContractError("model has no character composition")
    ids = np.array([[params.char_vocab.get(ch, 0) for ch in form]], dtype=np.int64)
    out, _ = _compose(params.blocks, ids, np.ones(ids.shape))
    return out[0]


def _first_bad_block(blocks):
    for name in sorted(blocks):
        if not np.isfinite(blocks[name]).all():
            return name
    return None


def _check_finite(stage, value, blocks):
    if not np.isfinite(value).all():
        bad = _first_bad_block(blocks)
        where = f"parameter block {bad!r}" if bad else "no non-finite parameter block"
        raise NumericError(f"non-finite values after {stage} ({where})")


def _forward(params: NeuralTaggerParams, batch: Batch):
    arch, blocks = params.arch, params.blocks
    cache = {}
    parts = []
    if arch.use_word:
        known = batch.word_ids >= 0
        xw = blocks["word_emb"][np.where(known, batch.word_ids, 0)]
        xw = np.where(known[..., None], xw, batch.oov_vectors)
        parts.append(xw)
    if arch.use_char:
        comp, cache["char"] = _compose(blocks, batch.char_ids, batch.char_mask)
        _check_finite("character composition", comp, blocks)
        parts.append(comp[batch.form_index])
    x = np.concatenate(parts, axis=2) if len(parts) > 1 else parts[0]
    if arch.kind == "rnn":
        hs, cache["fwd"] = rnn_forward(x, batch.mask, blocks["fwd_W"], blocks["fwd_b"])
    else:
        hs, cache["fwd"] = lstm_forward(x, batch.mask, blocks["fwd_W"], blocks["fwd_b"])
        if arch.kind == "bilstm":
            hb, cache["bwd"] = lstm_forward(x, batch.mask, blocks["bwd_W"], blocks["bwd_b"],
                                            reverse=True)
            hs = np.concatenate([hs, hb], axis=2)
    _check_finite("the recurrent layer", hs, blocks)
    probs = softmax(hs @ blocks["out_W"] + blocks["out_b"])
    _check_finite("the softmax layer", probs, blocks)
    cache["hs"] = hs
    return probs, cache


def forward_tagger(params: NeuralTaggerParams, batch: Batch) -> np.ndarray:
    """Tag distributions ``[B, T, n_tags]``; padded rows are meaningless."""
    return _forward(params, batch)[0]


def loss_and_gradients(params: NeuralTaggerParams, batch: Batch, return_probs: bool = False):
    """Mean cross-entropy over real tokens and a gradient for every block.

    With ``return_probs`` the forward distributions are returned as a third
    element.
    """
    if batch.gold is None:
        raise ContractError("batch carries no gold tags")
    arch, blocks = params.arch, params.blocks
    probs, cache = _forward(params, batch)
    B, T, K = probs.shape
    n = batch.n_real
    rows, cols = np.nonzero(batch.mask)
    p_gold = probs[rows, cols, batch.gold[rows, cols]]
    loss = float(-np.log(np.maximum(p_gold, 1e-300)).sum() / n)

    grads = {}
    dlogits = probs.copy()
    dlogits[rows, cols, batch.gold[rows, cols]] -= 1.0
    dlogits *= batch.mask[..., None] / n
    hs = cache["hs"]
    grads["out_W"] = hs.reshape(-1, hs.shape[2]).T @ dlogits.reshape(-1, K)
    grads["out_b"] = dlogits.sum(axis=(0, 1))
    dhs = dlogits @ blocks["out_W"].T
    if arch.kind == "rnn":
        dx, grads["fwd_W"], grads["fwd_b"] = rnn_backward(dhs, cache["fwd"])
    else:
        H = arch.hidden
        dx, grads["fwd_W"], grads["fwd_b"] = lstm_backward(dhs[..., :H], cache["fwd"])
        if arch.kind == "bilstm":
            dxb, grads["bwd_W"], grads["bwd_b"] = lstm_backward(dhs[..., H:], cache["bwd"])
            dx = dx + dxb
    offset = 0
    if arch.use_word:
        dxw = dx[..., :arch.word_dim]
        offset = arch.word_dim
        gE = np.zeros_like(blocks["word_emb"])
        if params.word_trainable:
            known = batch.word_ids >= 0
            np.add.at(gE, batch.word_ids[known], dxw[known])
        grads["word_emb"] = gE
    if arch.use_char:
        dxc = dx[..., offset:offset + arch.char_out]
        ce, sf, sb, final, hshape = cache["char"]
        dcomp = np.zeros((batch.char_ids.shape[0], arch.char_out))
        real = batch.mask > 0
        np.add.at(dcomp, batch.form_index[real], dxc[real])
        grads["char_proj_W"] = final.T @ dcomp
        grads["char_proj_b"] = dcomp.sum(axis=0)
        dfinal = dcomp @ blocks["char_proj_W"].T
        ch = arch.char_hidden
        dhf = np.zeros(hshape)
        dhf[:, -1] = dfinal[:, :ch]
        dhb = np.zeros(hshape)
        dhb[:, 0] = dfinal[:, ch:]
        dce_f, grads["char_fwd_W"], grads["char_fwd_b"] = lstm_backward(dhf, sf)
        dce_b, grads["char_bwd_W"], grads["char_bwd_b"] = lstm_backward(dhb, sb)
        gC = np.zeros_like(blocks["char_emb"])
        np.add.at(gC, batch.char_ids, (dce_f + dce_b) * batch.char_mask[..., None])
        grads["char_emb"] = gC
    if return_probs:
        return loss, grads, probs
    return loss, grads


def predict_indices(params: NeuralTaggerParams, sentences) -> list[list[int]]:
    batch = make_batch(params, sentences, use_gold=False)
    probs = forward_tagger(params, batch)
    return [np.argmax(probs[i, :len(w)], axis=1).tolist() for i, w in enumerate(batch.sentences)]


def tag_sentence_neural(params: NeuralTaggerParams, sentence) -> list[str]:
    words = _words(sentence)
    if not words:
        raise ValueError("cannot tag an empty sentence")
    labels = params.tagset.labels
    return [labels[i] for i in predict_indices(params, [words])[0]]
