"""Mini-batch training of the recurrent taggers with Adam or RMSProp."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from ..corpus import Dataset
from .embeddings import EmbeddingTable
from .tagger import (Architecture, NeuralTaggerParams, forward_tagger, init_params,
                     loss_and_gradients, make_batch)

log = logging.getLogger(__name__)

OPTIMIZERS = ("adam", "rmsprop")


@dataclass(frozen=True)
class NeuralTrainConfig:
    optimizer: str = "adam"
    batch_size: int = 32
    epochs: int = 25
    validation_fraction: float = 0.1
    learning_rate: float = 1e-3
    seed: int = 0
    freeze_word_embeddings: bool = False
    clip_norm: float | None = None

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in [0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")

    def replace(self, **changes) -> "NeuralTrainConfig":
        return replace(self, **changes)


PRESETS = {
    "paper-neural-word": NeuralTrainConfig(optimizer="adam", batch_size=32, epochs=25,
                                           validation_fraction=0.1, learning_rate=1e-3),
    "paper-neural-charword": NeuralTrainConfig(optimizer="rmsprop", batch_size=64, epochs=25,
                                               validation_fraction=0.1, learning_rate=1e-3),
}


class Adam:
    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m, self.v = {}, {}
        self.t = 0

    def step(self, blocks, grads, skip=()):
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            if name in skip:
                continue
            m = self.m.setdefault(name, np.zeros_like(g))
            v = self.v.setdefault(name, np.zeros_like(g))
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            blocks[name] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class RMSProp:
    def __init__(self, lr=1e-3, rho=0.9, eps=1e-8):
        self.lr, self.rho, self.eps = lr, rho, eps
        self.v = {}

    def step(self, blocks, grads, skip=()):
        for name, g in grads.items():
            if name in skip:
                continue
            v = self.v.setdefault(name, np.zeros_like(g))
            v *= self.rho
            v += (1.0 - self.rho) * g * g
            blocks[name] -= self.lr * g / (np.sqrt(v) + self.eps)


def make_optimizer(config: NeuralTrainConfig):
    if config.optimizer == "adam":
        return Adam(config.learning_rate)
    return RMSProp(config.learning_rate)


def clip_gradients(grads, max_norm):
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm > 0:
        for g in grads.values():
            g *= max_norm / total
    return total


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float | None
    val_acc: float | None

    def as_line(self) -> str:
        def f(x):
            return "nan" if x is None else format(x, ".6f")
        return f"{self.epoch}\t{f(self.train_loss)}\t{f(self.val_loss)}\t{f(self.val_acc)}"


def format_history(history) -> str:
    return "".join(r.as_line() + "\n" for r in history)


def evaluate_batches(params: NeuralTaggerParams, sentences, batch_size: int):
    """Token-weighted mean cross-entropy and accuracy over ``sentences``."""
    total_loss = 0.0
    correct = n = 0
    for start in range(0, len(sentences), batch_size):
        batch = make_batch(params, sentences[start:start + batch_size])
        probs = forward_tagger(params, batch)
        rows, cols = np.nonzero(batch.mask)
        gold = batch.gold[rows, cols]
        total_loss -= np.log(np.maximum(probs[rows, cols, gold], 1e-300)).sum()
        correct += int((np.argmax(probs[rows, cols], axis=1) == gold).sum())
        n += len(rows)
    return total_loss / n, correct / n


def train_neural(train: Dataset, config: NeuralTrainConfig | None = None,
                 arch: Architecture | None = None, embeddings: EmbeddingTable | None = None):
    """Train a tagger; returns ``(params, history)``.

    Sentences are shuffled once with the seed and the trailing
    ``validation_fraction`` is held out.  The returned parameters are those of
    the epoch with the lowest validation loss (the last epoch when nothing is
    held out).
    """
    config = config or NeuralTrainConfig()
    arch = arch or Architecture()
    if len(train.sentences) == 0:
        raise ValueError("training set is empty")
    if not train.is_gold_tagged():
        raise ValueError("training set has tokens without gold tags")
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(train.sentences))
    shuffled = [train.sentences[i] for i in order]
    n_train = int(len(shuffled) * (1.0 - config.validation_fraction))
    n_train = max(n_train, 1)
    fit, held = shuffled[:n_train], shuffled[n_train:]
    words = [w for s in fit for w in s.forms]
    params = init_params(arch, train.tagset, words, embeddings, config.seed,
                         config.freeze_word_embeddings)
    optimizer = make_optimizer(config)
    skip = () if params.word_trainable else ("word_emb",)
    history = []
    best, best_loss = None, math.inf
    for epoch in range(1, config.epochs + 1):
        perm = rng.permutation(n_train)
        loss_sum = 0.0
        correct = n_tok = 0
        for start in range(0, n_train, config.batch_size):
            batch = make_batch(params, [fit[i] for i in perm[start:start + config.batch_size]])
            loss, grads, probs = loss_and_gradients(params, batch, return_probs=True)
            rows, cols = np.nonzero(batch.mask)
            correct += int((np.argmax(probs[rows, cols], axis=1) == batch.gold[rows, cols]).sum())
            if config.clip_norm:
                clip_gradients(grads, config.clip_norm)
            optimizer.step(params.blocks, grads, skip)
            loss_sum += loss * batch.n_real
            n_tok += batch.n_real
        val_loss = val_acc = None
        if held:
            val_loss, val_acc = evaluate_batches(params, held, config.batch_size)
        record = EpochRecord(epoch, loss_sum / n_tok, correct / n_tok, val_loss, val_acc)
        history.append(record)
        log.info("epoch %d train_loss %.4f train_acc %.4f val_loss %s val_acc %s", epoch,
                 record.train_loss, record.train_acc, val_loss, val_acc)
        if held and val_loss < best_loss:
            best_loss = val_loss
            best = params.copy()
    if best is None:
        best = params
    return best.freeze(), history
