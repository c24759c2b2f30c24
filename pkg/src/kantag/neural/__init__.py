"""Recurrent taggers over word vectors and character-composed word vectors."""
from .embeddings import EmbeddingTable, load_embeddings, oov_vector, read_embeddings
from .io import dumps_neural, loads_neural
from .tagger import (Architecture, Batch, NeuralTaggerParams, compose_word_vector, forward_tagger,
                     init_params, loss_and_gradients, make_batch, predict_indices,
                     tag_sentence_neural)
from .train import PRESETS, NeuralTrainConfig, format_history, train_neural

__all__ = [
    "Architecture", "Batch", "EmbeddingTable", "NeuralTaggerParams", "NeuralTrainConfig",
    "PRESETS", "compose_word_vector", "dumps_neural", "forward_tagger", "format_history",
    "init_params", "load_embeddings", "loads_neural", "loss_and_gradients", "make_batch",
    "oov_vector", "predict_indices", "read_embeddings", "tag_sentence_neural", "train_neural",
]
