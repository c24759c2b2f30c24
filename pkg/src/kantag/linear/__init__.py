"""Feature-based taggers: CRF, averaged structured perceptron, history SVM."""
from .chain import forward_backward, forward_log_partition, path_score, viterbi
from .crf import crf_loss_and_gradient, train_crf
from .history import hinge_subgradient, train_history_classifier
from .model import (HistoryClassifierModel, LinearChainModel, TrainConfig, dumps_model,
                    loads_model, tag_indices, tag_sentence)
from .perceptron import perceptron_update, train_structured_perceptron

__all__ = [
    "HistoryClassifierModel", "LinearChainModel", "TrainConfig", "crf_loss_and_gradient",
    "dumps_model", "forward_backward", "forward_log_partition", "hinge_subgradient",
    "loads_model", "path_score", "perceptron_update", "tag_indices", "tag_sentence",
    "train_crf", "train_history_classifier", "train_structured_perceptron", "viterbi",
]
