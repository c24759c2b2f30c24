import numpy as np
import pytest

from kantag.corpus import Dataset, Sentence
from kantag.features import BOS, FeatureTemplateConfig
from kantag.linear import HistoryClassifierModel, TrainConfig, tag_sentence
from kantag.linear.history import hinge_loss, hinge_subgradient, train_history_classifier
from kantag.linear.model import greedy_decode
from kantag.errors import ContractError

from synthetic import history_language, suffix_language, token_accuracy


def test_hinge_hand_values():
    scores = np.array([0.5, -2.0, 0.2])
    # gold 0: 1-0.5 ; class 1 clears its margin ; class 2: 1+0.2
    assert hinge_loss(scores, 0) == pytest.approx(0.5 + 0.0 + 1.2)
    np.testing.assert_array_equal(hinge_subgradient(scores, 0), [-1.0, 0.0, 1.0])
    assert hinge_loss(np.array([2.0, -1.0]), 0) == 0.0
    np.testing.assert_array_equal(hinge_subgradient(np.array([2.0, -1.0]), 0), [0.0, 0.0])


def test_history_language():
    train = history_language(0)
    model = train_history_classifier(train)
    assert token_accuracy(train, [tag_sentence(model, s) for s in train.sentences]) >= 0.99


def test_suffix_language_generalises():
    train, test = suffix_language(3, n_train=200, n_test=50)
    model = train_history_classifier(train)
    assert token_accuracy(test, [tag_sentence(model, s) for s in test.sentences]) >= 0.95


def test_window_forced_to_two():
    train, _ = suffix_language(4, n_train=10, n_test=2, n_stems=20)
    model = train_history_classifier(train, FeatureTemplateConfig(window=0), TrainConfig(epochs=1))
    assert model.config.window == 2
    with pytest.raises(ContractError):
        HistoryClassifierModel("svm", np.zeros((len(model.dictionary), model.n_tags)),
                               model.tagset, model.dictionary, model.config.replace(window=1))


def test_first_token_sees_bos_history():
    train = history_language(1, n_sentences=5)
    model = train_history_classifier(train, tc=TrainConfig(epochs=1))
    ids = model.history_ids(BOS, BOS)
    names = {model.dictionary.name(i) for i in ids}
    assert names == {"bias", f"prev1={BOS}", f"prev2={BOS}"}


def test_zero_model_decodes_to_first_tag():
    train = history_language(2, n_sentences=5)
    model = train_history_classifier(train, tc=TrainConfig(epochs=1))
    zero = HistoryClassifierModel("svm", np.zeros_like(model.weights), model.tagset,
                                  model.dictionary, model.config)
    assert greedy_decode(zero, ["wa", "wb", "wa"]) == [0, 0, 0]


def test_unseen_words_still_tag():
    train = Dataset((Sentence.from_forms(["a", "b"], ["X", "Y"]),))
    model = train_history_classifier(train, tc=TrainConfig(epochs=3))
    assert len(tag_sentence(model, ["zzz", "q", "r"])) == 3
