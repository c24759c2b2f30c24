import math

import numpy as np
import pytest

from kantag.corpus import Dataset, Sentence
from kantag.features import FeatureTemplateConfig, build_dictionary
from kantag.linear import LinearChainModel, TrainConfig, tag_sentence, train_crf
from kantag.linear.chain import forward_backward
from kantag.linear.crf import crf_loss_and_gradient, nll_and_gradient, prepare_instances

from oracles import central_difference, relative_error
from synthetic import suffix_language, token_accuracy

TINY_CFG = FeatureTemplateConfig(prefix_max_len=0, suffix_max_len=1, window=0)


def tiny_problem(seed=0):
    """3 tags, 4 features -> 12 emission + 16 transition = 28 parameters."""
    sents = [Sentence.from_forms(["ab", "cb", "ca"], ["X", "Y", "Z"]),
             Sentence.from_forms(["ca", "ab"], ["Z", "X"])]
    ds = Dataset(tuple(sents))
    cfg = FeatureTemplateConfig(prefix_max_len=0, suffix_max_len=0, window=0,
                                length_threshold=5)
    d = build_dictionary(ds, cfg)
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(len(d), 3))
    Tr = rng.normal(size=(4, 4))
    return prepare_instances(ds.sentences, cfg, d, ds.tagset), W, Tr


@pytest.mark.parametrize("l2", [0.0, 0.3])
def test_gradient_finite_differences(l2):
    inst, W, Tr = tiny_problem()
    assert W.size + Tr.size <= 30
    _, gW, gT = nll_and_gradient(W, Tr, inst, l2)

    def f():
        return nll_and_gradient(W, Tr, inst, l2)[0]

    assert relative_error(gW, central_difference(f, W, 1e-6)).max() < 1e-5
    assert relative_error(gT, central_difference(f, Tr, 1e-6)).max() < 1e-5


def test_zero_weights_loss_is_log_k_per_token():
    inst, W, Tr = tiny_problem()
    loss, _, _ = nll_and_gradient(np.zeros_like(W), np.zeros_like(Tr), inst)
    # uniform over K^T paths
    assert loss == pytest.approx(5 * math.log(3))


def test_l2_dominates_pulls_to_zero():
    inst, W, Tr = tiny_problem()
    big = 1e8
    _, gW, gT = nll_and_gradient(W, Tr, inst, big)
    np.testing.assert_allclose(gW / big, W, atol=1e-6)
    np.testing.assert_allclose(gT / big, Tr, atol=1e-6)


def test_model_level_loss_accepts_labels():
    train, _ = suffix_language(1, n_train=20, n_test=5, n_stems=40)
    model = train_crf(train, TINY_CFG, TrainConfig(epochs=1))
    s = train.sentences[0]
    a = crf_loss_and_gradient(model, [(s, s.gold_tags)])
    b = crf_loss_and_gradient(model, [(s.forms, [model.tagset.index(t) for t in s.gold_tags])])
    assert a[0] == pytest.approx(b[0])


def test_marginals_sum_to_one_on_trained_model():
    train, _ = suffix_language(2, n_train=30, n_test=5, n_stems=40)
    model = train_crf(train, FeatureTemplateConfig(), TrainConfig(epochs=2))
    for s in train.sentences[:10]:
        _, node, _ = forward_backward(model.emissions(s.forms), model.transition_weights)
        np.testing.assert_allclose(node.sum(axis=1), 1.0, atol=1e-12)


def test_full_batch_objective_decreases():
    train, _ = suffix_language(3, n_train=40, n_test=5, n_stems=60)
    model = train_crf(train, TINY_CFG, TrainConfig(epochs=8, full_batch=True, learning_rate=0.5))
    h = model.history
    assert all(b < a for a, b in zip(h, h[1:]))


def test_separable_toy_fits():
    train, test = suffix_language(4, n_train=200, n_test=50)
    model = train_crf(train, FeatureTemplateConfig(), TrainConfig(epochs=20))
    assert token_accuracy(train, [tag_sentence(model, s) for s in train.sentences]) >= 0.99
    assert token_accuracy(test, [tag_sentence(model, s) for s in test.sentences]) >= 0.99


def test_seed_determinism():
    train, _ = suffix_language(5, n_train=40, n_test=5, n_stems=60)
    a = train_crf(train, TINY_CFG, TrainConfig(epochs=3, seed=9))
    b = train_crf(train, TINY_CFG, TrainConfig(epochs=3, seed=9))
    assert np.array_equal(a.emission_weights, b.emission_weights)
    assert np.array_equal(a.transition_weights, b.transition_weights)


def test_rejects_untagged_or_empty():
    with pytest.raises(ValueError):
        train_crf(Dataset(()))
    with pytest.raises(ValueError):
        train_crf(Dataset((Sentence.from_forms(["a"]),)))


def test_trained_weights_are_read_only():
    train, _ = suffix_language(6, n_train=10, n_test=2, n_stems=20)
    model = train_crf(train, TINY_CFG, TrainConfig(epochs=1))
    assert isinstance(model, LinearChainModel)
    with pytest.raises(ValueError):
        model.emission_weights[0, 0] = 1.0
