import numpy as np
import pytest

from kantag.errors import ContractError, ParseError
from kantag.features import FeatureTemplateConfig
from kantag.linear import (TrainConfig, dumps_model, loads_model, tag_sentence, train_crf,
                           train_history_classifier, train_structured_perceptron)

from synthetic import suffix_language


@pytest.fixture(scope="module")
def data():
    return suffix_language(7, n_train=40, n_test=10, n_stems=80)


@pytest.mark.parametrize("trainer", [train_crf, train_structured_perceptron,
                                     train_history_classifier])
def test_round_trip(data, trainer):
    train, test = data
    model = trainer(train, FeatureTemplateConfig(window=1, use_bigrams=True),
                    TrainConfig(epochs=2))
    text = dumps_model(model)
    back = loads_model(text)
    assert back.kind == model.kind and back.config == model.config
    assert back.tagset == model.tagset
    assert dumps_model(back) == text
    for s in test.sentences:
        assert tag_sentence(back, s) == tag_sentence(model, s)


def test_exact_weights(data):
    model = train_crf(data[0], tc=TrainConfig(epochs=1))
    back = loads_model(dumps_model(model))
    assert np.array_equal(back.emission_weights, model.emission_weights)
    assert np.array_equal(back.transition_weights, model.transition_weights)


def test_bad_files(data):
    text = dumps_model(train_crf(data[0], tc=TrainConfig(epochs=1)))
    with pytest.raises(ParseError):
        loads_model(text.replace("#version 1", "#version 2", 1))
    with pytest.raises((ParseError, ContractError)) as err:
        loads_model(text.replace("model\tcrf", "model\tbogus"))
    assert "model" in str(err.value)
    # drop a tag line: feature/tag table no longer consistent
    lines = text.split("\n")
    cut = [l for l in lines if not l.startswith("tag\t0\t")]
    with pytest.raises((ParseError, ContractError)):
        loads_model("\n".join(cut))
