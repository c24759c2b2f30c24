import numpy as np
import pytest

from kantag.corpus import Sentence
from kantag.errors import ParseError
from kantag.features import (BOS, EOS, FeatureDictionary, FeatureTemplateConfig,
                             build_dictionary, extract_token_features, token_atomic_features,
                             vectorize)

ASHTE = "ಅಷ್ಟೇ"   # ಅ ಷ ್ ಟ ೇ


def test_ashte_prefixes_and_length():
    feats = token_atomic_features(ASHTE)
    assert {"p1=ಅ", "p2=ಅಷ", "p3=ಅಷ್", "len=MORE"} <= set(feats)


def test_ashte_code_point_suffixes():
    assert len(ASHTE) == 5
    feats = token_atomic_features(ASHTE)
    suffixes = [f for f in feats if f.startswith("s")]
    assert suffixes == ["s1=ೇ", "s2=ಟೇ", "s3=್ಟೇ", "s4=ಷ್ಟೇ"]


def test_short_word_omits_long_affixes():
    assert token_atomic_features("ab") == ["w=ab", "p1=a", "p2=ab", "s1=b", "s2=ab", "len=LESS"]


def test_length_threshold_boundary():
    assert "len=LESS" in token_atomic_features("abc")
    assert "len=MORE" in token_atomic_features("abcd")


def test_window_one_hand_enumeration():
    cfg = FeatureTemplateConfig(prefix_max_len=1, suffix_max_len=1)
    got = extract_token_features(["xa", "yb", "zc"], 1, cfg)
    expected = {
        "w=yb", "p1=y", "s1=b", "len=LESS",
        "[-1]w=xa", "[-1]p1=x", "[-1]s1=a", "[-1]len=LESS",
        "[+1]w=zc", "[+1]p1=z", "[+1]s1=c", "[+1]len=LESS",
    }
    assert set(got) == expected and len(got) == len(expected)


def test_boundaries_only_word_feature():
    got = extract_token_features(["solo"], 0, FeatureTemplateConfig(window=2))
    assert "[-1]w=" + BOS in got and "[-2]w=" + BOS in got
    assert "[+1]w=" + EOS in got and "[+2]w=" + EOS in got
    assert not any(f.startswith("[-1]p") or f.startswith("[+2]s") for f in got)


def test_ngrams():
    cfg = FeatureTemplateConfig(window=1, use_bigrams=True, use_trigrams=True)
    got = extract_token_features(["a", "b", "c"], 0, cfg)
    assert f"bg[-1]={BOS}_a" in got and "bg[+0]=a_b" in got
    assert f"tg[-1]={BOS}_a_b" in got
    cfg0 = FeatureTemplateConfig(window=0, use_bigrams=True, use_trigrams=True)
    assert not any(f.startswith(("bg", "tg")) for f in extract_token_features(["a", "b"], 0, cfg0))


@pytest.mark.parametrize("i", [0, 1, 2, 3])
def test_wider_window_is_superset(i):
    words = ["ಅವನು", "ಮನೆಗೆ", "ಬಂದ", "."]
    narrow = set(extract_token_features(words, i, FeatureTemplateConfig(window=1)))
    wide = set(extract_token_features(words, i, FeatureTemplateConfig(window=2)))
    zero = set(extract_token_features(words, i, FeatureTemplateConfig(window=0)))
    assert zero <= narrow <= wide


def test_accepts_sentence():
    s = Sentence.from_forms(["a", "b"], ["N", "V"])
    assert extract_token_features(s, 0) == extract_token_features(["a", "b"], 0)


def test_out_of_range_position():
    with pytest.raises(ValueError):
        extract_token_features(["a"], 1)


@pytest.mark.parametrize("bad", [dict(window=3), dict(window=-1), dict(prefix_max_len=-1)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        FeatureTemplateConfig(**bad)


def test_config_text_round_trip():
    cfg = FeatureTemplateConfig(window=2, use_bigrams=True)
    text = cfg.to_text()
    assert "use_bigrams = true" in text
    assert FeatureTemplateConfig.from_text(text) == cfg


def test_dictionary_first_seen_and_frozen():
    d = FeatureDictionary(["b", "a", "b"])
    assert len(d) == 2 and d["b"] == 0 and d["a"] == 1
    d.freeze()
    with pytest.raises(Exception):
        d.add("c")
    assert d.get("c") is None


def test_dictionary_text_round_trip():
    d = FeatureDictionary(["w=x", "p1=ಅ", "[-1]w=<BOS>"]).freeze()
    text = d.to_text()
    assert text.startswith("#version 1\n")
    assert FeatureDictionary.from_text(text) == d
    with pytest.raises(ParseError):
        FeatureDictionary.from_text(text.replace("#version 1", "#version 9"))


def test_build_dictionary_and_vectorize():
    s = Sentence.from_forms(["ab", "cd"], ["N", "V"])
    cfg = FeatureTemplateConfig(window=0)
    d = build_dictionary([s], cfg)
    vecs = vectorize(["ab", "zz"], cfg, d)
    assert [d.name(i) for i in vecs[0]] == sorted(
        token_atomic_features("ab", cfg), key=lambda f: d[f])
    # unknown word keeps only shared features
    assert {d.name(i) for i in vecs[1]} == {"len=LESS"}
    assert all(np.all(np.diff(v) > 0) for v in vecs)


def test_build_dictionary_empty():
    with pytest.raises(ValueError):
        build_dictionary([], FeatureTemplateConfig())
