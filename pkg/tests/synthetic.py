"""Synthetic tagged languages with known structure."""
import numpy as np

from kantag.corpus import Dataset, Sentence, Token

SUFFIXES = {"N": ["ana", "u"], "V": ["isi", "ide"], "ADJ": ["ada"], "ADV": ["age"]}
_CONSONANTS = list("kgcjtdnpbmyrlvsh")
_VOWELS = list("aeiou")


def make_stems(rng, n):
    stems = set()
    while len(stems) < n:
        syllables = rng.integers(1, 3)
        stems.add("".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables)))
    stems = sorted(stems)
    rng.shuffle(stems)
    return stems


def suffix_sentences(rng, stems, n_sentences, min_len=4, max_len=8):
    out = []
    tags = list(SUFFIXES)
    for _ in range(n_sentences):
        toks = []
        for _ in range(rng.integers(min_len, max_len + 1)):
            tag = tags[rng.integers(len(tags))]
            sfx = SUFFIXES[tag][rng.integers(len(SUFFIXES[tag]))]
            toks.append(Token(stems[rng.integers(len(stems))] + sfx, tag))
        out.append(Sentence(tuple(toks)))
    return out


def suffix_language(seed, n_train=600, n_test=150, n_stems=400):
    """Tag is a function of the suffix; train and test stems are disjoint."""
    rng = np.random.default_rng(seed)
    stems = make_stems(rng, n_stems)
    cut = int(0.75 * n_stems)
    train = Dataset(tuple(suffix_sentences(rng, stems[:cut], n_train)))
    test = Dataset(tuple(suffix_sentences(rng, stems[cut:], n_test)), train.tagset)
    return train, test


def context_language(seed, n_train=300, n_test=100):
    """Ambiguous markers whose tag depends only on the identity of the next word.

    Phrases are ``det noun``, ``verb`` or ``marker noun``.  Marker words are
    tagged MA before nouns from the first noun class and MB before nouns from
    the second; both noun classes share the tag N, so neither the marker's own
    features nor the tag transitions can separate MA from MB.
    """
    rng = np.random.default_rng(seed)
    dets = ["da", "di", "do"]
    verbs = ["hogu", "baru", "nodu", "maadu"]
    markers = ["mar", "mor", "mir"]
    nouns_a = ["kalla", "mara", "kere", "bele", "hoova"]
    nouns_b = ["beTTa", "nadi", "ooru", "haadi", "gaaLi"]

    def pick(xs):
        return xs[rng.integers(len(xs))]

    def sentence():
        toks = []
        for _ in range(rng.integers(2, 5)):
            kind = rng.integers(3)
            if kind == 0:
                toks += [Token(pick(dets), "D"), Token(pick(nouns_a + nouns_b), "N")]
            elif kind == 1:
                toks.append(Token(pick(verbs), "V"))
            else:
                if rng.random() < 0.5:
                    toks += [Token(pick(markers), "MA"), Token(pick(nouns_a), "N")]
                else:
                    toks += [Token(pick(markers), "MB"), Token(pick(nouns_b), "N")]
        return Sentence(tuple(toks))

    train = Dataset(tuple(sentence() for _ in range(n_train)))
    test = Dataset(tuple(sentence() for _ in range(n_test)), train.tagset)
    return train, test


def history_language(seed, n_sentences=200):
    """Every word is one of a few ambiguous forms; the tag cycles A -> B -> C -> A."""
    rng = np.random.default_rng(seed)
    cycle = {"A": "B", "B": "C", "C": "A"}
    out = []
    for _ in range(n_sentences):
        tag = "A"
        toks = []
        for _ in range(rng.integers(3, 9)):
            toks.append(Token(["wa", "wb"][rng.integers(2)], tag))
            tag = cycle[tag]
        out.append(Sentence(tuple(toks)))
    return Dataset(tuple(out))


def token_accuracy(gold: Dataset, predicted) -> float:
    """``predicted`` is a list of tag-label lists aligned with ``gold``."""
    correct = total = 0
    for s, tags in zip(gold.sentences, predicted):
        for t, p in zip(s, tags):
            correct += t.gold_tag == p
            total += 1
    return correct / total


TINY_SENTENCES = [
    (["ab", "ca", "b"], ["X", "Y", "Z"]),
    (["bca", "ab"], ["Y", "X"]),
    (["c", "ab", "ab", "ba"], ["Z", "X", "X", "Y"]),
]


def tiny_neural(kind="bilstm", use_word=True, use_char=True, freeze=False, seed=0):
    """Small double-precision tagger (< 200 parameters) and a padded gold batch.

    The batch contains an unseen word and an unseen character.
    """
    from kantag.neural import Architecture, init_params, make_batch

    sents = [Sentence.from_forms(w, t) for w, t in TINY_SENTENCES]
    ds = Dataset(tuple(sents))
    arch = Architecture(kind=kind, use_word=use_word, use_char=use_char, word_dim=2,
                        char_dim=2, char_hidden=1, char_out=2, hidden=2)
    words = [w for s in sents for w in s.forms]
    params = init_params(arch, ds.tagset, words, seed=seed, freeze_word_embeddings=freeze)
    rng = np.random.default_rng(seed + 100)
    for b in params.blocks.values():
        # move biases and the forget offset off their initial symmetric values
        b += rng.normal(scale=0.3, size=b.shape)
    probe = sents + [Sentence.from_forms(["zq", "ab"], ["X", "Z"])]
    return params, make_batch(params, probe)
