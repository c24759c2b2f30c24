import numpy as np
import pytest

from kantag.errors import ParseError
from kantag.neural import EmbeddingTable, load_embeddings, oov_vector


def test_header_file():
    t = load_embeddings("2 3\na 1 0 0\nb 0 1 0\n")
    assert (len(t), t.dim) == (2, 3)
    np.testing.assert_array_equal(t.lookup("b"), [0, 1, 0])


def test_no_header_infers_dim():
    t = load_embeddings("a 1 2\nb 3 4\n")
    assert (len(t), t.dim) == (2, 2)


def test_duplicates_keep_first():
    lines = [f"w{i} {i} 0" for i in range(97)] + ["w0 9 9", "w5 9 9", "w96 9 9"]
    t = load_embeddings("\n".join(lines) + "\n")
    assert len(t) == 97 and t.duplicates == 3
    np.testing.assert_array_equal(t.lookup("w5"), [5, 0])


def test_bad_rows_report_line():
    with pytest.raises(ParseError) as err:
        load_embeddings("a 1 2\nb 1 2 3\n")
    assert err.value.line == 2
    with pytest.raises(ParseError) as err:
        load_embeddings("2 2\na 1 2\nb 1 x\n")
    assert err.value.line == 3
    with pytest.raises((ParseError, ValueError)):
        load_embeddings("a 1 2\n", expected_dim=3)


def test_oov_vectors_seeded():
    v = oov_vector("ಮನೆ", 8, seed=3)
    assert np.array_equal(v, oov_vector("ಮನೆ", 8, seed=3))
    assert not np.array_equal(v, oov_vector("ಮನೆ", 8, seed=4))
    assert not np.array_equal(v, oov_vector("ಮರ", 8, seed=3))
    assert np.all(np.abs(v) <= 0.1)


def test_extend_and_random():
    t = EmbeddingTable.random(["a", "b", "a"], 4, seed=1)
    assert t.vocab == {"a": 0, "b": 1}
    assert t.extend(["b", "c"]) == 1
    np.testing.assert_array_equal(t.lookup("c"), oov_vector("c", 4, 1))
    np.testing.assert_array_equal(t.lookup("zz"), oov_vector("zz", 4, 1))
