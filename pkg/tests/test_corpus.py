import pytest
from hypothesis import given
from hypothesis import strategies as st

from slow_ads.corpus import ParallelCorpus, check_code, load_corpus, sample, sample_indices
from slow_ads.errors import AlignmentError, CorpusError


def _write(d, code, lines, trailing="\n"):
    (d / f"{code}.devtest").write_text("\n".join(lines) + trailing, encoding="utf-8")


def test_load_three_lines(tmp_path):
    _write(tmp_path, "eng_Latn", ["a", "b", "c"])
    _write(tmp_path, "zsm_Latn", ["x", "y", "z"])
    c = load_corpus(tmp_path, ["eng_Latn", "zsm_Latn"])
    assert len(c) == 3
    assert c["zsm_Latn"] == ["x", "y", "z"]
    assert c.indices == [0, 1, 2]


def test_missing_file_names_language(tmp_path):
    _write(tmp_path, "eng_Latn", ["a"])
    with pytest.raises(AlignmentError, match="zsm_Latn"):
        load_corpus(tmp_path, ["eng_Latn", "zsm_Latn"])


def test_unequal_lengths(tmp_path):
    _write(tmp_path, "eng_Latn", ["a", "b", "c"])
    _write(tmp_path, "zsm_Latn", ["a", "b", "c", "d"])
    with pytest.raises(AlignmentError, match="unequal"):
        load_corpus(tmp_path, ["eng_Latn", "zsm_Latn"])


def test_blank_interior_line_rejected(tmp_path):
    _write(tmp_path, "eng_Latn", ["a", "", "c"])
    with pytest.raises(CorpusError, match="blank line 2"):
        load_corpus(tmp_path, ["eng_Latn"])


def test_no_trailing_newline_and_crlf(tmp_path):
    (tmp_path / "eng_Latn.devtest").write_bytes(b"a\r\nb")
    assert load_corpus(tmp_path, ["eng_Latn"])["eng_Latn"] == ["a", "b"]


def test_filename_override(tmp_path):
    (tmp_path / "english.txt").write_text("hello\n", encoding="utf-8")
    c = load_corpus(tmp_path, ["eng_Latn"], {"eng_Latn": "english.txt"})
    assert c["eng_Latn"] == ["hello"]


@pytest.mark.parametrize("code", ["eng", "ENG_Latn", "eng_latn", "eng-Latn"])
def test_bad_codes(code):
    with pytest.raises(CorpusError):
        check_code(code)


def _corpus(n):
    return ParallelCorpus({"eng_Latn": [f"e{i}" for i in range(n)], "zsm_Latn": [f"z{i}" for i in range(n)]})


def test_full_sample_is_identity():
    c = _corpus(6)
    s = sample(c, 6, seed=3)
    assert s.sentences == c.sentences and s.indices == c.indices


def test_empty_sample_keeps_languages():
    s = sample(_corpus(6), 0, seed=3)
    assert len(s) == 0 and s.langs == ["eng_Latn", "zsm_Latn"]


def test_sample_deterministic():
    assert sample_indices(10, 4, 42) == sample_indices(10, 4, 42)


def test_sample_too_large():
    with pytest.raises(CorpusError):
        sample(_corpus(3), 4, 0)


@given(st.integers(0, 40), st.data())
def test_sample_keeps_rows_aligned(n, data):
    c = _corpus(n)
    k = data.draw(st.integers(0, n))
    s = sample(c, k, data.draw(st.integers()))
    assert len(s) == k
    assert s.indices == sorted(set(s.indices))
    for row, idx in enumerate(s.indices):
        assert s["eng_Latn"][row] == f"e{idx}" and s["zsm_Latn"][row] == f"z{idx}"
    # resampling a sample keeps the original line numbers
    if k:
        assert set(sample(s, 1, 0).indices) <= set(s.indices)
