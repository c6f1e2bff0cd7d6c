import json
import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slow_ads.errors import MetricError
from slow_ads.metrics import bleu_corpus, chrf_corpus, ingest_segment_scores, tokenize_13a

GOLDEN = json.loads((Path(__file__).parent / "data" / "golden" / "golden.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("text", sorted(GOLDEN["tokenize_13a"]))
def test_tokenizer_matches_reference(text):
    assert tokenize_13a(text) == GOLDEN["tokenize_13a"][text]


@pytest.mark.parametrize("name", sorted(GOLDEN["pairs"]))
def test_small_pairs_match_reference(name):
    hyps, refs = GOLDEN["pair_inputs"][name]
    want = GOLDEN["pairs"][name]
    bleu = bleu_corpus(hyps, refs)
    assert bleu.score == pytest.approx(want["bleu"], abs=1e-9)
    assert list(bleu.precisions) == pytest.approx(want["precisions"], abs=1e-9)
    assert (bleu.hyp_len, bleu.ref_len) == (want["sys_len"], want["ref_len"])
    assert bleu.brevity_penalty == pytest.approx(want["bp"])
    assert chrf_corpus(hyps, refs).score == pytest.approx(want["chrf"], abs=1e-9)


def test_identity_short_corpus_follows_reference():
    # without any 4-gram the reference scorer reports 0 even for a perfect match
    assert bleu_corpus(["the cat"], ["the cat"]).score == 0.0
    assert chrf_corpus(["the cat"], ["the cat"]).score == 100.0


def test_identity_and_bp():
    s = bleu_corpus(["the cat sat on the mat"], ["the cat sat on the mat"])
    assert s.score == 100.0 and s.brevity_penalty == 1.0


def test_brevity_penalty_applies():
    s = bleu_corpus(["the cat sat on"], ["the cat sat on the mat"])
    assert s.brevity_penalty == pytest.approx(math.exp(1 - 6 / 4))


def test_disjoint_chrf_is_zero():
    assert chrf_corpus(["abc"], ["xyz"]).score == 0.0


def test_empty_hypothesis():
    assert bleu_corpus([""], ["the cat sat on the mat"]).score == 0.0
    assert chrf_corpus([""], ["abc"]).score == 0.0


def test_length_errors():
    with pytest.raises(MetricError):
        bleu_corpus(["a"], ["a", "b"])
    with pytest.raises(MetricError):
        chrf_corpus([], [])


_text = st.text(alphabet="abc xyz.,-", max_size=30)


@given(st.lists(st.tuples(_text, _text), min_size=1, max_size=6))
def test_scores_bounded(pairs):
    hyps, refs = map(list, zip(*pairs))
    for score in (bleu_corpus(hyps, refs).score, chrf_corpus(hyps, refs).score):
        assert 0.0 <= score <= 100.0 + 1e-9


def test_ingest(tmp_path):
    p = tmp_path / "comet.txt"
    p.write_text("0.5\n0.7\n", encoding="utf-8")
    assert ingest_segment_scores(p, 2).mean == pytest.approx(0.6)
    p.write_text("0.5\n0.7\n0.1\n", encoding="utf-8")
    with pytest.raises(MetricError, match="3 scores"):
        ingest_segment_scores(p, 2)
    p.write_text("0.5\nabc\n", encoding="utf-8")
    with pytest.raises(MetricError, match=":2:"):
        ingest_segment_scores(p)
