import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_dict
from slow_ads.freq import FrequencyTable
from slow_ads.lexicon import DictEntry, SentenceDictionary
from slow_ads.select import (
    SentenceContext,
    Strategy,
    StrategyError,
    align_budget,
    compute_pos_stats,
    differ_roundtrip_select,
    differ_translation_select,
    full_select,
    high_freq_select,
    parse_strategy,
    pos_select,
    random_select,
    select,
    slow_select,
    vanilla_select,
)

ABC = FrequencyTable({"a": 5.1, "b": 2.3, "c": 3.7})


def _glosses(sel):
    return [e.gloss for e in sel.entries]


def test_slow_examples():
    d = make_dict(["a", "b", "c"])
    assert _glosses(slow_select(d, ABC, 2)) == ["b", "c"]
    assert slow_select(d, ABC, 0).entries == ()
    assert _glosses(slow_select(d, ABC, 9)) == ["b", "c", "a"]


def test_high_freq_examples():
    d = make_dict(["a", "b", "c"])
    assert _glosses(high_freq_select(d, ABC, 2)) == ["a", "c"]
    assert high_freq_select(d, ABC, 0).entries == ()


def test_ties_break_by_origin_index():
    d = make_dict(["x", "y", "z"])  # all unknown -> default zipf
    assert [e.origin_index for e in slow_select(d, ABC, 3).entries] == [0, 1, 2]
    assert [e.origin_index for e in high_freq_select(d, ABC, 3).entries] == [0, 1, 2]


def test_negative_budget():
    with pytest.raises(ValueError):
        slow_select(make_dict(["a"]), ABC, -1)


def test_pos_filter_and_padding():
    d = make_dict(["n1", "v", "n2", "adj"], tags=["NOUN", "VERB", "NOUN", "ADJ"])
    assert _glosses(pos_select(d, {"NOUN"}, 2, seed=1)) == ["n1", "n2"]
    padded = pos_select(d, {"INTJ"}, 2, seed=1)
    assert len(padded) == 2 and set(padded.entries) <= set(d.entries)
    assert pos_select(d, {"INTJ"}, 2, seed=1) == padded


def test_align_budget():
    d = make_dict([f"g{i}" for i in range(7)])
    five = d.entries[:5]
    assert align_budget(five, d, 5, 0).entries == five
    dropped = align_budget(d.entries, d, 5, 0)
    assert len(dropped) == 5 and set(dropped.entries) <= set(d.entries)
    small = make_dict(["a", "b", "c", "d"])
    assert len(align_budget(small.entries[:2], small, 5, 0)) == 4


@given(st.integers(0, 30), st.integers(0, 30), st.data())
def test_align_budget_properties(size, v, data):
    d = make_dict([f"g{i}" for i in range(size)])
    chosen = data.draw(st.sets(st.integers(0, max(size - 1, 0)), max_size=size)) if size else set()
    selected = [d.entries[i] for i in sorted(chosen)]
    sel = align_budget(selected, d, v, seed=data.draw(st.integers()))
    assert len(sel) == min(v, size)
    idx = [e.origin_index for e in sel.entries]
    assert idx == sorted(set(idx))
    if len(selected) >= v:
        assert set(sel.entries) <= set(selected)
    else:
        assert set(selected) <= set(sel.entries)


def test_differ_roundtrip_examples():
    d = make_dict(["ga", "gb", "gc"], surfaces=["a", "b", "c"])
    assert differ_roundtrip_select("a b c", "a b c", d).budget_used == 0
    sel = differ_roundtrip_select("a b c", "a c", d)
    assert [e.surface for e in sel.entries] == ["b"] and sel.budget_used == 1
    assert differ_roundtrip_select("A b, c", "a. B c!", d).entries == ()


def test_differ_roundtrip_english_source_uses_gloss():
    d = make_dict(["cat", "sat"], pair=("eng_Latn", "zsm_Latn"), surfaces=["kucing", "duduk"])
    assert _glosses(differ_roundtrip_select("The cat sat.", "The cat.", d)) == ["sat"]


def test_differ_translation_examples():
    d = make_dict(["presented", "cat"], surfaces=["membentangkan", "kucing"])
    assert differ_translation_select("He presented it", "He presented it", d).entries == ()
    sel = differ_translation_select("He introduced it", "He presented it", d)
    assert _glosses(sel) == ["presented"]
    assert differ_translation_select("a cat", "the cat", d).entries == ()


def test_differ_translation_xx_uses_rendering():
    entries = [DictEntry("s0", "cat", "X", 0, "tac"), DictEntry("s1", "dog", "X", 1, None)]
    d = SentenceDictionary(("xaa_Latn", "xbb_Latn"), 0, entries)
    assert [e.surface for e in differ_translation_select("", "tac god", d).entries] == ["s0"]


def test_strategy_parsing():
    s = parse_strategy("pos:verb,NOUN")
    assert s.name == "pos:NOUN,VERB"
    with pytest.raises(StrategyError, match="XYZ"):
        parse_strategy("pos:NOUN,XYZ")
    with pytest.raises(StrategyError):
        parse_strategy("slow:NOUN")
    with pytest.raises(StrategyError):
        parse_strategy("fancy")
    with pytest.raises(StrategyError):
        parse_strategy("pos")


def test_select_dispatch_respects_budget():
    d = make_dict(["a", "b", "c", "x"], surfaces=["sa", "sb", "sc", "sx"], tags=["NOUN"] * 4)
    ctx = SentenceContext(source="sa sb sc sx", roundtrip="sa", translation="", reference="a b c x")
    for text in ("slow", "highfreq", "pos:NOUN", "differ-rt", "differ-tr", "random"):
        sel = select(parse_strategy(text), d, 2, ABC, ctx, seed="k")
        assert sel.budget_used == 2 and sel.strategy.name == text
    assert select(Strategy("full"), d, 2).budget_used == 4
    assert select(Strategy("vanilla"), d, 2).budget_used == 0
    with pytest.raises(StrategyError):
        select(Strategy("slow"), d, 2)
    with pytest.raises(StrategyError):
        select(Strategy("differ-rt"), d, 2, ABC)


def test_random_select_deterministic():
    d = make_dict([f"g{i}" for i in range(20)])
    assert random_select(d, 5, "s") == random_select(d, 5, "s")
    assert full_select(d).budget_used == 20 and vanilla_select(d).budget_used == 0


def test_pos_stats():
    tags = ["NOUN", "NOUN", "VERB", "ADJ", "ADJ", "ADJ", "ADJ"]
    d = make_dict([f"g{i}" for i in range(len(tags))], tags=tags)
    sel = align_budget(d.entries[:4], d, 4, 0)
    stats = compute_pos_stats([sel], [d])
    assert stats["NOUN"].percentage == 50.0
    assert stats["ADJ"].coverage == 25.0
    assert stats["INTJ"].percentage == 0.0 and stats["INTJ"].coverage == 0.0
    assert sum(s.percentage for s in stats.values()) == pytest.approx(100.0)
