import pytest

from conftest import make_dict
from slow_ads.errors import EmptyResponseError, SlowAdsError
from slow_ads.lexicon import DictEntry
from slow_ads.prompt import (
    RESPONSE_MARKER,
    build_translation_prompt,
    language_name,
    load_language_names,
    parse_translation_response,
    render_entry,
)
from slow_ads.select import full_select, vanilla_select

PAIR = ("zsm_Latn", "eng_Latn")


def test_dictionary_prompt():
    d = make_dict(["cat", "sat", "the"], surfaces=["kucing", "duduk", "itu"])
    p = build_translation_prompt("Standard Malay", "English", "Kucing itu duduk.", full_select(d), PAIR, 4)
    assert RESPONSE_MARKER in p.text
    assert p.entry_count == 3 and p.sentence_index == 4
    lines = [ln for ln in p.text.splitlines() if " (" in ln and ln.endswith(")")]
    assert lines == ["kucing (cat)", "duduk (sat)", "itu (the)"]


def test_vanilla_prompt():
    p = build_translation_prompt("Standard Malay", "English", "Kucing itu duduk.", vanilla_select(), PAIR)
    assert "dictionar" not in p.text
    assert p.text == "Translate the following sentence from Standard Malay into English: Kucing itu duduk."
    assert p.entry_count == 0


def test_render_directions():
    e = DictEntry("kucing", "cat", "NOUN", 0, None)
    assert render_entry(e, ("zsm_Latn", "eng_Latn")) == "kucing (cat)"
    assert render_entry(e, ("eng_Latn", "zsm_Latn")) == "cat (kucing)"
    assert render_entry(e, ("zsm_Latn", "ind_Latn")) == "kucing (cat)"
    assert render_entry(DictEntry("kucing", "cat", "X", 0, "kucing2"), ("zsm_Latn", "ind_Latn")) == "kucing (kucing2)"


def test_empty_names_rejected():
    with pytest.raises(ValueError):
        build_translation_prompt("", "English", "x", vanilla_select())


@pytest.mark.parametrize("text, expected, marked", [
    ("The refined translation is: Kucing itu duduk.", "Kucing itu duduk.", True),
    ('Sure!\nThe refined translation is:\n"X"', "X", True),
    ("Kucing itu duduk.", "Kucing itu duduk.", False),
    ("Your output format is as follows:\nThe refined translation is:\nThe refined translation is: «Y»", "Y", True),
    ("The refined translation is:", "", True),
])
def test_parse_response(text, expected, marked):
    r = parse_translation_response(text)
    assert (r.translation, r.marked) == (expected, marked)


def test_parse_empty_response():
    with pytest.raises(EmptyResponseError):
        parse_translation_response(" \n")


def test_language_names(tmp_path):
    names = load_language_names()
    assert language_name(names, "zsm_Latn") == "Standard Malay"
    assert language_name(names, "eng_Latn") == "English"
    with pytest.raises(SlowAdsError, match="qqq_Latn"):
        language_name(names, "qqq_Latn")
    p = tmp_path / "names.tsv"
    p.write_text("abc_Latn\n", encoding="utf-8")
    with pytest.raises(SlowAdsError, match=":1:"):
        load_language_names(p)
