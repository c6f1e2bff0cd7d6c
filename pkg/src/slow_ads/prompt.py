"""Translation prompts and response parsing."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .corpus import ENGLISH
from .errors import EmptyResponseError, SlowAdsError
from .lexicon import DictEntry
from .select import Selection, Strategy

VANILLA_TEMPLATE = "Translate the following sentence from {source_language} into {target_language}: {origin_sentence}"

DICT_TEMPLATE = (
    "Translate the following sentence from {source_language} to {target_language}.\n"
    "{origin_sentence}\n"
    "Use the provided dictionary to clarify or improve the translation of any misaligned words.\n"
    "- Here are some dictionaries that you need to focus on:\n"
    "{dict}\n"
    "Note: Finally, only respond to me with the final {target_language} translation. "
    "Your output format is as follows:\n"
    "The refined translation is:"
)

RESPONSE_MARKER = "The refined translation is:"


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    pair: tuple[str, str]
    sentence_index: int
    strategy: Strategy
    entry_count: int


def render_entry(entry: DictEntry, pair: tuple[str, str]) -> str:
    """One dictionary line, source-language word first.

    X->En shows ``surface (gloss)``; En->X flips it to ``gloss (surface)``; X->X
    shows the target rendering when the pivot join found one, else the English gloss.
    """
    src, tgt = pair
    if src == ENGLISH and tgt != ENGLISH:
        return f"{entry.gloss} ({entry.surface})"
    if src != ENGLISH and tgt != ENGLISH and entry.rendering:
        return f"{entry.surface} ({entry.rendering})"
    return f"{entry.surface} ({entry.gloss})"


def build_translation_prompt(
    src_name: str,
    tgt_name: str,
    sentence: str,
    selection: Selection,
    pair: tuple[str, str] = ("und_Zzzz", ENGLISH),
    sentence_index: int = 0,
) -> RenderedPrompt:
    if not src_name.strip() or not tgt_name.strip():
        raise ValueError("language display names must be non-empty")
    if not selection.entries:
        text = VANILLA_TEMPLATE.format(
            source_language=src_name, target_language=tgt_name, origin_sentence=sentence
        )
    else:
        text = DICT_TEMPLATE.format(
            source_language=src_name,
            target_language=tgt_name,
            origin_sentence=sentence,
            dict="\n".join(render_entry(e, pair) for e in selection.entries),
        )
    return RenderedPrompt(text, tuple(pair), sentence_index, selection.strategy, len(selection.entries))


@dataclass(frozen=True)
class ParsedResponse:
    translation: str
    marked: bool


_QUOTES = "\"'“”‘’«»「」"


def parse_translation_response(text: str) -> ParsedResponse:
    """Take what follows the last marker; fall back to the whole response."""
    if not text or not text.strip():
        raise EmptyResponseError("empty model response")
    head, marker, tail = text.rpartition(RESPONSE_MARKER)
    body = tail if marker else text
    body = body.strip()
    while len(body) >= 2 and body[0] in _QUOTES and body[-1] in _QUOTES:
        body = body[1:-1].strip()
    return ParsedResponse(body, bool(marker))


def load_language_names(path: str | Path | None = None) -> dict[str, str]:
    """``code<TAB>display name`` table; the bundled FLORES subset by default."""
    if path is None:
        text = (resources.files("slow_ads") / "data" / "language_names.tsv").read_text("utf-8")
        source = "bundled language_names.tsv"
    else:
        text = Path(path).read_text(encoding="utf-8")
        source = str(path)
    names = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        code, sep, name = line.partition("\t")
        if not sep or not name.strip():
            raise SlowAdsError(f"{source}:{lineno}: expected 'code<TAB>name'")
        names[code.strip()] = name.strip()
    return names


def language_name(names: Mapping[str, str], code: str) -> str:
    try:
        return names[code]
    except KeyError:
        raise SlowAdsError(f"no display name for {code}; add it to the language-name table") from None
