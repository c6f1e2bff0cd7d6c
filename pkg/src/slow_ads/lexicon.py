"""Per-sentence bilingual dictionaries: construction prompt, response parser,
PoS tagging and a JSONL store.

Every entry is pivoted on English: ``surface`` is the word in the non-English
sentence and ``gloss`` its English meaning. For X->X pairs the target-language
word sharing that English gloss is kept in ``rendering``.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .corpus import ENGLISH, ParallelCorpus
from .errors import (
    DictionaryFormatError,
    DictionaryParseError,
    EmptyDictionaryError,
    SlowAdsError,
    StoreError,
)
from .text import norm_token, strip_punct

log = logging.getLogger(__name__)

UPOS_TAGS = (
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
)

Pair = tuple[str, str]


@dataclass(frozen=True)
class DictEntry:
    surface: str
    gloss: str
    pos: str = "X"
    origin_index: int = 0
    rendering: str | None = None

    def __post_init__(self):
        if not self.surface.strip() or not self.gloss.strip():
            raise ValueError(f"empty surface or gloss in {self!r}")
        if self.pos not in UPOS_TAGS:
            raise ValueError(f"unknown PoS tag {self.pos!r}")


@dataclass(frozen=True)
class SentenceDictionary:
    pair: Pair
    sentence_index: int
    entries: tuple[DictEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "pair", tuple(self.pair))
        object.__setattr__(self, "entries", tuple(self.entries))
        if sorted(e.origin_index for e in self.entries) != list(range(len(self.entries))):
            raise ValueError("origin_index values must be 0..len-1 and unique")

    def __len__(self) -> int:
        return len(self.entries)


DICT_PROMPT = (
    "(1) Please provide the translation of the given English sentence into {language}, "
    "along with a word-for-word dictionary for each word.\n"
    "(2) The output format must be strictly followed: \n"
    "1. Start with `English:' followed by the English sentence. \n"
    "2. On the next line, start with `{language}:' followed by the {language} translation. \n"
    "3. On the next line, start with `dictionary:' followed by each word in the {language} "
    "sentence, annotated with its English meaning in parentheses, separated by spaces.\n"
    "(3) Now generate translations for the following sentence: \n"
    "English: {english}\n"
    "{language}: {source}\n"
    "dictionary:"
)


def build_dict_prompt(english_sentence: str, source_sentence: str, language_name: str) -> str:
    if not language_name.strip():
        raise ValueError("empty language name")
    if not english_sentence.strip() or not source_sentence.strip():
        raise ValueError("empty sentence")
    return DICT_PROMPT.format(
        language=language_name, english=english_sentence, source=source_sentence
    )


MARKER = "dictionary:"


def _payload(text: str) -> tuple[str, int]:
    lines = text.splitlines(keepends=True)
    offset, anchor = 0, None
    for line in lines:
        stripped = line.lstrip()
        if stripped[: len(MARKER)].lower() == MARKER:
            anchor = offset + (len(line) - len(stripped)) + len(MARKER)
        offset += len(line)
    if anchor is None:
        raise DictionaryFormatError("response has no 'dictionary:' line")
    return text[anchor:], anchor


def parse_dictionary_block(text: str) -> list[tuple[str, str]]:
    """Parse ``surface (gloss)`` units following the last ``dictionary:`` line.

    Glosses may nest parentheses; text after the last unit that has no gloss is
    ignored. Offsets in errors are relative to ``text``.
    """
    payload, base = _payload(text)
    units: list[tuple[str, str]] = []
    depth = 0
    start = 0  # start of current surface (depth 0) or gloss (depth >= 1)
    surface = ""
    open_at = 0
    for i, ch in enumerate(payload):
        if ch == "(":
            if depth == 0:
                surface = payload[start:i].strip()
                if not surface:
                    raise DictionaryParseError("gloss without a surface word", base + i)
                open_at, start = i, i + 1
            depth += 1
        elif ch == ")":
            if depth == 0:
                raise DictionaryParseError("unbalanced ')'", base + i)
            depth -= 1
            if depth == 0:
                gloss = payload[start:i].strip()
                if not gloss:
                    raise DictionaryParseError("empty gloss", base + open_at)
                units.append((surface, gloss))
                start = i + 1
    if depth:
        raise DictionaryParseError("unbalanced '('", base + open_at)
    if payload[start:].strip():
        log.debug("ignoring trailing text without gloss: %r", payload[start:].strip())
    if not units:
        raise EmptyDictionaryError("no 'surface (gloss)' units found")
    return units


def format_dictionary_line(units: Iterable[tuple[str, str]]) -> str:
    return MARKER + " " + " ".join(f"{s} ({g})" for s, g in units)


def load_pos_lexicon(path: str | Path) -> dict[str, str]:
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                word, tag = line.split("\t")
            except ValueError:
                raise SlowAdsError(f"{path}:{lineno}: expected 'word<TAB>TAG'") from None
            tag = tag.strip().upper()
            if tag not in UPOS_TAGS:
                raise SlowAdsError(f"{path}:{lineno}: unknown tag {tag!r}")
            lexicon[word.strip().casefold()] = tag
    return lexicon


def bundled_pos_lexicon_path() -> Path:
    """English UPoS lexicon exported from the Brill tagger lexicon (see scripts/)."""
    return Path(str(resources.files("slow_ads") / "data" / "en_upos.tsv"))


def tag_gloss(gloss: str, pos_lexicon: Mapping[str, str]) -> str:
    tokens = gloss.split()
    head = strip_punct(tokens[0]) or tokens[0]
    tag = pos_lexicon.get(head.casefold())
    if tag is not None:
        return tag
    if len(tokens) == 1 and head[:1].isupper():
        return "PROPN"
    return "X"


def tag_entries(
    entries: Iterable[DictEntry | tuple[str, str]], pos_lexicon: Mapping[str, str]
) -> list[DictEntry]:
    tagged = []
    for i, entry in enumerate(entries):
        if isinstance(entry, DictEntry):
            surface, gloss, rendering = entry.surface, entry.gloss, entry.rendering
        else:
            (surface, gloss), rendering = entry, None
        tagged.append(DictEntry(surface, gloss, tag_gloss(gloss, pos_lexicon), i, rendering))
    return tagged


def join_on_gloss(
    source: Sequence[DictEntry], target: Sequence[DictEntry]
) -> list[DictEntry]:
    """Attach target-language renderings to source entries via the English gloss.

    Keys are the case-folded first gloss token; each target entry is used once,
    in origin order. Unmatched source entries keep ``rendering=None``.
    """
    pool: dict[str, list[DictEntry]] = {}
    for t in target:
        pool.setdefault(norm_token(t.gloss.split()[0]), []).append(t)
    joined = []
    for e in source:
        bucket = pool.get(norm_token(e.gloss.split()[0]))
        rendering = bucket.pop(0).surface if bucket else None
        joined.append(DictEntry(e.surface, e.gloss, e.pos, e.origin_index, rendering))
    return joined


def construct_dictionaries(
    corpus: ParallelCorpus,
    pair: Pair,
    language_names: Mapping[str, str],
    complete_many: Callable[[list[str]], list],
    pos_lexicon: Mapping[str, str] | None = None,
) -> list[SentenceDictionary]:
    """Build one dictionary per corpus row for ``pair``.

    ``complete_many`` maps prompts to responses (or exceptions, for failed
    calls). A row whose response cannot be parsed gets an empty dictionary.
    """
    src, tgt = pair
    pos_lexicon = pos_lexicon or {}
    english = corpus[ENGLISH]

    def side(lang: str) -> list[list[DictEntry]]:
        prompts = [
            build_dict_prompt(en, other, language_names[lang])
            for en, other in zip(english, corpus[lang])
        ]
        out = []
        for i, response in enumerate(complete_many(prompts)):
            try:
                if isinstance(response, BaseException):
                    raise response
                out.append(tag_entries(parse_dictionary_block(response), pos_lexicon))
            except SlowAdsError as exc:
                log.warning("%s sentence %d: no dictionary (%s)", lang, corpus.indices[i], exc)
                out.append([])
        return out

    if src == ENGLISH:
        per_row = side(tgt)
    elif tgt == ENGLISH:
        per_row = side(src)
    else:
        per_row = [join_on_gloss(s, t) for s, t in zip(side(src), side(tgt))]
    return [
        SentenceDictionary(pair, idx, entries)
        for idx, entries in zip(corpus.indices, per_row)
    ]


def _entry_from_json(obj: dict) -> DictEntry:
    return DictEntry(
        obj["surface"], obj["gloss"], obj.get("pos", "X"),
        int(obj["origin_index"]), obj.get("rendering"),
    )


def dictionary_to_json(d: SentenceDictionary) -> dict:
    return {
        "pair": list(d.pair),
        "sentence_index": d.sentence_index,
        "entries": [asdict(e) for e in d.entries],
    }


def dictionary_from_json(obj: dict) -> SentenceDictionary:
    return SentenceDictionary(
        tuple(obj["pair"]),
        int(obj["sentence_index"]),
        tuple(_entry_from_json(e) for e in obj["entries"]),
    )


def store_dictionaries(dicts: Iterable[SentenceDictionary], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for d in dicts:
            f.write(json.dumps(dictionary_to_json(d), ensure_ascii=False) + "\n")


def load_dictionaries(path: str | Path) -> list[SentenceDictionary]:
    dicts = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                dicts.append(dictionary_from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise StoreError(f"{path}:{lineno}: malformed dictionary record ({exc})") from None
    return dicts
