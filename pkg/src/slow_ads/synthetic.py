"""A tiny deterministic world for offline end-to-end runs.

Synthetic languages are ciphers of English: a word is reversed and tagged with
a language suffix (``cat`` -> ``tacaa`` in ``xaa_Latn``). The mock model knows
every word whose English Zipf score reaches ``KNOWN_ZIPF``; words below it are
dropped from its translations unless the prompt's dictionary covers them. That
makes round-trip losses line up with the rarity ranking the way the real
pipeline assumes.
"""
from __future__ import annotations

import json
import random
import re
from pathlib import Path

from .corpus import ENGLISH
from .llm import MockBackend

KNOWN_ZIPF = 4.0

VOCAB = {
    "DET": {"the": 7.73, "a": 7.36},
    "ADP": {"near": 5.29, "with": 6.85, "from": 6.63, "into": 6.11, "at": 6.70},
    "ADJ": {
        "old": 5.75, "big": 5.67, "small": 5.51, "new": 6.25, "green": 5.13, "quiet": 4.65,
        "ancient": 4.68, "bright": 4.61, "heavy": 4.96, "obsidian": 2.62,
    },
    "NOUN": {
        "house": 5.71, "water": 5.52, "city": 5.61, "river": 5.03, "family": 5.66,
        "market": 5.29, "bridge": 4.77, "street": 5.28, "child": 5.30,
        "lighthouse": 3.55, "glacier": 3.58, "archipelago": 3.33, "saxophone": 3.15,
        "meteorite": 3.20, "tundra": 3.08, "quill": 3.11, "marsh": 3.87, "orchard": 3.57,
        "lantern": 3.61, "bakery": 3.67, "ocelot": 2.21, "cartographer": 2.35,
        "pangolin": 2.40, "falconer": 2.05,
    },
    "VERB": {"walked": 4.67, "saw": 5.34, "found": 5.68, "carried": 4.77, "painted": 4.12},
}

ZIPF = {w: z for words in VOCAB.values() for w, z in words.items()}
POS = {w: tag for tag, words in VOCAB.items() for w in words}

LANGUAGES = {
    ENGLISH: "English",
    "xaa_Latn": "Synthetic Aa",
    "xbb_Latn": "Synthetic Bb",
    "xcc_Latn": "Synthetic Cc",
}
DEFAULT_PAIRS = [(ENGLISH, "xaa_Latn"), ("xbb_Latn", ENGLISH), ("xaa_Latn", "xcc_Latn")]


def encode(word: str, lang: str) -> str:
    return word if lang == ENGLISH else word[::-1] + lang[1:3]


def decode(token: str, lang: str) -> str | None:
    if lang == ENGLISH:
        return token if token in ZIPF else None
    suffix = lang[1:3]
    if not token.endswith(suffix):
        return None
    word = token[: -len(suffix)][::-1]
    return word if word in ZIPF else None


def english_sentences(n: int, seed: int = 0) -> list[str]:
    rng = random.Random(seed)
    pick = lambda tag: rng.choice(sorted(VOCAB[tag]))  # noqa: E731
    out = []
    for _ in range(n):
        words = [pick("DET"), pick("ADJ"), pick("NOUN"), pick("VERB"), pick("DET"), pick("NOUN")]
        if rng.random() < 0.7:
            words += [pick("ADP"), pick("DET"), pick("ADJ"), pick("NOUN")]
        out.append(" ".join(words))
    return out


def write_world(root: str | Path, n: int = 5, seed: int = 0) -> dict[str, Path]:
    """Write corpus, frequency table, PoS lexicon and language names under ``root``."""
    root = Path(root)
    corpus = root / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    english = english_sentences(n, seed)
    for lang in LANGUAGES:
        lines = [" ".join(encode(w, lang) for w in s.split()) for s in english]
        (corpus / f"{lang}.devtest").write_text("\n".join(lines) + "\n", encoding="utf-8")
    freq = root / "freq.tsv"
    freq.write_text("# word\tzipf\n" + "".join(f"{w}\t{z}\n" for w, z in sorted(ZIPF.items())), "utf-8")
    pos = root / "pos.tsv"
    pos.write_text("".join(f"{w}\t{t}\n" for w, t in sorted(POS.items())), "utf-8")
    names = root / "language_names.tsv"
    names.write_text("".join(f"{c}\t{n}\n" for c, n in LANGUAGES.items()), "utf-8")
    return {"corpus": corpus, "freq": freq, "pos_lexicon": pos, "language_names": names}


_NAME_TO_CODE = {name: code for code, name in LANGUAGES.items()}

_DICT_BUILD = re.compile(r"\nEnglish: (?P<en>[^\n]*)\n(?P<lang>[^\n:]+): (?P<src>[^\n]*)\ndictionary:$")
_WITH_DICT = re.compile(
    r"^Translate the following sentence from (?P<s>[^\n]+) to (?P<t>[^\n]+)\.\n(?P<sent>[^\n]*)\n"
    r".*?focus on:\n(?P<dict>.*)\nNote: "
    , re.DOTALL,
)
_VANILLA = re.compile(r"^Translate the following sentence from (?P<s>.+?) into (?P<t>.+?): (?P<sent>.*)$", re.DOTALL)
_HINT = re.compile(r"(\S+) \(([^()]*)\)")


def _build_dictionary(m: re.Match) -> str:
    lang = _NAME_TO_CODE[m["lang"]]
    units = [f"{encode(w, lang)} ({w})" for w in m["en"].split()]
    return f"English: {m['en']}\n{m['lang']}: {m['src']}\ndictionary: " + " ".join(units)


def _translate(sentence: str, src: str, tgt: str, hints: dict[str, str]) -> str:
    out = []
    for token in sentence.split():
        meaning = decode(token, src)
        if token in hints:
            hint = hints[token]
            meaning = decode(hint, tgt) or (hint if hint in ZIPF else meaning)
            if meaning is not None:
                out.append(encode(meaning, tgt))
                continue
        if meaning is not None and ZIPF[meaning] >= KNOWN_ZIPF:
            out.append(encode(meaning, tgt))
    return " ".join(out)


def _vanilla(m: re.Match) -> str:
    src, tgt = _NAME_TO_CODE.get(m["s"]), _NAME_TO_CODE.get(m["t"])
    if src is None or tgt is None:
        return f"The refined translation is: {m['sent']}"
    return "The refined translation is: " + _translate(m["sent"], src, tgt, {})


def _with_dict(m: re.Match) -> str:
    src, tgt = _NAME_TO_CODE[m["s"]], _NAME_TO_CODE[m["t"]]
    hints = dict(_HINT.findall(m["dict"]))
    return "Sure.\nThe refined translation is: " + _translate(m["sent"], src, tgt, hints)


def mock_rules():
    return [(_DICT_BUILD, _build_dictionary), (_WITH_DICT, _with_dict), (_VANILLA, _vanilla)]


def synthetic_backend() -> MockBackend:
    return MockBackend(mock_rules())


ALL_STRATEGIES = ["vanilla", "full", "slow", "highfreq", "pos:NOUN,ADJ,VERB", "differ-rt", "differ-tr", "random"]


def write_config(
    path: str | Path,
    world: dict[str, Path],
    out: str | Path,
    cache: str | Path,
    pairs=DEFAULT_PAIRS,
    strategies=ALL_STRATEGIES,
    seed: int = 0,
) -> Path:
    """Experiment config that runs the mock model over a written world."""
    path = Path(path)
    lines = [
        f"pairs = {json.dumps([f'{s}:{t}' for s, t in pairs])}",
        f"strategies = {json.dumps(list(strategies))}",
        f"seed = {seed}",
        'budget = "measured"',
        "thresholds = [1, 2, 3, 5]",
        "",
        "[paths]",
        f"corpus = {json.dumps(Path(world['corpus']).as_posix())}",
        f"freq = {json.dumps(Path(world['freq']).as_posix())}",
        f"pos_lexicon = {json.dumps(Path(world['pos_lexicon']).as_posix())}",
        f"language_names = {json.dumps(Path(world['language_names']).as_posix())}",
        f"out = {json.dumps(Path(out).as_posix())}",
        f"cache = {json.dumps(Path(cache).as_posix())}",
        "",
        "[llm]",
        'backend = "mock"',
        'mock = "synthetic"',
        'model_id = "synthetic-mock"',
        "",
    ]
    path.write_text("\n".join(lines), encoding="utf-8")
    return path
