"""English Zipf-frequency lookup used as the rarity estimate for dictionary entries.

Zipf is log10 of occurrences per billion tokens, so values live in [0, 9].
Unknown words get ``default_zipf`` (0.0 unless configured), which makes them
the rarest candidates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import FreqTableError
from .text import strip_punct

ZIPF_MIN, ZIPF_MAX = 0.0, 9.0


def _check_range(value: float, where: str) -> float:
    if not ZIPF_MIN <= value <= ZIPF_MAX:
        raise FreqTableError(f"{where}: zipf {value} outside [0, 9]")
    return value


@dataclass(frozen=True)
class FrequencyTable:
    entries: dict[str, float] = field(default_factory=dict)
    default_zipf: float = 0.0

    def __post_init__(self):
        _check_range(self.default_zipf, "default_zipf")
        for word, value in self.entries.items():
            if word != word.casefold() or not word or any(c.isspace() for c in word):
                raise FreqTableError(f"key {word!r} is not case-folded or contains whitespace")
            _check_range(value, word)

    def __len__(self) -> int:
        return len(self.entries)

    def zipf(self, word: str) -> float:
        return zipf(self, word)

    def phrase_zipf(self, phrase: str) -> float:
        return phrase_zipf(self, phrase)


def load_freq_table(path: str | Path, default_zipf: float = 0.0) -> FrequencyTable:
    entries: dict[str, float] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FreqTableError(f"{path}:{lineno}: expected 'word<TAB>zipf'")
            word, value_text = parts[0].strip().casefold(), parts[1].strip()
            try:
                value = float(value_text)
            except ValueError:
                raise FreqTableError(f"{path}:{lineno}: non-numeric zipf {value_text!r}") from None
            _check_range(value, f"{path}:{lineno}")
            if not word or any(c.isspace() for c in word):
                raise FreqTableError(f"{path}:{lineno}: bad word {parts[0]!r}")
            if value > entries.get(word, -1.0):
                entries[word] = value
    return FrequencyTable(entries, default_zipf)


def bundled_table_path() -> Path:
    """English table exported from the ``wordfreq`` package (see scripts/)."""
    return Path(str(resources.files("slow_ads") / "data" / "en_zipf.tsv"))


def zipf(table: FrequencyTable, word: str) -> float:
    if not word:
        raise ValueError("empty word")
    return table.entries.get(word.casefold(), table.default_zipf)


def phrase_zipf(table: FrequencyTable, phrase: str) -> float:
    # a phrase is as rare as its rarest token; edge punctuation is ignored
    tokens = phrase.split()
    if not tokens:
        raise ValueError("empty phrase")
    words = [strip_punct(t) for t in tokens]
    words = [w for w in words if w]
    if not words:
        return table.default_zipf
    return min(zipf(table, w) for w in words)
