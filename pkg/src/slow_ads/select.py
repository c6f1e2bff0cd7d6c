"""Dictionary selection strategies under a per-sentence word budget.

Every strategy except Vanilla and Full returns exactly ``min(v, len(dict))``
entries. Frequency-ranked strategies keep their sorted order; all others keep
the dictionary's origin order.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import ENGLISH
from .errors import SlowAdsError
from .freq import FrequencyTable, phrase_zipf
from .lexicon import UPOS_TAGS, DictEntry, SentenceDictionary
from .text import norm_token, token_set

KINDS = ("vanilla", "full", "slow", "highfreq", "pos", "differ-rt", "differ-tr", "random")
# strategies whose output is forced to the sentence budget
BUDGETED = ("slow", "highfreq", "pos", "differ-rt", "differ-tr", "random")


class StrategyError(SlowAdsError):
    pass


@dataclass(frozen=True)
class Strategy:
    kind: str
    tags: frozenset[str] = field(default_factory=frozenset)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise StrategyError(f"unknown strategy {self.kind!r}")
        if self.kind == "pos":
            if not self.tags:
                raise StrategyError("pos strategy needs at least one tag")
            bad = sorted(set(self.tags) - set(UPOS_TAGS))
            if bad:
                raise StrategyError(f"invalid PoS tag(s): {', '.join(bad)}")
        elif self.tags:
            raise StrategyError(f"{self.kind} takes no tags")
        object.__setattr__(self, "tags", frozenset(self.tags))

    @property
    def name(self) -> str:
        if self.kind == "pos":
            return "pos:" + ",".join(t for t in UPOS_TAGS if t in self.tags)
        return self.kind


def parse_strategy(text: str, seed: int = 0) -> Strategy:
    """``slow``, ``pos:NOUN,ADJ``, ``differ-rt`` ... -> Strategy."""
    kind, _, rest = text.strip().partition(":")
    kind = kind.lower()
    tags = frozenset(t.strip().upper() for t in rest.split(",") if t.strip())
    if kind != "pos" and rest:
        raise StrategyError(f"{kind} takes no arguments")
    return Strategy(kind, tags, seed)


@dataclass(frozen=True)
class Budget:
    v: int
    source: str = "measured"  # or "fixed"

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("budget must be >= 0")
        if self.source not in ("measured", "fixed"):
            raise ValueError(f"unknown budget source {self.source!r}")


@dataclass(frozen=True)
class Selection:
    entries: tuple[DictEntry, ...]
    strategy: Strategy
    v: int | None = None

    @property
    def budget_used(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


VANILLA = Strategy("vanilla")


def _ranked(d: SentenceDictionary, table: FrequencyTable, descending: bool) -> list[DictEntry]:
    keyed = [(phrase_zipf(table, e.gloss), e.origin_index, e) for e in d.entries]
    if descending:
        keyed.sort(key=lambda t: (-t[0], t[1]))
    else:
        keyed.sort(key=lambda t: (t[0], t[1]))
    return [e for _, _, e in keyed]


def slow_select(d: SentenceDictionary, table: FrequencyTable, v: int) -> Selection:
    """Lowest English-gloss frequency first; ties by origin index."""
    if v < 0:
        raise ValueError("budget must be >= 0")
    return Selection(tuple(_ranked(d, table, False)[:v]), Strategy("slow"), v)


def high_freq_select(d: SentenceDictionary, table: FrequencyTable, v: int) -> Selection:
    if v < 0:
        raise ValueError("budget must be >= 0")
    return Selection(tuple(_ranked(d, table, True)[:v]), Strategy("highfreq"), v)


def align_budget(
    selected: Sequence[DictEntry],
    d: SentenceDictionary,
    v: int,
    seed: int | str,
    strategy: Strategy = VANILLA,
) -> Selection:
    """Randomly drop or pad ``selected`` to ``min(v, len(d))`` entries."""
    rng = random.Random(seed)
    chosen = list(selected)
    if len(chosen) > v:
        keep = sorted(rng.sample(range(len(chosen)), v))
        chosen = [chosen[i] for i in keep]
    elif len(chosen) < v:
        taken = {e.origin_index for e in chosen}
        pool = [e for e in d.entries if e.origin_index not in taken]
        k = min(v, len(d)) - len(chosen)
        chosen += rng.sample(pool, k)
    chosen.sort(key=lambda e: e.origin_index)
    return Selection(tuple(chosen), strategy, v)


def pos_select(
    d: SentenceDictionary, tagset: Iterable[str], v: int, seed: int | str = 0
) -> Selection:
    strategy = Strategy("pos", frozenset(tagset))
    matches = [e for e in d.entries if e.pos in strategy.tags]
    return align_budget(matches, d, v, seed, strategy)


def random_select(d: SentenceDictionary, v: int, seed: int | str = 0) -> Selection:
    return align_budget([], d, v, seed, Strategy("random"))


def full_select(d: SentenceDictionary) -> Selection:
    return Selection(d.entries, Strategy("full"), len(d))


def vanilla_select(d: SentenceDictionary | None = None) -> Selection:
    return Selection((), VANILLA, 0)


def source_side(entry: DictEntry, pair: tuple[str, str]) -> str | None:
    """The entry's text in the pair's source language."""
    return entry.gloss if pair[0] == ENGLISH else entry.surface


def target_side(entry: DictEntry, pair: tuple[str, str]) -> str | None:
    """The entry's text in the pair's target language (None if unknown)."""
    if pair[1] == ENGLISH:
        return entry.gloss
    if pair[0] == ENGLISH:
        return entry.surface
    return entry.rendering


def _differ(entries: Iterable[tuple[DictEntry, str | None]], present: str, absent: str):
    lost = token_set(present) - token_set(absent)
    picked = []
    for entry, text in entries:
        if text and any(norm_token(t) in lost for t in text.split()):
            picked.append(entry)
    return tuple(picked)


def differ_roundtrip_select(
    source_sentence: str, roundtrip_sentence: str, d: SentenceDictionary
) -> Selection:
    """Entries whose source-language word is lost in the round trip.

    The size of the result is the measured budget for this sentence.
    """
    picked = _differ(
        ((e, source_side(e, d.pair)) for e in d.entries), source_sentence, roundtrip_sentence
    )
    return Selection(picked, Strategy("differ-rt"), len(picked))


def differ_translation_select(
    model_translation: str, reference_target: str, d: SentenceDictionary
) -> Selection:
    """Entries whose target-language word the reference has and the model missed."""
    picked = _differ(
        ((e, target_side(e, d.pair)) for e in d.entries), reference_target, model_translation
    )
    return Selection(picked, Strategy("differ-tr"), len(picked))


@dataclass(frozen=True)
class SentenceContext:
    """Texts the Differ strategies need for one sentence."""

    source: str = ""
    roundtrip: str = ""
    translation: str = ""
    reference: str = ""


def select(
    strategy: Strategy,
    d: SentenceDictionary,
    v: int,
    table: FrequencyTable | None = None,
    context: SentenceContext | None = None,
    seed: int | str = 0,
) -> Selection:
    """Apply ``strategy`` to one dictionary, aligned to budget ``v``."""
    kind = strategy.kind
    if kind == "vanilla":
        return vanilla_select(d)
    if kind == "full":
        return full_select(d)
    if kind in ("slow", "highfreq"):
        if table is None:
            raise StrategyError(f"{kind} needs a frequency table")
        sel = slow_select(d, table, v) if kind == "slow" else high_freq_select(d, table, v)
        return Selection(sel.entries, strategy, v)
    if kind == "pos":
        return align_budget([e for e in d.entries if e.pos in strategy.tags], d, v, seed, strategy)
    if kind == "random":
        return align_budget([], d, v, seed, strategy)
    if context is None:
        raise StrategyError(f"{kind} needs sentence context")
    if kind == "differ-rt":
        raw = differ_roundtrip_select(context.source, context.roundtrip, d)
    else:
        raw = differ_translation_select(context.translation, context.reference, d)
    return align_budget(raw.entries, d, v, seed, strategy)


@dataclass(frozen=True)
class PosStat:
    percentage: float  # share of all selected entries, in percent
    coverage: float  # selected / total entries with this tag, in percent


def compute_pos_stats(
    selections: Sequence[Selection], dicts: Sequence[SentenceDictionary]
) -> dict[str, PosStat]:
    if len(selections) != len(dicts):
        raise ValueError("selections and dictionaries are not aligned")
    chosen = Counter(e.pos for s in selections for e in s.entries)
    total = Counter(e.pos for d in dicts for e in d.entries)
    n_chosen = sum(chosen.values())
    return {
        tag: PosStat(
            100.0 * chosen[tag] / n_chosen if n_chosen else 0.0,
            100.0 * chosen[tag] / total[tag] if total[tag] else 0.0,
        )
        for tag in UPOS_TAGS
    }
