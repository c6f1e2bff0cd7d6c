"""Corpus BLEU and chrF, numerically compatible with sacreBLEU defaults
(13a tokenisation, exp smoothing; chrF n=6, beta=2, no word n-grams), plus
ingestion of externally computed segment scores such as COMET.

BLEU
    precision_n = 100 * clipped matches / hypothesis n-grams, n = 1..4. When an
    order has zero matches, exp smoothing substitutes 100 / (2^k * total_n),
    k counting zero-match orders so far. score = 100 * BP * exp(mean(log(p_n / 100))),
    BP = exp(1 - ref_len / hyp_len) if hyp_len < ref_len else 1.
chrF
    Character n-gram counts (whitespace removed) are summed over the corpus per
    order. Precision and recall are averaged over orders where both sides have
    n-grams, then combined as F_beta * 100.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .errors import MetricError

MAX_NGRAM_ORDER = 4

# 13a rules, applied in order
_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),  # ASCII symbols
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),  # period/comma not after a digit
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),  # period/comma not before a digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),  # dash after a digit
]


def tokenize_13a(text: str) -> list[str]:
    return list(_tokenize_13a(text))


@lru_cache(maxsize=2**16)
def _tokenize_13a(text: str) -> tuple[str, ...]:
    line = text.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in line:
        line = (
            line.replace("&quot;", '"').replace("&amp;", "&").replace("&lt;", "<").replace("&gt;", ">")
        )
    line = f" {line} "
    for pattern, repl in _13A_RULES:
        line = pattern.sub(repl, line)
    return tuple(line.split())


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    counts: tuple[int, ...] = ()
    totals: tuple[int, ...] = ()


@dataclass(frozen=True)
class ChrfScore:
    score: float
    char_order: int = 6
    beta: float = 2.0


def _check_lengths(hyps: Sequence[str], refs: Sequence[str], allow_empty: bool = False) -> None:
    if len(hyps) != len(refs):
        raise MetricError(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps and not allow_empty:
        raise MetricError("empty corpus")


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -9999999999.0


def bleu_corpus(hyps: Sequence[str], refs: Sequence[str]) -> BleuScore:
    _check_lengths(hyps, refs)
    correct = [0] * MAX_NGRAM_ORDER
    total = [0] * MAX_NGRAM_ORDER
    hyp_len = ref_len = 0
    for hyp, ref in zip(hyps, refs):
        h = _tokenize_13a(hyp.rstrip())
        r = _tokenize_13a(ref.rstrip())
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, MAX_NGRAM_ORDER + 1):
            hc, rc = _ngrams(h, n), _ngrams(r, n)
            correct[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
            total[n - 1] += max(0, len(h) - n + 1)

    if hyp_len < ref_len:
        bp = math.exp(1 - ref_len / hyp_len) if hyp_len > 0 else 0.0
    else:
        bp = 1.0
    precisions = [0.0] * MAX_NGRAM_ORDER
    if not any(correct):
        return BleuScore(0.0, tuple(precisions), bp, hyp_len, ref_len, tuple(correct), tuple(total))

    halvings = 1.0
    for n in range(MAX_NGRAM_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            halvings *= 2
            precisions[n] = 100.0 / (halvings * total[n])
        else:
            precisions[n] = 100.0 * correct[n] / total[n]
    # log of the fraction, not the percentage, so a perfect match is exactly 100
    score = 100.0 * bp * math.exp(sum(_log(p / 100.0) for p in precisions) / MAX_NGRAM_ORDER)
    return BleuScore(score, tuple(precisions), bp, hyp_len, ref_len, tuple(correct), tuple(total))


def _char_ngrams(text: str, order: int) -> list[Counter]:
    text = "".join(text.split())
    return [Counter(text[i : i + n] for i in range(len(text) - n + 1)) for n in range(1, order + 1)]


def chrf_corpus(
    hyps: Sequence[str], refs: Sequence[str], char_order: int = 6, beta: float = 2.0
) -> ChrfScore:
    _check_lengths(hyps, refs)
    # per order: [hyp n-grams, ref n-grams, matches]
    stats = [[0, 0, 0] for _ in range(char_order)]
    for hyp, ref in zip(hyps, refs):
        for s, hc, rc in zip(stats, _char_ngrams(hyp, char_order), _char_ngrams(ref, char_order)):
            s[0] += sum(hc.values())
            s[1] += sum(rc.values())
            s[2] += sum(min(c, rc[g]) for g, c in hc.items())

    factor = beta**2
    avg_prec = avg_rec = 0.0
    effective = 0
    for n_hyp, n_ref, n_match in stats:
        if n_hyp > 0 and n_ref > 0:
            avg_prec += n_match / n_hyp
            avg_rec += n_match / n_ref
            effective += 1
    if effective:
        avg_prec /= effective
        avg_rec /= effective
    if avg_prec + avg_rec == 0:
        return ChrfScore(0.0, char_order, beta)
    score = 100 * (1 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)
    return ChrfScore(score, char_order, beta)


@dataclass(frozen=True)
class SegmentScores:
    scores: tuple[float, ...]
    provenance: str = ""

    @property
    def mean(self) -> float:
        return sum(self.scores) / len(self.scores) if self.scores else float("nan")

    def __len__(self) -> int:
        return len(self.scores)


def ingest_segment_scores(path: str | Path, expected_len: int | None = None) -> SegmentScores:
    """One real per line, in sample order (e.g. COMET output)."""
    scores = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                scores.append(float(line))
            except ValueError:
                raise MetricError(f"{path}:{lineno}: non-numeric score {line.strip()!r}") from None
    if expected_len is not None and len(scores) != expected_len:
        raise MetricError(f"{path}: {len(scores)} scores for a {expected_len}-sentence run")
    return SegmentScores(tuple(scores), str(path))
