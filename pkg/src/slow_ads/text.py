"""Token normalisation shared by frequency lookup and the Differ strategies."""
from __future__ import annotations

import unicodedata


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def norm_token(token: str) -> str:
    return strip_punct(token).casefold()


def token_set(sentence: str) -> set[str]:
    """Case-folded, punctuation-stripped whitespace tokens of ``sentence``."""
    return {t for t in map(norm_token, sentence.split()) if t}
