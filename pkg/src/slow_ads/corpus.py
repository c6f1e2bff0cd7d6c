"""FLORES-style parallel corpora: one ``<code>.devtest`` file per language,
aligned by line index."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import AlignmentError, CorpusError

ENGLISH = "eng_Latn"

_CODE_RE = re.compile(r"^[a-z]{3}_[A-Z][a-z]{3}$")


def check_code(code: str) -> str:
    if not _CODE_RE.match(code):
        raise CorpusError(f"invalid language code {code!r} (expected e.g. eng_Latn)")
    return code


@dataclass(frozen=True)
class ParallelCorpus:
    sentences: dict[str, list[str]]
    provenance: str = ""
    # original line index of each row, so samples stay addressable
    indices: list[int] = field(default_factory=list)

    def __post_init__(self):
        lengths = {code: len(lines) for code, lines in self.sentences.items()}
        if len(set(lengths.values())) > 1:
            raise AlignmentError(f"unequal corpus lengths: {lengths}")
        if not self.indices:
            object.__setattr__(self, "indices", list(range(self._length(lengths))))
        elif len(self.indices) != self._length(lengths):
            raise AlignmentError("index list does not match corpus length")

    @staticmethod
    def _length(lengths: Mapping[str, int]) -> int:
        return next(iter(lengths.values()), 0)

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def langs(self) -> list[str]:
        return list(self.sentences)

    def __getitem__(self, lang: str) -> list[str]:
        return self.sentences[lang]


def _read_lines(path: Path, code: str) -> list[str]:
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r")
        if not line.strip():
            raise CorpusError(f"{path}: blank line {lineno} for {code}")
    return [line.rstrip("\r") for line in lines]


def load_corpus(
    directory: str | Path,
    langs: Sequence[str],
    filenames: Mapping[str, str] | None = None,
) -> ParallelCorpus:
    """Load aligned sentences for ``langs`` from ``directory``.

    ``filenames`` overrides the default ``<code>.devtest`` name per code.
    """
    directory = Path(directory)
    filenames = filenames or {}
    sentences: dict[str, list[str]] = {}
    sources: dict[str, Path] = {}
    for code in langs:
        check_code(code)
        path = directory / filenames.get(code, f"{code}.devtest")
        if not path.is_file():
            raise AlignmentError(f"missing corpus file for {code}: {path}")
        sentences[code] = _read_lines(path, code)
        sources[code] = path
    if sentences:
        first = langs[0]
        for code in langs[1:]:
            if len(sentences[code]) != len(sentences[first]):
                raise AlignmentError(
                    f"unequal line counts: {sources[first]} has {len(sentences[first])}, "
                    f"{sources[code]} has {len(sentences[code])}"
                )
    return ParallelCorpus(sentences, provenance=str(directory))


def sample_indices(length: int, n: int, seed: int) -> list[int]:
    if not 0 <= n <= length:
        raise CorpusError(f"cannot sample {n} of {length} sentences")
    return sorted(random.Random(seed).sample(range(length), n))


def sample(corpus: ParallelCorpus, n: int, seed: int) -> ParallelCorpus:
    """Draw ``n`` rows without replacement, keeping original order."""
    keep = sample_indices(len(corpus), n, seed)
    return ParallelCorpus(
        {code: [lines[i] for i in keep] for code, lines in corpus.sentences.items()},
        provenance=corpus.provenance,
        indices=[corpus.indices[i] for i in keep],
    )
