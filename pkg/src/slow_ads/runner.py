"""Experiment orchestration: pairs x strategies over a sampled corpus, with the
per-sentence budget measured from the round-trip baseline, plus the summary
statistics (win/loss buckets, budget ratios, PoS shares) and report I/O.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import ENGLISH, check_code, load_corpus, sample
from .errors import ConfigError, SlowAdsError, StatsError
from .freq import FrequencyTable, bundled_table_path, load_freq_table
from .lexicon import (
    SentenceDictionary,
    bundled_pos_lexicon_path,
    construct_dictionaries,
    load_dictionaries,
    load_pos_lexicon,
    store_dictionaries,
)
from .llm import Backend, LlmClient, LlmConfig
from .metrics import bleu_corpus, chrf_corpus, ingest_segment_scores
from .prompt import build_translation_prompt, language_name, load_language_names, parse_translation_response
from .select import (
    BUDGETED,
    SentenceContext,
    Strategy,
    compute_pos_stats,
    differ_roundtrip_select,
    parse_strategy,
    select,
    vanilla_select,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger(__name__)

DIRECTIONS = ("EX", "XE", "XX")
METRICS = ("bleu", "chrf", "comet")


def direction_of(pair: tuple[str, str]) -> str:
    src, tgt = pair
    if src == tgt:
        raise ConfigError(f"source and target are both {src}")
    if src == ENGLISH:
        return "EX"
    if tgt == ENGLISH:
        return "XE"
    return "XX"


@dataclass(frozen=True)
class Paths:
    corpus: Path
    out: Path
    cache: Path
    dicts: Path | None = None
    freq: Path | None = None
    pos_lexicon: Path | None = None
    language_names: Path | None = None
    comet: Path | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    pairs: list[tuple[str, str]]
    strategies: list[Strategy]
    paths: Paths
    llm: LlmConfig = field(default_factory=LlmConfig)
    direction: str | None = None
    sample_n: int | None = None
    seed: int = 0
    fixed_v: int | None = None
    mock: str = "echo"
    baseline: str = "differ-rt"
    candidate: str = "slow"
    thresholds: tuple[float, ...] = (1.0, 2.0, 3.0, 5.0)
    max_failure_rate: float = 0.05

    def __post_init__(self):
        if not self.pairs:
            raise ConfigError("no language pairs configured")
        for pair in self.pairs:
            for code in pair:
                check_code(code)
            d = direction_of(pair)
            if self.direction is not None and d != self.direction:
                raise ConfigError(f"pair {pair[0]}:{pair[1]} is {d}, config direction is {self.direction}")
        if self.direction is not None and self.direction not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {DIRECTIONS}")
        if self.fixed_v is not None and self.fixed_v < 0:
            raise ConfigError("fixed_v must be >= 0")
        if self.mock not in ("echo", "synthetic"):
            raise ConfigError(f"unknown mock world {self.mock!r}")

    @property
    def budget_source(self) -> str:
        return "measured" if self.fixed_v is None else "fixed"


def parse_pair(text: str) -> tuple[str, str]:
    src, sep, tgt = text.partition(":")
    if not sep:
        raise ConfigError(f"pair {text!r} must look like src:tgt")
    return check_code(src.strip()), check_code(tgt.strip())


def load_config(path: str | Path, seed: int | None = None, cache_dir: str | Path | None = None) -> ExperimentConfig:
    """Read a TOML experiment config; relative paths resolve against its folder.

    ``seed`` and ``cache_dir``, when given, override the file.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.parent

    def p(value):
        if value is None:
            return None
        value = Path(value)
        return value if value.is_absolute() else base / value

    try:
        ps = dict(raw.get("paths", {}))
        for required in ("corpus", "out"):
            if required not in ps:
                raise ConfigError(f"{path}: [paths] needs '{required}'")
        if cache_dir is not None:
            ps["cache"] = cache_dir
        paths = Paths(
            corpus=p(ps["corpus"]),
            out=p(ps["out"]),
            cache=p(ps.get("cache", Path(ps["out"]) / "cache")),
            dicts=p(ps.get("dicts")),
            freq=p(ps.get("freq")),
            pos_lexicon=p(ps.get("pos_lexicon")),
            language_names=p(ps.get("language_names")),
            comet=p(ps.get("comet")),
        )
        llm_raw = dict(raw.get("llm", {}))
        mock = llm_raw.pop("mock", "echo")
        llm = LlmConfig(**llm_raw)
        run_seed = int(raw.get("seed", 0)) if seed is None else seed
        strategies = [parse_strategy(s, run_seed) for s in raw.get("strategies", ["vanilla", "slow"])]
        budget = raw.get("budget", "measured")
        fixed_v = None if budget == "measured" else int(budget)
        return ExperimentConfig(
            pairs=[parse_pair(s) for s in raw.get("pairs", [])],
            strategies=strategies,
            paths=paths,
            llm=llm,
            direction=raw.get("direction"),
            sample_n=raw.get("sample_n"),
            seed=run_seed,
            fixed_v=fixed_v,
            mock=mock,
            baseline=raw.get("baseline", "differ-rt"),
            candidate=raw.get("candidate", "slow"),
            thresholds=tuple(float(t) for t in raw.get("thresholds", (1, 2, 3, 5))),
            max_failure_rate=float(raw.get("max_failure_rate", 0.05)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SlowAdsError):
            raise
        raise ConfigError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class TranslationRecord:
    pair: tuple[str, str]
    strategy: str
    sentence_index: int
    v: int
    budget: int | None
    prompt_hash: str
    translation: str
    unmarked: bool
    error: str | None = None


@dataclass(frozen=True)
class ReportRow:
    src: str
    tgt: str
    direction: str
    strategy: str
    n: int
    failures: int
    valid: bool
    bleu: float
    chrf: float
    comet: float | None
    mean_v: float
    full_dict_size: float

    @property
    def pair(self) -> tuple[str, str]:
        return (self.src, self.tgt)

    def metric(self, name: str) -> float | None:
        if name not in METRICS:
            raise StatsError(f"unknown metric {name!r}")
        return getattr(self, name)


@dataclass
class RunResult:
    records: list[TranslationRecord]
    report: list[ReportRow]
    stats: list["ImprovementStats"]
    ratios: dict[str, float]
    pos_stats: dict[str, dict]
    backend_calls: int = 0


def _prompt_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _dict_file(root: Path, pair: tuple[str, str]) -> Path:
    return root / f"{pair[0]}-{pair[1]}.jsonl"


def make_backend(llm: LlmConfig, mock: str = "echo") -> Backend | None:
    """The mock world for ``backend = "mock"``; None means plain HTTP."""
    if llm.backend != "mock":
        return None
    if mock == "synthetic":
        from .synthetic import synthetic_backend

        return synthetic_backend()
    from .llm import MockBackend

    return MockBackend()


class _Resources:
    def __init__(self, config: ExperimentConfig):
        ps = config.paths
        self.names = load_language_names(ps.language_names)
        self.table: FrequencyTable = load_freq_table(ps.freq or bundled_table_path())
        self.pos_lexicon = load_pos_lexicon(ps.pos_lexicon or bundled_pos_lexicon_path())


def load_or_build_dictionaries(
    config: ExperimentConfig,
    pair: tuple[str, str],
    corpus,
    client: LlmClient,
    res: _Resources,
) -> list[SentenceDictionary]:
    root = config.paths.dicts or config.paths.out / "dicts"
    path = _dict_file(root, pair)
    if path.is_file():
        by_index = {d.sentence_index: d for d in load_dictionaries(path)}
        missing = [i for i in corpus.indices if i not in by_index]
        if not missing:
            return [by_index[i] for i in corpus.indices]
        log.info("%s lacks %d sampled sentences; rebuilding", path, len(missing))
    dicts = construct_dictionaries(corpus, pair, res.names, client.complete_many, res.pos_lexicon)
    root.mkdir(parents=True, exist_ok=True)
    store_dictionaries(dicts, path)
    return dicts


def _translate_all(client: LlmClient, prompts: Sequence[str]) -> list[tuple[str, bool, str | None]]:
    out = []
    for response in client.complete_many(list(prompts)):
        if isinstance(response, Exception):
            out.append(("", False, f"{type(response).__name__}: {response}"))
            continue
        try:
            parsed = parse_translation_response(response)
            out.append((parsed.translation, not parsed.marked, None))
        except SlowAdsError as exc:
            out.append(("", False, f"{type(exc).__name__}: {exc}"))
    return out


def _run_pair(
    config: ExperimentConfig,
    pair: tuple[str, str],
    client: LlmClient,
    res: _Resources,
) -> tuple[list[TranslationRecord], list[ReportRow], dict[str, list]]:
    src, tgt = pair
    langs = list(dict.fromkeys([src, tgt, ENGLISH]))
    corpus = load_corpus(config.paths.corpus, langs)
    n = len(corpus) if config.sample_n is None else min(config.sample_n, len(corpus))
    corpus = sample(corpus, n, config.seed)
    sources, references = corpus[src], corpus[tgt]
    src_name, tgt_name = language_name(res.names, src), language_name(res.names, tgt)
    dicts = load_or_build_dictionaries(config, pair, corpus, client, res)

    vanilla_prompts = [
        build_translation_prompt(src_name, tgt_name, s, _EMPTY, pair, i).text
        for s, i in zip(sources, corpus.indices)
    ]
    forward = _translate_all(client, vanilla_prompts)
    ok_forward = [k for k, f in enumerate(forward) if f[2] is None and f[0].strip()]
    back_prompts = [
        build_translation_prompt(tgt_name, src_name, forward[k][0], _EMPTY, (tgt, src), corpus.indices[k]).text
        for k in ok_forward
    ]
    back: list[tuple[str, bool, str | None]] = [("", False, "no forward translation")] * len(forward)
    for k, b in zip(ok_forward, _translate_all(client, back_prompts)):
        back[k] = b

    contexts, budgets = [], []
    for k, d in enumerate(dicts):
        ok = forward[k][2] is None and back[k][2] is None
        ctx = SentenceContext(sources[k], back[k][0], forward[k][0], references[k]) if ok else None
        contexts.append(ctx)
        if config.fixed_v is not None:
            budgets.append(config.fixed_v)
        elif ctx is not None:
            budgets.append(len(differ_roundtrip_select(ctx.source, ctx.roundtrip, d)))
        else:
            budgets.append(None)

    records: list[TranslationRecord] = []
    rows: list[ReportRow] = []
    selections_by_strategy: dict[str, list] = {}
    for strategy in config.strategies:
        name = strategy.name
        prompts: list[str | None] = []
        selections = []
        errors: list[str | None] = []
        for k, (d, idx) in enumerate(zip(dicts, corpus.indices)):
            v, ctx = budgets[k], contexts[k]
            needs_ctx = strategy.kind in ("differ-rt", "differ-tr")
            if (strategy.kind in BUDGETED and v is None) or (needs_ctx and ctx is None):
                prompts.append(None)
                selections.append(None)
                errors.append("budget unavailable: vanilla round trip failed")
                continue
            sel = select(
                strategy, d, v or 0, res.table, ctx,
                seed=f"{strategy.seed}:{src}:{tgt}:{idx}:{name}",
            )
            selections.append(sel)
            prompts.append(build_translation_prompt(src_name, tgt_name, sources[k], sel, pair, idx).text)
            errors.append(None)
        if strategy.kind == "vanilla":
            outputs = forward
        else:
            live = [p for p in prompts if p is not None]
            done = iter(_translate_all(client, live))
            outputs = [next(done) if p is not None else ("", False, None) for p in prompts]
        hyps, failures, sizes = [], 0, []
        for k, idx in enumerate(corpus.indices):
            text, unmarked, err = outputs[k]
            err = errors[k] or err
            sel = selections[k]
            failures += err is not None
            hyps.append("" if err else text)
            if sel is not None:
                sizes.append(len(sel))
            records.append(
                TranslationRecord(
                    pair, name, idx, len(sel) if sel is not None else 0, budgets[k],
                    _prompt_hash(prompts[k]) if prompts[k] else "", "" if err else text,
                    unmarked, err,
                )
            )
        selections_by_strategy[name] = selections
        rows.append(_score(config, pair, name, hyps, references, failures, sizes, dicts))
    selections_by_strategy["__dicts__"] = dicts
    return records, rows, selections_by_strategy


_EMPTY = vanilla_select()


def _comet_path(root: Path, pair: tuple[str, str], strategy: str) -> Path:
    return root / f"{pair[0]}-{pair[1]}.{strategy.replace(':', '_').replace(',', '+')}.txt"


def _score(config, pair, strategy, hyps, refs, failures, sizes, dicts) -> ReportRow:
    n = len(refs)
    # a few failed sentences score as empty output; more invalidates the pair
    valid = n > 0 and failures / n < config.max_failure_rate
    bleu = chrf = float("nan")
    comet = None
    if valid and n:
        bleu = bleu_corpus(hyps, refs).score
        chrf = chrf_corpus(hyps, refs).score
        if config.paths.comet is not None:
            cpath = _comet_path(config.paths.comet, pair, strategy)
            if cpath.is_file():
                comet = ingest_segment_scores(cpath, n).mean
    return ReportRow(
        src=pair[0],
        tgt=pair[1],
        direction=direction_of(pair),
        strategy=strategy,
        n=n,
        failures=failures,
        valid=valid,
        bleu=bleu,
        chrf=chrf,
        comet=comet,
        mean_v=sum(sizes) / len(sizes) if sizes else 0.0,
        full_dict_size=sum(len(d) for d in dicts) / len(dicts) if dicts else 0.0,
    )


def run_experiment(
    config: ExperimentConfig,
    backend: Backend | None = None,
    client: LlmClient | None = None,
    write: bool = True,
) -> RunResult:
    """Run every pair and strategy; optionally write outputs under ``paths.out``."""
    res = _Resources(config)
    if client is None:
        client = LlmClient(config.llm, config.paths.cache, backend or make_backend(config.llm, config.mock))
    records: list[TranslationRecord] = []
    report: list[ReportRow] = []
    per_direction: dict[str, tuple[list, list]] = {}
    for pair in config.pairs:
        recs, rows, sels = _run_pair(config, pair, client, res)
        records += recs
        report += rows
        cand = config.candidate
        if cand in sels:
            acc = per_direction.setdefault(direction_of(pair), ([], []))
            for sel, d in zip(sels[cand], sels["__dicts__"]):
                if sel is not None:
                    acc[0].append(sel)
                    acc[1].append(d)

    names = {s.name for s in config.strategies}
    stats = []
    if config.baseline in names and config.candidate in names:
        for metric in METRICS:
            rows = [r for r in report if r.valid and r.strategy in (config.baseline, config.candidate)]
            if metric == "comet" and any(r.comet is None for r in rows):
                continue
            stats.append(improvement_stats(report, config.baseline, config.candidate, config.thresholds, metric))
    ratios = {
        d: budget_ratio([r for r in report if r.direction == d], config.candidate)
        for d in DIRECTIONS
        if any(r.direction == d and r.strategy == config.candidate for r in report)
    }
    pos = {d: compute_pos_stats(*acc) for d, acc in per_direction.items()}
    result = RunResult(records, report, stats, ratios, pos, client.backend_calls)
    if write:
        write_outputs(result, config.paths.out)
    return result


@dataclass(frozen=True)
class ImprovementStats:
    baseline: str
    candidate: str
    metric: str
    thresholds: tuple[float, ...]
    n_pairs: int
    improved_total: int
    improved_gt: tuple[int, ...]
    degraded_total: int
    degraded_gt: tuple[int, ...]
    ties: int

    def fraction_cells(self) -> list[str]:
        """``88/100 65/88 ...`` cells: improved block then degraded block."""
        cells = [f"{self.improved_total}/{self.n_pairs}"]
        cells += [f"{c}/{self.improved_total}" for c in self.improved_gt]
        cells.append(f"{self.degraded_total}/{self.n_pairs}")
        cells += [f"{c}/{self.degraded_total}" for c in self.degraded_gt]
        return cells


def improvement_stats(
    report: Iterable[ReportRow],
    baseline: str,
    candidate: str,
    thresholds: Sequence[float],
    metric: str = "chrf",
    scale: float = 1.0,
) -> ImprovementStats:
    """Count pairs where ``candidate`` beats/loses to ``baseline`` on ``metric``.

    Bucket counts are over |delta| > t within each sign. Ties sit in neither.
    Pairs whose rows are invalid are left out.
    """
    thresholds = tuple(sorted(float(t) for t in thresholds))
    by_pair: dict[tuple[str, str], dict[str, ReportRow]] = {}
    for row in report:
        by_pair.setdefault(row.pair, {})[row.strategy] = row
    deltas = []
    for pair, rows in by_pair.items():
        for s in (baseline, candidate):
            if s not in rows:
                raise StatsError(f"pair {pair[0]}:{pair[1]} has no '{s}' row")
        b, c = rows[baseline], rows[candidate]
        if not (b.valid and c.valid):
            continue
        bv, cv = b.metric(metric), c.metric(metric)
        if bv is None or cv is None:
            raise StatsError(f"pair {pair[0]}:{pair[1]} has no {metric} score")
        deltas.append((cv - bv) * scale)
    up = [d for d in deltas if d > 0]
    down = [-d for d in deltas if d < 0]
    return ImprovementStats(
        baseline,
        candidate,
        metric,
        thresholds,
        len(deltas),
        len(up),
        tuple(sum(d > t for d in up) for t in thresholds),
        len(down),
        tuple(sum(d > t for d in down) for t in thresholds),
        len(deltas) - len(up) - len(down),
    )


def budget_ratio(report: Iterable[ReportRow], strategy: str | None = None) -> float:
    """Sum of mean budgets over sum of mean full-dictionary sizes."""
    rows = [r for r in report if strategy is None or r.strategy == strategy]
    full = sum(r.full_dict_size for r in rows)
    if full == 0:
        raise StatsError("full dictionary size is zero")
    return sum(r.mean_v for r in rows) / full


# -- report I/O --------------------------------------------------------------

REPORT_FIELDS = [f.name for f in fields(ReportRow)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_tsv(report: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    buf.write("\t".join(REPORT_FIELDS) + "\n")
    for row in report:
        buf.write("\t".join(_fmt(getattr(row, f)) for f in REPORT_FIELDS) + "\n")
    return buf.getvalue()


def _row_from_strings(d: Mapping[str, str]) -> ReportRow:
    def num(x):
        return None if x in ("", None) else float(x)

    return ReportRow(
        src=d["src"], tgt=d["tgt"], direction=d["direction"], strategy=d["strategy"],
        n=int(d["n"]), failures=int(d["failures"]), valid=d["valid"] == "true",
        bleu=num(d["bleu"]), chrf=num(d["chrf"]), comet=num(d["comet"]),
        mean_v=float(d["mean_v"]), full_dict_size=float(d["full_dict_size"]),
    )


def _json_safe(obj: dict) -> dict:
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in obj.items()}


def read_report(path: str | Path) -> list[ReportRow]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".jsonl":
        rows = []
        for line in text.splitlines():
            if line.strip():
                obj = json.loads(line)
                for k in ("bleu", "chrf"):
                    if obj[k] is None:
                        obj[k] = float("nan")
                rows.append(ReportRow(**obj))
        return rows
    reader = csv.DictReader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE)
    if reader.fieldnames != REPORT_FIELDS:
        raise StatsError(f"{path}: unexpected header {reader.fieldnames}")
    return [_row_from_strings(r) for r in reader]


def stats_to_tsv(stats: Iterable[ImprovementStats]) -> str:
    stats = list(stats)
    thresholds = stats[0].thresholds if stats else ()
    head = ["metric", "baseline", "candidate", "n_pairs", "improved"]
    head += [f"improved_gt_{t:g}" for t in thresholds] + ["degraded"]
    head += [f"degraded_gt_{t:g}" for t in thresholds] + ["ties"]
    lines = ["\t".join(head)]
    for s in stats:
        cells = [s.metric, s.baseline, s.candidate, s.n_pairs, s.improved_total, *s.improved_gt,
                 s.degraded_total, *s.degraded_gt, s.ties]
        lines.append("\t".join(str(c) for c in cells))
    return "\n".join(lines) + "\n"


def write_outputs(result: RunResult, out: str | Path) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.tsv").write_text(report_to_tsv(result.report), encoding="utf-8")
    (out / "report.jsonl").write_text(
        "".join(json.dumps(_json_safe(asdict(r))) + "\n" for r in result.report), encoding="utf-8"
    )
    (out / "records.jsonl").write_text(
        "".join(json.dumps(asdict(r), ensure_ascii=False) + "\n" for r in result.records),
        encoding="utf-8",
    )
    (out / "stats.tsv").write_text(stats_to_tsv(result.stats), encoding="utf-8")
    ratio_lines = ["direction\tbudget_ratio"] + [f"{d}\t{r!r}" for d, r in sorted(result.ratios.items())]
    (out / "ratios.tsv").write_text("\n".join(ratio_lines) + "\n", encoding="utf-8")
    pos_lines = ["direction\ttag\tpercentage\tcoverage"]
    for d, table in sorted(result.pos_stats.items()):
        for tag, st in table.items():
            pos_lines.append(f"{d}\t{tag}\t{st.percentage:.2f}\t{st.coverage:.2f}")
    (out / "pos_stats.tsv").write_text("\n".join(pos_lines) + "\n", encoding="utf-8")
