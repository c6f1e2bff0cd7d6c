"""``slow-ads`` command line.

Exit codes: 0 success, 1 domain error (one-line diagnostic on stderr),
2 usage error (argparse help text).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from . import corpus as corpus_mod
from .errors import SlowAdsError
from .freq import bundled_table_path, load_freq_table
from .lexicon import (
    bundled_pos_lexicon_path,
    construct_dictionaries,
    load_dictionaries,
    load_pos_lexicon,
    store_dictionaries,
)
from .llm import LlmClient, LlmConfig, cache_stats
from .metrics import bleu_corpus, chrf_corpus
from .prompt import build_translation_prompt, language_name, load_language_names
from .runner import (
    ExperimentConfig,
    improvement_stats,
    load_config,
    make_backend,
    parse_pair,
    read_report,
    run_experiment,
    stats_to_tsv,
)
from .select import (
    BUDGETED,
    SentenceContext,
    Strategy,
    StrategyError,
    differ_roundtrip_select,
    parse_strategy,
    select,
    vanilla_select,
)

log = logging.getLogger("slow_ads")


def _strategy_arg(text: str) -> Strategy:
    try:
        return parse_strategy(text)
    except StrategyError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair_arg(text: str) -> tuple[str, str]:
    try:
        return parse_pair(text)
    except SlowAdsError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _langs_arg(text: str) -> list[str]:
    return [c.strip() for c in text.split(",") if c.strip()]


def _floats_arg(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _global_options() -> argparse.ArgumentParser:
    # SUPPRESS so values given before the subcommand are not reset by it
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="experiment config (TOML)")
    g.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="overrides the config seed")
    g.add_argument("--cache-dir", type=Path, default=argparse.SUPPRESS, help="overrides the cache dir")
    return g


def _llm_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=["http", "mock"], default=None)
    p.add_argument("--mock", choices=["echo", "synthetic"], default=None, help="mock world")
    p.add_argument("--model", default=None)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--max-in-flight", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    g = _global_options()
    parser = argparse.ArgumentParser(prog="slow-ads", description=__doc__.splitlines()[0], parents=[g])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("corpus", help="corpus utilities", parents=[g])
    csub = p.add_subparsers(dest="action", required=True)
    v = csub.add_parser("validate", help="check that language files align", parents=[g])
    v.add_argument("--dir", type=Path, required=True)
    v.add_argument("--langs", type=_langs_arg, required=True)
    v.add_argument("--file", action="append", default=[], metavar="CODE=NAME",
                   help="use NAME instead of <code>.devtest")

    p = sub.add_parser("freq", help="frequency table utilities", parents=[g])
    fsub = p.add_subparsers(dest="action", required=True)
    f = fsub.add_parser("lookup", help="print Zipf scores", parents=[g])
    f.add_argument("--table", type=Path, default=None, help="TSV table (default: bundled English)")
    f.add_argument("words", nargs="+")

    p = sub.add_parser("build-dict", help="construct per-sentence dictionaries with the LLM", parents=[g])
    p.add_argument("--pair", type=_pair_arg, required=True)
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--language-names", type=Path, default=None)
    p.add_argument("--pos-lexicon", type=Path, default=None, help="word<TAB>UPOS (default: bundled English)")
    p.add_argument("--sample-n", type=int, default=None)
    _llm_options(p)

    p = sub.add_parser("select", help="apply a selection strategy to stored dictionaries", parents=[g])
    p.add_argument("--strategy", type=_strategy_arg, required=True,
                   help="slow|highfreq|pos:<tags>|differ-rt|differ-tr|full|vanilla|random")
    p.add_argument("--dicts", type=Path, required=True)
    p.add_argument("--freq", type=Path, default=None)
    p.add_argument("--fixed-v", type=int, default=None)
    p.add_argument("--contexts", type=Path, default=None,
                   help="JSONL {sentence_index, source, roundtrip, translation, reference}")
    p.add_argument("--out", type=Path, default=None, help="default: stdout")

    p = sub.add_parser("prompt", help="prompt utilities", parents=[g])
    psub = p.add_subparsers(dest="action", required=True)
    pv = psub.add_parser("preview", help="render one translation prompt", parents=[g])
    pv.add_argument("--strategy", type=_strategy_arg, required=True)
    pv.add_argument("--sentence-index", type=int, required=True)
    pv.add_argument("--pair", type=_pair_arg, required=True)
    pv.add_argument("--corpus", type=Path, required=True)
    pv.add_argument("--dicts", type=Path, default=None)
    pv.add_argument("--freq", type=Path, default=None)
    pv.add_argument("--fixed-v", type=int, default=None)
    pv.add_argument("--contexts", type=Path, default=None)
    pv.add_argument("--language-names", type=Path, default=None)

    p = sub.add_parser("llm", help="LLM client utilities", parents=[g])
    lsub = p.add_subparsers(dest="action", required=True)
    lp = lsub.add_parser("ping", help="send one short prompt", parents=[g])
    _llm_options(lp)
    ls = lsub.add_parser("stats", help="summarise a response cache", parents=[g])
    ls.add_argument("--cache", type=Path, required=True)

    p = sub.add_parser("score", help="corpus BLEU / chrF", parents=[g])
    p.add_argument("--hyp", type=Path, required=True)
    p.add_argument("--ref", type=Path, required=True)
    p.add_argument("--metric", choices=["bleu", "chrf"], default="bleu")
    p.add_argument("--format", choices=["text", "jsonl"], default="text")

    p = sub.add_parser("run", help="run an experiment from a config file", parents=[g])
    p.add_argument("--live", action="store_true", help="refuse to run unless backend is http")

    p = sub.add_parser("stats", help="improvement statistics from a report", parents=[g])
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--baseline", default="differ-rt")
    p.add_argument("--candidate", default="slow")
    p.add_argument("--thresholds", type=_floats_arg, default=[5.0, 10.0, 20.0])
    p.add_argument("--metric", choices=["bleu", "chrf", "comet"], default="chrf")
    p.add_argument("--scale", type=float, default=1.0, help="multiply deltas (100 for COMET points)")
    p.add_argument("--format", choices=["tsv", "jsonl", "fractions"], default="tsv")
    return parser


def _read_lines(path: Path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _llm_config(args, base: LlmConfig | None = None, mock: str = "echo") -> tuple[LlmConfig, str]:
    cfg = base or LlmConfig()
    overrides = {}
    if args.backend:
        overrides["backend"] = args.backend
    if args.model:
        overrides["model_id"] = args.model
    if args.endpoint:
        overrides["endpoint"] = args.endpoint
    if args.max_in_flight:
        overrides["max_in_flight"] = args.max_in_flight
    cfg = LlmConfig(**{**asdict(cfg), **overrides})
    return cfg, args.mock or mock


def _client(args, base: ExperimentConfig | None = None) -> LlmClient:
    cfg, mock = _llm_config(args, base.llm if base else None, base.mock if base else "echo")
    cache = getattr(args, "cache_dir", None) or (base.paths.cache if base else Path(".slow_ads_cache"))
    return LlmClient(cfg, cache, make_backend(cfg, mock))


def _contexts(path: Path | None) -> dict[int, SentenceContext]:
    if path is None:
        return {}
    out = {}
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            out[int(obj["sentence_index"])] = SentenceContext(
                obj.get("source", ""), obj.get("roundtrip", ""),
                obj.get("translation", ""), obj.get("reference", ""),
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise SlowAdsError(f"{path}:{lineno}: malformed context ({exc})") from None
    return out


def _select_one(strategy, d, table, ctx, fixed_v, seed):
    if fixed_v is not None:
        v = fixed_v
    elif ctx is not None:
        v = len(differ_roundtrip_select(ctx.source, ctx.roundtrip, d))
    elif strategy.kind in BUDGETED:
        raise SlowAdsError(
            f"sentence {d.sentence_index}: no budget; pass --fixed-v or --contexts with round trips"
        )
    else:
        v = 0
    return select(strategy, d, v, table, ctx, seed=f"{seed}:{d.pair[0]}:{d.pair[1]}:{d.sentence_index}:{strategy.name}")


def cmd_corpus(args) -> int:
    filenames = dict(item.split("=", 1) for item in args.file)
    c = corpus_mod.load_corpus(args.dir, args.langs, filenames)
    print(f"ok: {len(c)} aligned sentences x {len(c.langs)} languages")
    return 0


def cmd_freq(args) -> int:
    table = load_freq_table(args.table or bundled_table_path())
    for word in args.words:
        print(f"{word}\t{table.zipf(word):.2f}")
    return 0


def cmd_build_dict(args) -> int:
    src, tgt = args.pair
    langs = list(dict.fromkeys([src, tgt, corpus_mod.ENGLISH]))
    c = corpus_mod.load_corpus(args.corpus, langs)
    if args.sample_n is not None:
        c = corpus_mod.sample(c, min(args.sample_n, len(c)), getattr(args, "seed", 0))
    names = load_language_names(args.language_names)
    pos = load_pos_lexicon(args.pos_lexicon or bundled_pos_lexicon_path())
    client = _client(args)
    dicts = construct_dictionaries(c, args.pair, names, client.complete_many, pos)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    store_dictionaries(dicts, args.out)
    empty = sum(1 for d in dicts if not d.entries)
    print(f"wrote {len(dicts)} dictionaries ({empty} empty) to {args.out}", file=sys.stderr)
    return 0


def cmd_select(args) -> int:
    table = load_freq_table(args.freq or bundled_table_path())
    contexts = _contexts(args.contexts)
    seed = getattr(args, "seed", 0)
    lines = []
    for d in load_dictionaries(args.dicts):
        sel = _select_one(args.strategy, d, table, contexts.get(d.sentence_index), args.fixed_v, seed)
        lines.append(json.dumps({
            "pair": list(d.pair),
            "sentence_index": d.sentence_index,
            "strategy": args.strategy.name,
            "v": sel.v,
            "entries": [asdict(e) for e in sel.entries],
        }, ensure_ascii=False))
    text = "".join(line + "\n" for line in lines)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_prompt(args) -> int:
    src, tgt = args.pair
    c = corpus_mod.load_corpus(args.corpus, list(dict.fromkeys([src, tgt])))
    try:
        row = c.indices.index(args.sentence_index)
    except ValueError:
        raise SlowAdsError(f"sentence index {args.sentence_index} not in corpus") from None
    names = load_language_names(args.language_names)
    if args.strategy.kind == "vanilla":
        sel = vanilla_select()
    else:
        if args.dicts is None:
            raise SlowAdsError("--dicts is required for dictionary strategies")
        by_index = {d.sentence_index: d for d in load_dictionaries(args.dicts)}
        if args.sentence_index not in by_index:
            raise SlowAdsError(f"no dictionary for sentence {args.sentence_index}")
        table = load_freq_table(args.freq or bundled_table_path())
        ctx = _contexts(args.contexts).get(args.sentence_index)
        sel = _select_one(args.strategy, by_index[args.sentence_index], table, ctx, args.fixed_v,
                          getattr(args, "seed", 0))
    rendered = build_translation_prompt(
        language_name(names, src), language_name(names, tgt), c[src][row], sel, (src, tgt), args.sentence_index
    )
    print(rendered.text)
    return 0


def cmd_llm(args) -> int:
    if args.action == "stats":
        print(json.dumps(cache_stats(args.cache), indent=2, sort_keys=True))
        return 0
    base = load_config(args.config) if getattr(args, "config", None) else None
    client = _client(args, base)
    print(client.complete("Reply with the single word: pong"))
    return 0


def cmd_score(args) -> int:
    hyps, refs = _read_lines(args.hyp), _read_lines(args.ref)
    if args.metric == "bleu":
        s = bleu_corpus(hyps, refs)
        payload = {"metric": "bleu", "score": s.score, "precisions": list(s.precisions),
                   "brevity_penalty": s.brevity_penalty, "hyp_len": s.hyp_len, "ref_len": s.ref_len}
    else:
        s = chrf_corpus(hyps, refs)
        payload = {"metric": "chrf", "score": s.score, "char_order": s.char_order, "beta": s.beta}
    if args.format == "jsonl":
        print(json.dumps(payload))
    else:
        print(round(payload["score"], 2))
    return 0


def cmd_run(args) -> int:
    if not getattr(args, "config", None):
        raise SlowAdsError("run needs --config <file>")
    config = load_config(args.config, getattr(args, "seed", None), getattr(args, "cache_dir", None))
    if args.live and config.llm.backend != "http":
        raise SlowAdsError("--live requires [llm] backend = \"http\"")
    result = run_experiment(config)
    print(f"{len(result.report)} report rows, {result.backend_calls} backend calls -> {config.paths.out}",
          file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    report = read_report(args.report)
    st = improvement_stats(report, args.baseline, args.candidate, args.thresholds, args.metric, args.scale)
    if args.format == "jsonl":
        print(json.dumps(asdict(st)))
    elif args.format == "fractions":
        print("\t".join(st.fraction_cells()))
    else:
        sys.stdout.write(stats_to_tsv([st]))
    return 0


COMMANDS = {
    "corpus": cmd_corpus,
    "freq": cmd_freq,
    "build-dict": cmd_build_dict,
    "select": cmd_select,
    "prompt": cmd_prompt,
    "llm": cmd_llm,
    "score": cmd_score,
    "run": cmd_run,
    "stats": cmd_stats,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    verbosity = getattr(args, "verbose", 0) or 0
    logging.basicConfig(
        level=logging.WARNING - 10 * min(verbosity, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (SlowAdsError, OSError, ValueError) as exc:
        print(f"slow-ads: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
