import json

import pytest

from slow_ads import synthetic
from slow_ads.cli import main
from slow_ads.lexicon import load_dictionaries


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_score_identity(tmp_path, capsys):
    h = tmp_path / "h.txt"
    h.write_text("the cat sat on the mat\nhello there world again\n", encoding="utf-8")
    assert _run(capsys, "score", "--hyp", str(h), "--ref", str(h), "--metric", "bleu") == (0, "100.0\n", "")
    code, out, _ = _run(capsys, "score", "--hyp", str(h), "--ref", str(h), "--metric", "chrf", "--format", "jsonl")
    assert code == 0 and json.loads(out)["score"] == 100.0


def test_invalid_pos_tag_is_usage_error(tmp_path, capsys):
    code, _, err = _run(capsys, "select", "--strategy", "pos:NOUN,XYZ", "--dicts", str(tmp_path / "d"))
    assert code == 2 and "XYZ" in err


def test_missing_config(tmp_path, capsys):
    code, _, err = _run(capsys, "run", "--config", str(tmp_path / "missing.toml"))
    assert code == 1 and "not found" in err and err.count("\n") == 1


def test_unknown_subcommand(capsys):
    assert _run(capsys, "frobnicate")[0] == 2


def test_freq_lookup(capsys):
    code, out, _ = _run(capsys, "freq", "lookup", "The", "qwzx")
    assert code == 0
    lines = dict(line.split("\t") for line in out.splitlines())
    assert lines["The"] == "7.73" and lines["qwzx"] == "0.00"


def test_corpus_validate(world, capsys):
    code, out, _ = _run(capsys, "corpus", "validate", "--dir", str(world["corpus"]), "--langs", "eng_Latn,xaa_Latn")
    assert code == 0 and "5 aligned" in out
    code, _, err = _run(capsys, "corpus", "validate", "--dir", str(world["corpus"]), "--langs", "eng_Latn,zsm_Latn")
    assert code == 1 and "zsm_Latn" in err


def test_dictionary_workflow(tmp_path, world, capsys):
    dicts = tmp_path / "dicts.jsonl"
    code, _, err = _run(
        capsys, "--cache-dir", str(tmp_path / "cache"), "build-dict", "--pair", "xbb_Latn:eng_Latn",
        "--corpus", str(world["corpus"]), "--out", str(dicts), "--language-names", str(world["language_names"]),
        "--pos-lexicon", str(world["pos_lexicon"]), "--backend", "mock", "--mock", "synthetic",
    )
    assert code == 0 and "wrote 5 dictionaries (0 empty)" in err

    code, out, _ = _run(capsys, "select", "--strategy", "slow", "--dicts", str(dicts),
                        "--freq", str(world["freq"]), "--fixed-v", "2")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(rows) == 5 and all(len(r["entries"]) == 2 for r in rows)
    for row, d in zip(rows, load_dictionaries(dicts)):
        lowest = sorted((synthetic.ZIPF[e.gloss], e.origin_index) for e in d.entries)[:2]
        assert [e["origin_index"] for e in row["entries"]] == [i for _, i in lowest]

    code, _, err = _run(capsys, "select", "--strategy", "slow", "--dicts", str(dicts))
    assert code == 1 and "--fixed-v" in err

    code, out, _ = _run(capsys, "prompt", "preview", "--strategy", "slow", "--sentence-index", "0",
                        "--pair", "xbb_Latn:eng_Latn", "--corpus", str(world["corpus"]), "--dicts", str(dicts),
                        "--freq", str(world["freq"]), "--fixed-v", "2",
                        "--language-names", str(world["language_names"]))
    assert code == 0 and out.rstrip().endswith("The refined translation is:")
    code, out, _ = _run(capsys, "prompt", "preview", "--strategy", "vanilla", "--sentence-index", "0",
                        "--pair", "xbb_Latn:eng_Latn", "--corpus", str(world["corpus"]),
                        "--language-names", str(world["language_names"]))
    assert code == 0 and out.startswith("Translate the following sentence from Synthetic Bb into English: ")


def test_run_stats_and_cache(tmp_path, world, capsys):
    cfg = synthetic.write_config(tmp_path / "c.toml", world, tmp_path / "out", tmp_path / "cache")
    code, _, err = _run(capsys, "run", "--config", str(cfg))
    assert code == 0 and "24 report rows" in err
    code, _, err = _run(capsys, "run", "--live", "--config", str(cfg))
    assert code == 1 and "--live" in err

    report = tmp_path / "out" / "report.tsv"
    code, out, _ = _run(capsys, "stats", "--report", str(report), "--thresholds", "1,2,3,5", "--format", "fractions")
    cells = out.split()
    assert code == 0 and len(cells) == 10 and cells[0].endswith("/3")
    code, out, _ = _run(capsys, "stats", "--report", str(report), "--candidate", "nope")
    assert code == 1

    code, out, _ = _run(capsys, "llm", "stats", "--cache", str(tmp_path / "cache"))
    assert code == 0 and json.loads(out)["models"]["synthetic-mock"] > 0


def test_llm_ping_mock(tmp_path, capsys):
    code, out, _ = _run(capsys, "--cache-dir", str(tmp_path), "llm", "ping", "--backend", "mock")
    assert code == 0 and "pong" in out


@pytest.mark.parametrize("argv", [["--help"], ["run", "--help"]])
def test_help_exits_zero(argv, capsys):
    assert _run(capsys, *argv)[0] == 0
