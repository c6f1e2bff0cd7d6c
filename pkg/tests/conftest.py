import pytest

from slow_ads import synthetic
from slow_ads.freq import FrequencyTable
from slow_ads.lexicon import DictEntry, SentenceDictionary

ACCEPTANCE = "test_acceptance.py"


def make_dict(glosses, pair=("zsm_Latn", "eng_Latn"), index=0, surfaces=None, tags=None):
    surfaces = surfaces or [f"s{i}" for i in range(len(glosses))]
    tags = tags or ["X"] * len(glosses)
    entries = [DictEntry(s, g, t, i) for i, (s, g, t) in enumerate(zip(surfaces, glosses, tags))]
    return SentenceDictionary(pair, index, entries)


@pytest.fixture
def world(tmp_path):
    return synthetic.write_world(tmp_path / "world", n=5)


@pytest.fixture
def small_table():
    return FrequencyTable({"the": 7.73, "cat": 4.9, "medical": 4.8, "center": 5.1, "photographer": 3.9})


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" or outcome == "skipped":
                if ACCEPTANCE in rep.nodeid:
                    lines.append((rep.nodeid.split("::")[-1], outcome.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else outcome:7s} {name}")
