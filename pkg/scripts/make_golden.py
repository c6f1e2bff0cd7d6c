"""Score the checked-in toy set with sacreBLEU and freeze the results.

Run once when the fixture changes; the test suite never imports sacrebleu.

    python scripts/make_golden.py tests/data/golden
"""
import json
import sys
from pathlib import Path

import sacrebleu
from sacrebleu.tokenizers.tokenizer_13a import Tokenizer13a

TOKENIZER_CASES = [
    "Hello, world!",
    "2.5",
    "",
    "He paid $2.50 for a 3-day pass, didn't he?",
    "Dr. Smith's report (see page 12) was rejected.",
    "1,012 sentences; 3.5% growth -- up 5-6 points &amp; more.",
    "<skipped> a-\nb [x]{y}",
]

PAIR_CASES = {
    "cat_dog": (["the cat sat"], ["the dog sat"]),
    "abcd_abce": (["abcd"], ["abce"]),
}


def score(hyps, refs):
    bleu = sacrebleu.corpus_bleu(hyps, [refs])
    chrf = sacrebleu.corpus_chrf(hyps, [refs])
    return {
        "bleu": bleu.score,
        "precisions": list(bleu.precisions),
        "bp": bleu.bp,
        "sys_len": bleu.sys_len,
        "ref_len": bleu.ref_len,
        "chrf": chrf.score,
    }


def main(root):
    root = Path(root)
    hyps = (root / "toy.hyps").read_text(encoding="utf-8").splitlines()
    refs = (root / "toy.refs").read_text(encoding="utf-8").splitlines()
    tok = Tokenizer13a()
    golden = {
        "scorer": f"sacrebleu {sacrebleu.__version__}",
        "toy": score(hyps, refs),
        "pairs": {k: score(h, r) for k, (h, r) in PAIR_CASES.items()},
        "pair_inputs": PAIR_CASES,
        "tokenize_13a": {s: tok(s).split() for s in TOKENIZER_CASES},
    }
    (root / "golden.json").write_text(json.dumps(golden, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(json.dumps(golden["toy"], indent=2))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/golden")
