"""Run every strategy on the synthetic cipher world with the mock model and
print the report. No network, no API key.

    python scripts/run_synthetic_demo.py --out runs/demo --n 20
"""
import argparse
from pathlib import Path

from slow_ads import synthetic
from slow_ads.runner import load_config, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/demo"))
    ap.add_argument("--n", type=int, default=20, help="sentences per language")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    world = synthetic.write_world(args.out / "world", n=args.n, seed=args.seed)
    cfg_path = synthetic.write_config(
        args.out / "demo.toml", world, args.out / "results", args.out / "cache", seed=args.seed
    )
    result = run_experiment(load_config(cfg_path))

    print(f"{'pair':<22}{'strategy':<20}{'BLEU':>7}{'chrF':>7}{'mean V':>8}{'|dict|':>8}")
    for r in result.report:
        print(f"{r.src + ':' + r.tgt:<22}{r.strategy:<20}{r.bleu:7.1f}{r.chrf:7.1f}{r.mean_v:8.2f}{r.full_dict_size:8.2f}")
    print()
    for s in result.stats:
        print(f"{s.metric}: {s.candidate} vs {s.baseline}: " + " ".join(s.fraction_cells()))
    for d, ratio in sorted(result.ratios.items()):
        print(f"budget ratio {d}: {ratio:.3f}")
    print(f"\n{result.backend_calls} backend calls; outputs in {args.out / 'results'}")


if __name__ == "__main__":
    main()
