"""Export an English ``word<TAB>zipf`` table from the wordfreq package.

    python scripts/export_zipf_table.py --top 30000 --out src/slow_ads/data/en_zipf.tsv
"""
import argparse

import wordfreq


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--top", type=int, default=30000)
    ap.add_argument("--lang", default="en")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    table = {}
    for word in wordfreq.top_n_list(args.lang, args.top):
        key = word.casefold()
        if not key or any(c.isspace() for c in key):
            continue
        table[key] = max(table.get(key, 0.0), wordfreq.zipf_frequency(key, args.lang))

    with open(args.out, "w", encoding="utf-8") as f:
        f.write(f"# exported from wordfreq, lang={args.lang} top={args.top}\n")
        for word, z in table.items():
            f.write(f"{word}\t{z:.2f}\n")
    print(f"wrote {len(table)} entries to {args.out}")


if __name__ == "__main__":
    main()
