"""Export an English ``word<TAB>UPOS`` lexicon from the Brill tagger lexicon
shipped inside the textblob wheel (MIT licensed; one most-likely Penn tag per word).

    pip install --no-deps textblob
    python scripts/export_pos_lexicon.py --out src/slow_ads/data/en_upos.tsv
"""
import argparse
from importlib import resources

PENN_TO_UPOS = {
    "NN": "NOUN", "NNS": "NOUN", "NNP": "PROPN", "NNPS": "PROPN",
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ",
    "VB": "VERB", "VBD": "VERB", "VBG": "VERB", "VBN": "VERB", "VBP": "VERB", "VBZ": "VERB",
    "MD": "AUX",
    "RB": "ADV", "RBR": "ADV", "RBS": "ADV", "WRB": "ADV",
    "IN": "ADP",
    "DT": "DET", "PDT": "DET", "WDT": "DET",
    "PRP": "PRON", "PRP$": "PRON", "WP": "PRON", "WP$": "PRON", "EX": "PRON",
    "CC": "CCONJ", "CD": "NUM",
    "RP": "PART", "TO": "PART", "POS": "PART",
    "UH": "INTJ",
    "SYM": "SYM", "$": "SYM", "#": "SYM",
    "FW": "X", "LS": "X",
}
PUNCT_TAGS = {".", ",", ":", "(", ")", "``", "''", '"'}

# Penn folds these into VBx / IN; the universal scheme separates them
AUXILIARIES = {"be", "am", "is", "are", "was", "were", "been", "being"}
SUBORDINATORS = {"because", "if", "although", "though", "whether", "unless", "whereas", "that"}


def convert(lines):
    lexicon, proper = {}, {}
    for line in lines:
        if not line.strip() or line.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) < 2:
            continue
        word, penn = parts[0], parts[1].split("|")[0]
        tag = "PUNCT" if penn in PUNCT_TAGS else PENN_TO_UPOS.get(penn)
        key = word.casefold()
        if tag is None or any(c.isspace() for c in key):
            continue
        # lowercase spellings carry the common-word reading; capitalised-only
        # entries are kept as a fallback
        target = lexicon if word == key else proper
        target.setdefault(key, tag)
    for key, tag in proper.items():
        lexicon.setdefault(key, tag)
    for w in AUXILIARIES:
        lexicon[w] = "AUX"
    for w in SUBORDINATORS:
        lexicon[w] = "SCONJ"
    return lexicon


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    text = (resources.files("textblob") / "en" / "en-lexicon.txt").read_text(encoding="utf-8")
    lexicon = convert(text.splitlines())
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("# exported from the Brill lexicon in textblob (MIT), Penn tags mapped to UPOS\n")
        for word in sorted(lexicon):
            f.write(f"{word}\t{lexicon[word]}\n")
    print(f"wrote {len(lexicon)} entries to {args.out}")


if __name__ == "__main__":
    main()
