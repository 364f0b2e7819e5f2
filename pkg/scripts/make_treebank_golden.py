"""Regenerate the Treebank golden corpus from NLTK's reference tokenizer.

Run once when the corpus sentences change; the package itself never imports NLTK.

    python scripts/make_treebank_golden.py tests/data/treebank_sentences.txt tests/data
"""
import json
import sys
from pathlib import Path

from nltk.tokenize import TreebankWordTokenizer


def main(sentences_path, out_dir):
    tok = TreebankWordTokenizer()
    out_dir = Path(out_dir)
    sentences = [
        line.rstrip("\n")
        for line in Path(sentences_path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    with open(out_dir / "treebank_golden.tsv", "w", encoding="utf-8") as counts, open(
        out_dir / "treebank_golden_tokens.jsonl", "w", encoding="utf-8"
    ) as tokens:
        for s in sentences:
            toks = tok.tokenize(s)
            counts.write(f"{s}\t{len(toks)}\n")
            tokens.write(json.dumps({"text": s, "tokens": toks}, ensure_ascii=False) + "\n")
    print(f"wrote {len(sentences)} cases")


if __name__ == "__main__":
    main(*sys.argv[1:3])
