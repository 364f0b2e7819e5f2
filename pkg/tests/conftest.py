import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def read_golden():
    rows = []
    for line in (DATA / "treebank_golden.tsv").read_text(encoding="utf-8").split("\n"):
        if not line:
            continue
        text, _, count = line.rpartition("\t")
        rows.append((text, int(count)))
    return rows


def read_golden_tokens():
    with open(DATA / "treebank_golden_tokens.jsonl", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


@pytest.fixture
def golden():
    return read_golden()
