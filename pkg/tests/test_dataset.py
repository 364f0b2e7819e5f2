import json

import pytest

from moprompt.dataset import (
    DatasetError,
    LabeledSample,
    SamplingError,
    balanced_sample,
    demonstration_pool,
    load_dataset,
    normalize_label,
    synthetic_reviews,
)
from moprompt.landscape import keywords_present, synthetic_accuracy, synthetic_landscape
from moprompt.llm import Prompt


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in rows) + "\n", encoding="utf-8")
    return path


def corpus(tmp_path, n_pos, n_neg):
    rows = [{"text": f"bom {i}", "label": "positivo"} for i in range(n_pos)]
    rows += [{"text": f"ruim {i}", "label": 0} for i in range(n_neg)]
    return write_jsonl(tmp_path / "d.jsonl", rows)


@pytest.mark.parametrize("raw,label", [
    ("pos", "positive"), ("Positivo", "positive"), (1, "positive"), (True, "positive"),
    ("neg", "negative"), ("negativo", "negative"), (0, "negative"), ("0", "negative"),
])
def test_normalize_label(raw, label):
    assert normalize_label(raw) == label


def test_normalize_label_unknown():
    with pytest.raises(DatasetError):
        normalize_label("neutral")


def test_load_dataset_ids_and_fingerprint(tmp_path):
    path = corpus(tmp_path, 3, 2)
    d = load_dataset(path)
    assert len(d) == 5 and d.counts() == {"positive": 3, "negative": 2}
    assert [s.uid for s in d][:2] == ["L1", "L2"]
    assert len(d.source_fingerprint) == 64
    assert load_dataset(path).source_fingerprint == d.source_fingerprint


def test_load_dataset_names_bad_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"text": "ok", "label": 1}\n{"text": 5}\n', encoding="utf-8")
    with pytest.raises(DatasetError, match=":2:"):
        load_dataset(path)


def test_load_dataset_bad_label(tmp_path):
    path = write_jsonl(tmp_path / "x.jsonl", [{"text": "a", "label": "meh"}])
    with pytest.raises(DatasetError, match="meh"):
        load_dataset(path)


def test_balanced_sample_counts_and_determinism(tmp_path):
    d = load_dataset(corpus(tmp_path, 60, 60))
    s1, s2 = balanced_sample(d, 50, seed=3), balanced_sample(d, 50, seed=3)
    assert s1.counts() == {"positive": 50, "negative": 50}
    assert [x.uid for x in s1] == [x.uid for x in s2]
    assert [x.label for x in s1][:4] == ["positive", "negative", "positive", "negative"]
    assert [x.uid for x in balanced_sample(d, 50, seed=4)] != [x.uid for x in s1]


def test_balanced_sample_short_class(tmp_path):
    d = load_dataset(corpus(tmp_path, 60, 49))
    with pytest.raises(SamplingError, match="needed 50, have 49"):
        balanced_sample(d, 50, seed=0)


def test_demonstration_pool_is_disjoint():
    full = synthetic_reviews(70, seed=1)
    subset = balanced_sample(full, 50, seed=1)
    pool = demonstration_pool(full, subset, per_class=20, seed=1)
    assert pool.counts() == {"positive": 20, "negative": 20}
    assert not {s.uid for s in pool} & {s.uid for s in subset}


def test_synthetic_reviews_unique():
    d = synthetic_reviews(30, seed=0)
    assert len({s.text for s in d}) == 60


def test_sample_validation():
    with pytest.raises(ValueError):
        LabeledSample("x", "neutral")
    with pytest.raises(ValueError):
        LabeledSample("  ", "positive")


# synthetic landscape

def test_landscape_keywords_and_cap():
    assert synthetic_accuracy("Diga algo.") == 0.5
    assert synthetic_accuracy("Classifique o sentimento.") == pytest.approx(0.7)
    text = "Classifique o sentimento desta resenha como positivo ou negativo."
    assert keywords_present(text) == {"classifi", "sentiment", "resenh", "positiv", "negativ"}
    assert synthetic_accuracy(text) == 0.95


def test_landscape_length_penalty():
    words = "Classifique " + " ".join(["palavra"] * 19)  # 20 tokens, 1 keyword
    assert synthetic_accuracy(words) == pytest.approx(0.6 - 0.005 * 8)


def test_landscape_result_is_exact():
    r = synthetic_landscape(Prompt("Classifique a opinião como positiva ou negativa.", id="x"))
    assert r.accuracy == r.n_correct / 200 and r.prompt_id == "x"


@pytest.mark.parametrize("text,expected", [
    ("um dois três quatro cinco", 0.5),
    ("Classifique o sentimento positivo a b c d e f g h", 0.8),
    ("Classifique sentimento positivo negativo resenha " + " ".join("abcdefghijklmno"), 0.91),
])
def test_landscape_worked_examples(text, expected):
    assert synthetic_accuracy(text) == pytest.approx(expected)
