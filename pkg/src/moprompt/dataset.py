"""Labeled review corpora and the fixed balanced evaluation subset."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, replace
from pathlib import Path

__all__ = [
    "LabeledSample",
    "Dataset",
    "DatasetError",
    "SamplingError",
    "normalize_label",
    "load_dataset",
    "balanced_sample",
    "demonstration_pool",
    "synthetic_reviews",
]

LABELS = ("positive", "negative")
_LABEL_ALIASES = {
    "pos": "positive", "positive": "positive", "positivo": "positive", "1": "positive",
    "neg": "negative", "negative": "negative", "negativo": "negative", "0": "negative",
}


class DatasetError(ValueError):
    pass


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSample:
    text: str
    label: str
    uid: str = ""

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        if not self.text or not self.text.strip():
            raise ValueError("sample text must be non-empty")


@dataclass(frozen=True)
class Dataset:
    samples: tuple[LabeledSample, ...]
    source_fingerprint: str
    sampling_seed: int | None = None

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def by_label(self, label: str) -> list[LabeledSample]:
        return [s for s in self.samples if s.label == label]

    def counts(self) -> dict[str, int]:
        return {lab: len(self.by_label(lab)) for lab in LABELS}


def normalize_label(value) -> str:
    """Map the accepted spellings (pos/positive/positivo/1 and the negative
    mirror) onto ``"positive"``/``"negative"``."""
    if isinstance(value, bool):
        value = int(value)
    key = str(value).strip().lower()
    try:
        return _LABEL_ALIASES[key]
    except KeyError:
        raise DatasetError(f"unknown label {value!r}") from None


def load_dataset(path) -> Dataset:
    """Read a JSON-lines file of ``{"text": ..., "label": ...}`` records.

    Sample ids are ``L<line number>``. Blank lines are skipped.
    """
    path = Path(path)
    raw = path.read_bytes()
    samples = []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(rec, dict) or not isinstance(rec.get("text"), str) or "label" not in rec:
            raise DatasetError(f"{path}:{lineno}: expected an object with string 'text' and a 'label'")
        try:
            label = normalize_label(rec["label"])
        except DatasetError as exc:
            raise DatasetError(f"{path}:{lineno}: {exc}") from None
        if not rec["text"].strip():
            raise DatasetError(f"{path}:{lineno}: empty text")
        samples.append(LabeledSample(rec["text"], label, uid=f"L{lineno}"))
    if not samples:
        raise DatasetError(f"{path}: no records")
    return Dataset(tuple(samples), hashlib.sha256(raw).hexdigest())


def balanced_sample(d: Dataset, n_per_class: int, seed: int) -> Dataset:
    """Seeded draw of ``n_per_class`` samples per class without replacement,
    interleaved positive, negative, positive, ..."""
    if n_per_class < 1:
        raise SamplingError(f"n_per_class must be positive, got {n_per_class}")
    rng = random.Random(seed)
    drawn = {}
    for label in LABELS:
        pool = d.by_label(label)
        if len(pool) < n_per_class:
            raise SamplingError(
                f"class {label!r}: needed {n_per_class}, have {len(pool)}"
            )
        drawn[label] = rng.sample(pool, n_per_class)
    interleaved = [s for pair in zip(drawn["positive"], drawn["negative"]) for s in pair]
    return Dataset(tuple(interleaved), d.source_fingerprint, sampling_seed=seed)


def demonstration_pool(d: Dataset, exclude: Dataset, per_class: int = 20, seed: int = 0) -> Dataset:
    """Held-out shots: the first ``per_class`` of each class in seeded order,
    skipping anything in ``exclude``. Smaller classes yield what they have."""
    taken = {(s.uid, s.text) for s in exclude}
    rng = random.Random(f"demo:{seed}")
    pool = []
    for label in LABELS:
        rest = [s for s in d.by_label(label) if (s.uid, s.text) not in taken]
        rng.shuffle(rest)
        pool.extend(rest[:per_class])
    return replace(d, samples=tuple(pool), sampling_seed=seed)


_OPENINGS = ("Assisti ontem e", "Fui ao cinema com a família e", "Vi este filme no fim de semana e",
             "Depois de muita expectativa,", "Sem grandes esperanças,", "Na estreia,")
_POSITIVE = ("adorei cada minuto; o elenco está impecável.", "a história me emocionou do começo ao fim.",
             "saí encantado com a fotografia e a trilha sonora.", "recomendo, é divertido e inteligente.",
             "o roteiro surpreende e as atuações são ótimas.", "ri e chorei, uma obra-prima.")
_NEGATIVE = ("achei tudo arrastado e previsível.", "o roteiro é fraco e os diálogos são péssimos.",
             "dormi na metade, que decepção.", "não recomendo, perda de tempo e dinheiro.",
             "as atuações são forçadas e o final é ridículo.", "saí irritado, um dos piores do ano.")


def synthetic_reviews(n_per_class: int = 60, seed: int = 0) -> Dataset:
    """Templated Portuguese mini-reviews for offline runs (each text unique)."""
    rng = random.Random(f"reviews:{seed}")
    samples = []
    for label, endings in (("positive", _POSITIVE), ("negative", _NEGATIVE)):
        for i in range(n_per_class):
            text = f"{rng.choice(_OPENINGS)} {rng.choice(endings)} (sessão {i + 1})"
            samples.append(LabeledSample(text, label, uid=f"{label[:3]}{i}"))
    blob = json.dumps([(s.text, s.label) for s in samples], ensure_ascii=False).encode("utf-8")
    return Dataset(tuple(samples), hashlib.sha256(blob).hexdigest())
