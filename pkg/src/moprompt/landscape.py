"""Model-free fitness landscape for hermetic end-to-end runs.

Accuracy rewards task keywords and penalizes length past 12 tokens::

    accuracy = min(0.95, 0.5 + 0.1 * keywords) - 0.005 * max(0, tokens - 12)

clamped to [0, 1]. A keyword counts once per stem, matched as a prefix of a
lower-cased token. All values land on a 0.005 grid, so they are reproduced
exactly as ``k / 200`` correct answers over a 200-item virtual sample set.
"""
from __future__ import annotations

from .tokenizer import tokenize

KEYWORD_STEMS = ("classifi", "sentiment", "positiv", "negativ", "resenh", "opini", "avali")
BASE_ACCURACY = 0.5
PER_KEYWORD = 0.1
KEYWORD_CAP = 0.95
FREE_TOKENS = 12
PER_EXTRA_TOKEN = 0.005
VIRTUAL_SAMPLES = 200
MODEL_ID = "synthetic-landscape"


def keywords_present(text: str) -> set[str]:
    tokens = [t.lower() for t in tokenize(text)]
    return {stem for stem in KEYWORD_STEMS if any(t.startswith(stem) for t in tokens)}


def synthetic_accuracy(text: str) -> float:
    n_tokens = len(tokenize(text))
    score = min(KEYWORD_CAP, BASE_ACCURACY + PER_KEYWORD * len(keywords_present(text)))
    score -= PER_EXTRA_TOKEN * max(0, n_tokens - FREE_TOKENS)
    score = min(1.0, max(0.0, score))
    # snap to the 0.005 grid to shed float noise from the sum above
    return round(score * VIRTUAL_SAMPLES) / VIRTUAL_SAMPLES


def synthetic_landscape(p):
    """Score a prompt on the synthetic landscape, shaped like a real evaluation.

    The first ``k`` of 200 virtual samples are marked correct, where
    ``k / 200`` is the landscape accuracy.
    """
    from .evaluator import EvalResult

    acc = synthetic_accuracy(p.text)
    k = round(acc * VIRTUAL_SAMPLES)
    per_sample = [(i, "positive" if i < k else "negative", i < k) for i in range(VIRTUAL_SAMPLES)]
    return EvalResult(accuracy=k / VIRTUAL_SAMPLES, per_sample=per_sample, model_id=MODEL_ID, prompt_id=p.id)
