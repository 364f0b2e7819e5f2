"""Accuracy of a prompt under an evaluator model, and its objective vector."""
from __future__ import annotations

import hashlib
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from .cache import CacheKey, EvalCache
from .dataset import LabeledSample
from .emo import ObjectiveVector
from .llm.providers import ChatRequest, CompletionProvider, ProviderError
from .tokenizer import count_tokens

logger = logging.getLogger(__name__)

__all__ = [
    "EvalStrategy",
    "EvalResult",
    "Evaluator",
    "build_task_input",
    "render_query",
    "parse_label",
    "evaluate_prompt",
    "objectives_of",
    "UNPARSEABLE",
]

UNPARSEABLE = "unparseable"
PT_LABELS = {"positive": "positivo", "negative": "negativo"}
EVAL_TEMPERATURE = 0.0
EVAL_MAX_OUTPUT_TOKENS = 16
MAX_SHOTS = 8

_FOLD = str.maketrans("áàâãäéèêëíìîïóòôõöúùûüç", "aaaaaeeeeiiiiooooouuuuc")


@dataclass(frozen=True)
class EvalStrategy:
    kind: str = "zero_shot"
    shots: tuple[LabeledSample, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "shots", tuple(self.shots))
        if self.kind == "zero_shot":
            if self.shots:
                raise ValueError("zero-shot strategy takes no shots")
        elif self.kind == "few_shot":
            if not 1 <= len(self.shots) <= MAX_SHOTS:
                raise ValueError(f"few-shot strategy needs 1..{MAX_SHOTS} shots, got {len(self.shots)}")
        else:
            raise ValueError(f"unknown strategy kind {self.kind!r}")

    @classmethod
    def few_shot(cls, pool: Sequence[LabeledSample], n_shots: int = 2, seed: int = 0) -> "EvalStrategy":
        """Draw ``n_shots`` demonstrations from ``pool``, alternating classes
        (positive first) as far as the pool allows."""
        rng = random.Random(f"shots:{seed}")
        by_label = {lab: [s for s in pool if s.label == lab] for lab in ("positive", "negative")}
        for group in by_label.values():
            rng.shuffle(group)
        shots = []
        order = ["positive", "negative"] * n_shots
        for lab in order:
            if len(shots) == n_shots:
                break
            if by_label[lab]:
                shots.append(by_label[lab].pop(0))
        return cls("few_shot", tuple(shots))

    def descriptor(self) -> str:
        ids = [s.uid or hashlib.sha256(s.text.encode("utf-8")).hexdigest()[:16] for s in self.shots]
        return self.kind if not ids else f"{self.kind}:{','.join(ids)}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "shots": [{"uid": s.uid, "text": s.text, "label": s.label} for s in self.shots]}


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    per_sample: tuple  # (index, predicted label or "unparseable", correct)
    model_id: str
    prompt_id: str
    failures: int = 0

    def __post_init__(self):
        object.__setattr__(self, "per_sample", tuple(tuple(r) for r in self.per_sample))
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy out of range: {self.accuracy}")

    @property
    def n_correct(self) -> int:
        return sum(1 for _, _, ok in self.per_sample if ok)


def build_task_input(p, sample: LabeledSample, strategy: EvalStrategy) -> str:
    """Render the evaluator's user message.

    >>> from moprompt.llm import Prompt
    >>> build_task_input(Prompt("I"), LabeledSample("R", "positive"), EvalStrategy())
    'I\\n\\nTexto: R\\nSentimento:'
    """
    return render_query(p, sample.text, strategy)


def render_query(p, text: str, strategy: EvalStrategy) -> str:
    """Task input for an unlabeled ``text`` (same layout as :func:`build_task_input`)."""
    instruction = p.text if hasattr(p, "text") else str(p)
    blocks = [f"Texto: {s.text}\nSentimento: {PT_LABELS[s.label]}" for s in strategy.shots]
    blocks.append(f"Texto: {text}\nSentimento:")
    return instruction + "\n\n" + "\n\n".join(blocks)


def parse_label(reply: str) -> str:
    """Read a predicted class from free text: ``positive``, ``negative`` or
    ``unparseable``. When both stems occur the earlier one wins."""
    folded = (reply or "").lower().translate(_FOLD)
    pos = folded.find("positiv")
    neg = folded.find("negativ")
    if pos < 0 and neg < 0:
        return UNPARSEABLE
    if neg < 0 or (pos >= 0 and pos < neg):
        return "positive"
    return "negative"


def _check_disjoint(data, strategy):
    shot_keys = {(s.uid, s.text) for s in strategy.shots}
    if shot_keys and any((s.uid, s.text) in shot_keys for s in data):
        raise ValueError("few-shot demonstrations overlap the evaluation set")


def evaluate_prompt(p, data: Sequence[LabeledSample], model: CompletionProvider,
                    strategy: EvalStrategy, cache: EvalCache | None = None,
                    max_in_flight: int = 1) -> EvalResult:
    """Classify every sample with ``model`` under prompt ``p`` and score it.

    Cached replies are reused; a transport failure marks that sample
    unparseable (hence wrong) and is counted in ``failures``.
    """
    if not data:
        raise ValueError("evaluation data is empty")
    _check_disjoint(data, strategy)
    descriptor = strategy.descriptor()

    def one(idx_sample):
        idx, sample = idx_sample
        key = CacheKey.build(p.text, sample.text, model.provider_id, descriptor)
        reply = cache.get(key) if cache is not None else None
        failed = False
        if reply is None:
            request = ChatRequest("", build_task_input(p, sample, strategy),
                                  EVAL_TEMPERATURE, EVAL_MAX_OUTPUT_TOKENS)
            try:
                reply = model.complete(request)
            except ProviderError as exc:
                logger.warning("prompt %s, sample %d: evaluator failed (%s); scored unparseable",
                               p.id, idx, exc)
                reply, failed = None, True
            else:
                if cache is not None:
                    cache.put(key, reply)
        pred = UNPARSEABLE if reply is None else parse_label(reply)
        return idx, pred, pred == sample.label, failed

    items = list(enumerate(data))
    if max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            rows = list(pool.map(one, items))
    else:
        rows = [one(it) for it in items]

    correct = sum(1 for r in rows if r[2])
    return EvalResult(
        accuracy=correct / len(rows),
        per_sample=tuple(r[:3] for r in rows),
        model_id=model.provider_id,
        prompt_id=p.id,
        failures=sum(1 for r in rows if r[3]),
    )


def objectives_of(p, result: EvalResult) -> ObjectiveVector:
    """(token count of the instruction, error rate). Demonstrations and the
    review are not part of the cost."""
    if result.prompt_id != p.id:
        raise ValueError(f"result for prompt {result.prompt_id!r} does not belong to {p.id!r}")
    if result.per_sample:
        n = len(result.per_sample)
        error = (n - result.n_correct) / n
    else:
        error = 1.0 - result.accuracy
    return ObjectiveVector(count_tokens(p.text), error)


class Evaluator:
    """Binds model, data, strategy and cache into a ``prompt -> EvalResult``
    callable. Results are memoized by prompt text, so a duplicate prompt is
    never sent to the model twice within one run."""

    def __init__(self, model: CompletionProvider, data: Sequence[LabeledSample],
                 strategy: EvalStrategy | None = None, cache: EvalCache | None = None,
                 max_in_flight: int = 4):
        self.model = model
        self.data = tuple(data)
        self.strategy = strategy or EvalStrategy()
        self.cache = cache if cache is not None else EvalCache()
        self.max_in_flight = max_in_flight
        self._memo: dict[str, EvalResult] = {}

    @property
    def model_id(self) -> str:
        return self.model.provider_id

    def __call__(self, p) -> EvalResult:
        hit = self._memo.get(p.text)
        if hit is None:
            hit = evaluate_prompt(p, self.data, self.model, self.strategy, self.cache, self.max_in_flight)
            if hit.failures == 0:
                self._memo[p.text] = hit
        return hit if hit.prompt_id == p.id else replace(hit, prompt_id=p.id)

    @property
    def distinct_prompts(self) -> int:
        return len(self._memo)
