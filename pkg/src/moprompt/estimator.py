"""scikit-learn style wrappers around the optimization loops.

``fit(X, y)`` searches for an instruction on labeled reviews; ``predict``
classifies new reviews with the chosen instruction through the evaluator
model. Example::

    >>> from moprompt.dataset import synthetic_reviews
    >>> data = synthetic_reviews(20, seed=0)
    >>> X = [s.text for s in data]; y = [s.label for s in data]
    >>> est = MOPromptOptimizer(population_size=4, generations=2).fit(X, y)
    >>> len(est.pareto_front_) >= 1
    True
"""
from __future__ import annotations

import copy

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_text_data, check_texts
from .config import RunConfig
from .dataset import LabeledSample, normalize_label
from .evaluator import (
    EVAL_MAX_OUTPUT_TOKENS,
    EVAL_TEMPERATURE,
    UNPARSEABLE,
    EvalStrategy,
    Evaluator,
    parse_label,
    render_query,
)
from .landscape import synthetic_accuracy
from .llm.mock import LabelOracle, MockGenerator
from .llm.providers import ChatRequest, ProviderClient, ProviderError, RetryPolicy
from .llm.templates import DEFAULT_TASK
from .optimizer import run

__all__ = ["MOPromptOptimizer", "EvoPromptOptimizer"]


def _private_copy(obj):
    # keep constructor params untouched across fits; live clients may refuse
    try:
        return copy.deepcopy(obj)
    except (TypeError, copy.Error):
        return obj


class _PromptOptimizer(ClassifierMixin, BaseEstimator):
    _framework = ""

    def __init__(self, generator=None, evaluator=None, population_size=10, generations=10,
                 strategy="zero", n_shots=2, random_state=0, task_description=DEFAULT_TASK,
                 max_in_flight=4, output_dir=None):
        self.generator = generator
        self.evaluator = evaluator
        self.population_size = population_size
        self.generations = generations
        self.strategy = strategy
        self.n_shots = n_shots
        self.random_state = random_state
        self.task_description = task_description
        self.max_in_flight = max_in_flight
        self.output_dir = output_dir

    def fit(self, X, y):
        """Run the search on reviews ``X`` with labels ``y``.

        Args:
            X: Sequence of review texts.
            y: Labels; positive/negative in any accepted spelling (``1``,
                ``"pos"``, ``"positivo"``...).

        Returns:
            self

        Raises:
            RuntimeError: The run aborted on a provider failure.
        """
        texts, labels = check_text_data(X, y)
        seed = 0 if self.random_state is None else int(self.random_state)
        samples = [LabeledSample(t, l, uid=f"x{i}") for i, (t, l) in enumerate(zip(texts, labels))]
        strategy = EvalStrategy()
        if self.strategy == "few":
            strategy = EvalStrategy.few_shot(samples, self.n_shots, seed=seed)
            shot_ids = {s.uid for s in strategy.shots}
            samples = [s for s in samples if s.uid not in shot_ids]
        elif self.strategy != "zero":
            raise ValueError(f"strategy must be 'zero' or 'few', got {self.strategy!r}")

        generator = _private_copy(self.generator) if self.generator is not None else MockGenerator(seed)
        model = (_private_copy(self.evaluator) if self.evaluator is not None
                 else LabelOracle(samples, accuracy_fn=synthetic_accuracy, provider_id="mock-evaluator"))
        client = ProviderClient(model, retry=RetryPolicy(), max_in_flight=self.max_in_flight)
        evaluate = Evaluator(client, samples, strategy, max_in_flight=self.max_in_flight)

        cfg = RunConfig(framework=self._framework, population_size=self.population_size,
                        generations=self.generations, seed=seed, output_dir=self.output_dir,
                        strategy=self.strategy, n_shots=self.n_shots,
                        task_description=self.task_description)
        record = run(cfg, generator=generator, evaluate=evaluate)
        if record.status != "completed":
            raise RuntimeError(f"optimization aborted: {record.error}")

        final = record.final
        self.run_record_ = record
        self.strategy_ = strategy
        self.evaluator_ = client
        self.classes_ = np.array(["negative", "positive"], dtype=object)
        self.population_ = [(i.prompt.text, i.objectives.cost_tokens, i.objectives.accuracy)
                            for i in final.individuals]
        self.pareto_front_ = sorted({(i.prompt.text, i.objectives.cost_tokens, i.objectives.accuracy)
                                     for i in final.front0}, key=lambda r: (r[1], -r[2], r[0]))
        key = "max_accuracy" if self._framework == "moprompt" else "best_accuracy"
        self.best_prompt_ = record.summary()[key]["prompt"]
        return self

    def predict(self, X):
        """Classify ``X`` with ``best_prompt_``. Unreadable replies and
        provider failures give ``"unparseable"``."""
        check_is_fitted(self, "best_prompt_")
        texts = check_texts(X)
        out = []
        for text in texts:
            request = ChatRequest("", render_query(self.best_prompt_, text, self.strategy_),
                                  EVAL_TEMPERATURE, EVAL_MAX_OUTPUT_TOKENS)
            try:
                out.append(parse_label(self.evaluator_.complete(request)))
            except ProviderError:
                out.append(UNPARSEABLE)
        return np.array(out, dtype=object)

    def score(self, X, y, sample_weight=None):
        """Accuracy of :meth:`predict` against ``y`` (labels normalized)."""
        pred = self.predict(X)
        truth = np.array([normalize_label(v) for v in np.asarray(y, dtype=object).ravel()], dtype=object)
        if len(truth) != len(pred):
            raise ValueError(f"X and y have different lengths: {len(pred)} != {len(truth)}")
        hits = (pred == truth).astype(float)
        if sample_weight is None:
            return float(hits.mean())
        return float(np.average(hits, weights=np.asarray(sample_weight, dtype=float)))


class MOPromptOptimizer(_PromptOptimizer):
    """Two-objective search (tokens, error) with NSGA-II survival.

    After ``fit``, ``pareto_front_`` lists ``(prompt, tokens, accuracy)``
    sorted by tokens and ``best_prompt_`` is its most accurate point.
    """

    _framework = "moprompt"


class EvoPromptOptimizer(_PromptOptimizer):
    """Accuracy-only baseline: roulette parents, top-N survival."""

    _framework = "evoprompt"
