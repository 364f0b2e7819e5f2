"""Evolutionary loops: MOPrompt (NSGA-II survival) and the EvoPrompt baseline
(roulette parents, elitist top-N by accuracy).

Both loops share seeding, evaluation, offspring creation and snapshotting;
they differ in mating selection and survival only.
"""
from __future__ import annotations

import json
import logging
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .cache import EvalCache
from .config import ProviderSettings, RunConfig
from .dataset import balanced_sample, demonstration_pool, load_dataset, synthetic_reviews
from .emo import (
    Individual,
    ObjectiveVector,
    crowding_distance,
    fast_non_dominated_sort,
    nsga2_select,
    roulette_select,
)
from .evaluator import EvalResult, EvalStrategy, Evaluator, objectives_of
from .landscape import MODEL_ID as LANDSCAPE_ID, synthetic_accuracy, synthetic_landscape
from .llm.mock import LabelOracle, MockGenerator
from .llm.operators import (
    EmptyOffspringError,
    OperatorTransportError,
    Prompt,
    ga_llm,
    generate_initial_population,
    mutate_only,
)
from .llm.providers import ProviderClient, ProviderError, RetryPolicy, Transcript

logger = logging.getLogger(__name__)

__all__ = [
    "FrontSnapshot",
    "RunRecord",
    "binary_tournament",
    "synthetic_landscape",
    "run_moprompt",
    "run_evoprompt",
    "run",
    "load_run",
]

RUN_FILE = "run.json"
SNAPSHOT_FILE = "snapshots.jsonl"
TRANSCRIPT_FILE = "transcript.jsonl"
CACHE_FILE = "eval_cache.bin"


def _enc_float(x):
    return "inf" if x == math.inf else x


def _dec_float(x):
    return math.inf if x == "inf" else x


def individual_to_dict(ind: Individual) -> dict:
    d = ind.prompt.to_dict()
    d.update(
        cost_tokens=ind.objectives.cost_tokens,
        error_rate=ind.objectives.error_rate,
        rank=ind.rank,
        crowding=_enc_float(ind.crowding),
    )
    return d


def individual_from_dict(d: dict) -> Individual:
    return Individual(
        prompt=Prompt.from_dict(d),
        objectives=ObjectiveVector(d["cost_tokens"], d["error_rate"]),
        rank=d["rank"],
        crowding=_dec_float(d["crowding"]),
    )


@dataclass
class FrontSnapshot:
    generation: int
    individuals: list[Individual]
    front0: list[Individual]

    def to_dict(self) -> dict:
        return {
            "generation": self.generation,
            "individuals": [individual_to_dict(i) for i in self.individuals],
            "front0": [i.prompt.id for i in self.front0],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "FrontSnapshot":
        inds = [individual_from_dict(x) for x in d["individuals"]]
        by_id = {i.prompt.id: i for i in inds}
        return cls(d["generation"], inds, [by_id[k] for k in d["front0"]])


@dataclass
class RunRecord:
    config: dict
    snapshots: list[FrontSnapshot] = field(default_factory=list)
    provider_calls: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    status: str = "running"
    error: str | None = None
    strategy: dict | None = None
    evaluator_model: str | None = None
    evaluation_failures: int = 0
    offspring_fallbacks: int = 0

    @property
    def framework(self) -> str:
        return self.config["framework"]

    @property
    def final(self) -> FrontSnapshot:
        return self.snapshots[-1]

    def summary(self) -> dict:
        """Highlight rows of the final snapshot: max-accuracy and min-token
        points of front 0, and the best-accuracy individual overall (first in
        population order on ties)."""
        if not self.snapshots:
            return {}
        snap = self.final
        front = snap.front0
        max_acc = min(front, key=lambda i: (i.objectives.error_rate, i.objectives.cost_tokens))
        min_tok = min(front, key=lambda i: (i.objectives.cost_tokens, i.objectives.error_rate))
        best = min(snap.individuals, key=lambda i: i.objectives.error_rate)
        return {
            "max_accuracy": _row(max_acc),
            "min_tokens": _row(min_tok),
            "best_accuracy": _row(best),
        }

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "status": self.status,
            "error": self.error,
            "strategy": self.strategy,
            "evaluator_model": self.evaluator_model,
            "generations_completed": len(self.snapshots) - 1 if self.snapshots else -1,
            "provider_calls": self.provider_calls,
            "evaluation_failures": self.evaluation_failures,
            "offspring_fallbacks": self.offspring_fallbacks,
            "wall_clock_s": round(self.wall_clock_s, 3),
            "summary": self.summary(),
        }


def _row(ind: Individual) -> dict:
    return {
        "prompt_id": ind.prompt.id,
        "prompt": ind.prompt.text,
        "accuracy": round(ind.objectives.accuracy, 10),
        "tokens": ind.objectives.cost_tokens,
    }


def binary_tournament(pop: Sequence[Individual], rng: random.Random) -> Individual:
    """Pick two distinct individuals; lower rank wins, then larger crowding,
    then a coin flip."""
    if len(pop) < 2:
        raise ValueError("binary tournament needs at least two individuals")
    i, j = rng.sample(range(len(pop)), 2)
    a, b = pop[i], pop[j]
    if a.rank != b.rank:
        return a if a.rank < b.rank else b
    if a.crowding != b.crowding:
        return a if a.crowding > b.crowding else b
    return a if rng.random() < 0.5 else b


def annotate(pop: Sequence[Individual]) -> list[list[Individual]]:
    """Write rank and crowding on every member; returns the fronts."""
    fronts = fast_non_dominated_sort(pop)
    for f in fronts:
        crowding_distance(f)
    return fronts


# --- framework policies ---------------------------------------------------

def _moprompt_parents(pop, rng):
    return binary_tournament(pop, rng), binary_tournament(pop, rng)


def _moprompt_survive(combined, n):
    # repeated prompt texts only fill slots left over by distinct ones;
    # otherwise copies of one strong prompt take over front 0
    seen, distinct, repeats = set(), [], []
    for ind in combined:
        (repeats if ind.prompt.text in seen else distinct).append(ind)
        seen.add(ind.prompt.text)
    if len(distinct) >= n:
        return nsga2_select(distinct, n)
    return distinct + nsga2_select(repeats, n - len(distinct))


def _evoprompt_parents(pop, rng):
    return roulette_select(pop, rng), roulette_select(pop, rng)


def _evoprompt_survive(combined, n):
    # stable: on equal accuracy parents stay ahead of offspring
    return sorted(combined, key=lambda i: i.objectives.error_rate)[:n]


_POLICIES = {
    "moprompt": (_moprompt_parents, _moprompt_survive),
    "evoprompt": (_evoprompt_parents, _evoprompt_survive),
}


# --- component construction ----------------------------------------------

def _provider(ps: ProviderSettings, role: str, seed: int, samples=()):
    if ps.kind == "http":
        from .llm.http import HTTPChatProvider

        return HTTPChatProvider(ps.url, ps.model, api_key_env=ps.api_key_env, timeout=ps.timeout)
    if role == "generator":
        return MockGenerator(seed)
    return LabelOracle(samples, accuracy_fn=synthetic_accuracy, provider_id="mock-evaluator")


def _client(provider, ps: ProviderSettings, transcript):
    retry = RetryPolicy(attempts=ps.retry_attempts, base_delay=ps.retry_base_delay)
    return ProviderClient(provider, retry=retry, transcript=transcript, max_in_flight=ps.max_in_flight)


@dataclass
class _Components:
    generator: ProviderClient
    evaluate: Callable[[Prompt], EvalResult]
    evaluator_client: ProviderClient | None
    strategy: EvalStrategy
    evaluator_model: str
    cache: EvalCache | None = None


def build_components(cfg: RunConfig, out_dir: Path | None, generator=None, evaluate=None) -> _Components:
    transcript = Transcript(out_dir / TRANSCRIPT_FILE) if out_dir is not None else None
    strategy = EvalStrategy()
    gen_client = _client(generator or _provider(cfg.generator, "generator", cfg.seed), cfg.generator, transcript)

    if evaluate is not None:
        return _Components(gen_client, evaluate, None, getattr(evaluate, "strategy", strategy),
                           getattr(evaluate, "model_id", "custom"))
    if cfg.evaluator.kind == "landscape":
        return _Components(gen_client, synthetic_landscape, None, strategy, LANDSCAPE_ID)

    full = load_dataset(cfg.dataset) if cfg.dataset else synthetic_reviews(cfg.n_per_class + 20, cfg.sample_seed)
    subset = balanced_sample(full, cfg.n_per_class, cfg.sample_seed)
    if cfg.strategy == "few":
        pool = demonstration_pool(full, subset, per_class=20, seed=cfg.sample_seed)
        strategy = EvalStrategy.few_shot(pool.samples, cfg.n_shots, seed=cfg.sample_seed)
    model = _client(_provider(cfg.evaluator, "evaluator", cfg.seed, subset.samples), cfg.evaluator, transcript)
    cache = EvalCache(out_dir / CACHE_FILE if out_dir is not None else None)
    evaluator = Evaluator(model, subset.samples, strategy, cache, max_in_flight=cfg.evaluator.max_in_flight)
    return _Components(gen_client, evaluator, model, strategy, model.provider_id, cache)


# --- the loop --------------------------------------------------------------

class _Run:
    def __init__(self, cfg: RunConfig, comps: _Components, out_dir: Path | None):
        self.cfg = cfg
        self.comps = comps
        self.out_dir = out_dir
        self.rng = random.Random(cfg.seed)
        self.record = RunRecord(
            config=cfg.to_dict(),
            strategy=comps.strategy.to_dict(),
            evaluator_model=comps.evaluator_model,
        )
        self.seed_calls = 0
        self.operator_calls = 0
        self.fallback_calls = 0
        self.evaluations = 0

    def evaluate(self, inds):
        for ind in inds:
            result = self.comps.evaluate(ind.prompt)
            self.evaluations += 1
            if result.failures:
                self.record.evaluation_failures += result.failures
                logger.warning("prompt %s: %d evaluator failures", ind.prompt.id, result.failures)
            ind.objectives = objectives_of(ind.prompt, result)

    def offspring(self, a: Prompt, b: Prompt, g: int, i: int) -> Prompt:
        gen = self.comps.generator
        kw = dict(id=f"g{g}-{i}", generation=g, temperature=self.cfg.generator.temperature,
                  max_output_tokens=self.cfg.generator.max_output_tokens)
        before = gen.calls
        try:
            return ga_llm(a, b, gen, **kw)
        except EmptyOffspringError as exc:
            logger.warning("offspring %s: %s; retrying with mutation only", kw["id"], exc)
        finally:
            self.operator_calls += gen.calls - before
        self.record.offspring_fallbacks += 1
        before = gen.calls
        try:
            return mutate_only(a, b, gen, **kw)
        except EmptyOffspringError as exc:
            logger.warning("offspring %s: %s; copying parent %s", kw["id"], exc, a.id)
        finally:
            self.fallback_calls += gen.calls - before
        return Prompt(a.text, id=kw["id"], generation=g, parents=(a.id, b.id), operator_tag="ga_llm")

    def snapshot(self, g, pop, sink):
        annotate(pop)
        # frozen copies: later generations rewrite rank/crowding on survivors
        frozen = [Individual(i.prompt, i.objectives, i.rank, i.crowding) for i in pop]
        snap = FrontSnapshot(g, frozen, [i for i in frozen if i.rank == 0])
        self.record.snapshots.append(snap)
        if sink is not None:
            sink.write(snap.to_json() + "\n")
            sink.flush()

    def execute(self) -> RunRecord:
        cfg = self.cfg
        choose_parents, survive = _POLICIES[cfg.framework]
        n = cfg.population_size
        t0 = time.perf_counter()
        sink = None
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            sink = open(self.out_dir / SNAPSHOT_FILE, "w", encoding="utf-8")
        try:
            gen = self.comps.generator
            seeds = generate_initial_population(
                n, gen, cfg.task_description,
                temperature=cfg.generator.temperature,
                max_output_tokens=cfg.generator.max_output_tokens,
            )
            self.seed_calls = gen.calls
            pop = [Individual(p) for p in seeds]
            self.evaluate(pop)
            self.snapshot(0, pop, sink)

            for g in range(1, cfg.generations + 1):
                children = []
                for i in range(n):
                    a, b = choose_parents(pop, self.rng)
                    children.append(Individual(self.offspring(a.prompt, b.prompt, g, i)))
                self.evaluate(children)
                pop = survive(pop + children, n)
                self.snapshot(g, pop, sink)
                logger.info("generation %d: front0 = %s", g,
                            [i.objectives.as_tuple() for i in self.record.snapshots[-1].front0])
            self.record.status = "completed"
        except (OperatorTransportError, ProviderError, EmptyOffspringError) as exc:
            self.record.status = "aborted"
            self.record.error = f"{type(exc).__name__}: {exc}"
            logger.error("run aborted: %s", self.record.error)
        finally:
            if sink is not None:
                sink.close()
            if self.comps.cache is not None:
                self.comps.cache.close()
            self.record.wall_clock_s = time.perf_counter() - t0
            self.record.provider_calls = self.calls()
            if self.out_dir is not None:
                (self.out_dir / RUN_FILE).write_text(
                    json.dumps(self.record.to_dict(), indent=2, ensure_ascii=False, sort_keys=True) + "\n",
                    encoding="utf-8",
                )
        return self.record

    def calls(self) -> dict:
        gen = self.comps.generator
        out = {
            "generator": {
                "seed": self.seed_calls,
                "operator": self.operator_calls,
                "fallback": self.fallback_calls,
                **gen.counters(),
            },
            "evaluations": self.evaluations,
        }
        if self.comps.evaluator_client is not None:
            out["evaluator"] = self.comps.evaluator_client.counters()
        return out


def run(cfg: RunConfig, *, generator=None, evaluate=None) -> RunRecord:
    """Execute ``cfg`` with the framework it names.

    ``generator`` (a completion provider) and ``evaluate`` (a ``Prompt ->
    EvalResult`` callable) override what the config would build. When
    ``cfg.output_dir`` is set, ``run.json``, ``snapshots.jsonl``,
    ``transcript.jsonl`` and the evaluation cache are written there.
    """
    cfg.validate()
    out_dir = Path(cfg.output_dir) if cfg.output_dir else None
    comps = build_components(cfg, out_dir, generator=generator, evaluate=evaluate)
    return _Run(cfg, comps, out_dir).execute()


def run_moprompt(cfg: RunConfig, *, generator=None, evaluate=None) -> RunRecord:
    if cfg.framework != "moprompt":
        raise ValueError(f"run_moprompt needs framework='moprompt', got {cfg.framework!r}")
    return run(cfg, generator=generator, evaluate=evaluate)


def run_evoprompt(cfg: RunConfig, *, generator=None, evaluate=None) -> RunRecord:
    if cfg.framework != "evoprompt":
        raise ValueError(f"run_evoprompt needs framework='evoprompt', got {cfg.framework!r}")
    return run(cfg, generator=generator, evaluate=evaluate)


def load_run(run_dir) -> tuple[dict, list[FrontSnapshot]]:
    """Read ``run.json`` and ``snapshots.jsonl`` from a run directory."""
    run_dir = Path(run_dir)
    run_path, snap_path = run_dir / RUN_FILE, run_dir / SNAPSHOT_FILE
    if not run_path.is_file():
        raise FileNotFoundError(f"run {run_dir}: missing {RUN_FILE}")
    if not snap_path.is_file():
        raise FileNotFoundError(f"run {run_dir}: missing {SNAPSHOT_FILE}")
    meta = json.loads(run_path.read_text(encoding="utf-8"))
    with open(snap_path, encoding="utf-8") as fh:
        snaps = [FrontSnapshot.from_dict(json.loads(line)) for line in fh if line.strip()]
    return meta, snaps
