"""Bi-objective selection machinery: dominance, NSGA-II sorting and survival,
roulette-wheel selection and the 2-D hypervolume indicator.

Everything here works on :class:`ObjectiveVector` values (both components are
minimized, no normalization) and on :class:`Individual` containers that carry a
genome plus the bookkeeping written by the sorting passes.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

__all__ = [
    "ObjectiveVector",
    "Individual",
    "Front",
    "dominates",
    "fast_non_dominated_sort",
    "crowding_distance",
    "nsga2_select",
    "roulette_select",
    "hypervolume_2d",
]

INF = math.inf


@dataclass(frozen=True)
class ObjectiveVector:
    """Token cost and error rate of one prompt. Both are minimized."""

    cost_tokens: int
    error_rate: float

    def __post_init__(self):
        if self.cost_tokens < 0:
            raise ValueError(f"cost_tokens must be >= 0, got {self.cost_tokens}")
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError(f"error_rate must lie in [0, 1], got {self.error_rate}")

    def as_tuple(self) -> tuple[int, float]:
        return (self.cost_tokens, self.error_rate)

    @property
    def accuracy(self) -> float:
        return 1.0 - self.error_rate


@dataclass(eq=False)
class Individual:
    """A genome joined with its objectives and NSGA-II bookkeeping.

    Equality and hashing are by identity so individuals can key dicts even when
    two of them carry the same prompt text.
    """

    prompt: Any
    objectives: ObjectiveVector | None = None
    rank: int | None = None
    crowding: float | None = None

    @property
    def evaluated(self) -> bool:
        return self.objectives is not None

    def __repr__(self) -> str:
        text = getattr(self.prompt, "text", self.prompt)
        return f"Individual({text!r}, {self.objectives}, rank={self.rank}, crowding={self.crowding})"


Front = list  # list[Individual] sharing one rank


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    no_worse = a.cost_tokens <= b.cost_tokens and a.error_rate <= b.error_rate
    better = a.cost_tokens < b.cost_tokens or a.error_rate < b.error_rate
    return no_worse and better


def _require_evaluated(pop: Iterable[Individual]) -> None:
    for ind in pop:
        if ind.objectives is None:
            raise ValueError(f"individual has no objectives: {ind!r}")


def fast_non_dominated_sort(pop: Sequence[Individual]) -> list[Front]:
    """Partition ``pop`` into fronts of increasing rank (Deb et al. 2002).

    Writes ``rank`` on every individual. Within a front, members keep their
    order of appearance in ``pop``.
    """
    _require_evaluated(pop)
    n = len(pop)
    if n == 0:
        return []

    dominated_by = [[] for _ in range(n)]  # indices that i dominates
    n_dominators = [0] * n
    for i in range(n):
        oi = pop[i].objectives
        for j in range(i + 1, n):
            oj = pop[j].objectives
            if dominates(oi, oj):
                dominated_by[i].append(j)
                n_dominators[j] += 1
            elif dominates(oj, oi):
                dominated_by[j].append(i)
                n_dominators[i] += 1

    current = [i for i in range(n) if n_dominators[i] == 0]
    fronts: list[Front] = []
    rank = 0
    while current:
        for i in current:
            pop[i].rank = rank
        fronts.append([pop[i] for i in current])
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                n_dominators[j] -= 1
                if n_dominators[j] == 0:
                    nxt.append(j)
        current = sorted(nxt)
        rank += 1
    return fronts


def crowding_distance(front: Sequence[Individual]) -> dict[Individual, float]:
    """Normalized-gap crowding distance of each member of one front.

    Boundary members of each objective get ``inf``; an objective whose range
    collapses (max == min) adds nothing. Results are also written to
    ``Individual.crowding``.
    """
    if not front:
        raise ValueError("crowding distance of an empty front")
    _require_evaluated(front)

    dist = {ind: 0.0 for ind in front}
    if len(front) <= 2:
        for ind in front:
            dist[ind] = INF
    else:
        for key in (lambda i: i.objectives.cost_tokens, lambda i: i.objectives.error_rate):
            ordered = sorted(front, key=key)
            lo, hi = key(ordered[0]), key(ordered[-1])
            dist[ordered[0]] = INF
            dist[ordered[-1]] = INF
            span = hi - lo
            if span == 0:
                continue
            for k in range(1, len(ordered) - 1):
                ind = ordered[k]
                if dist[ind] != INF:
                    dist[ind] += (key(ordered[k + 1]) - key(ordered[k - 1])) / span

    for ind, d in dist.items():
        ind.crowding = d
    return dist


def _truncation_key(ind: Individual):
    text = getattr(ind.prompt, "text", str(ind.prompt))
    return (-ind.crowding, ind.objectives.cost_tokens, text)


def nsga2_select(combined: Sequence[Individual], n: int) -> list[Individual]:
    """NSGA-II environmental selection of ``n`` survivors from ``combined``.

    Whole fronts are taken in rank order; the front that would overflow is
    ordered by descending crowding distance (ties: fewer tokens, then prompt
    text) and truncated.
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if len(combined) < n:
        raise ValueError(f"cannot select {n} individuals from a pool of {len(combined)}")

    survivors: list[Individual] = []
    for front in fast_non_dominated_sort(combined):
        crowding_distance(front)
        room = n - len(survivors)
        if len(front) <= room:
            survivors.extend(front)
        else:
            survivors.extend(sorted(front, key=_truncation_key)[:room])
        if len(survivors) == n:
            break
    return survivors


def roulette_select(pop: Sequence[Individual], rng: random.Random) -> Individual:
    """Fitness-proportional pick where fitness is accuracy (1 - error_rate).

    Falls back to a uniform pick when every accuracy is zero.
    """
    if not pop:
        raise ValueError("roulette selection from an empty population")
    _require_evaluated(pop)

    weights = [ind.objectives.accuracy for ind in pop]
    total = math.fsum(weights)
    if total <= 0.0:
        return pop[rng.randrange(len(pop))]

    spin = rng.random() * total
    acc = 0.0
    for ind, w in zip(pop, weights):
        acc += w
        if spin < acc:
            return ind
    # float round-off can leave spin == total; land on the last positive slot
    return next(ind for ind, w in zip(reversed(pop), reversed(weights)) if w > 0)


def hypervolume_2d(front: Iterable[ObjectiveVector], reference: ObjectiveVector) -> float:
    """Area dominated by ``front`` and bounded by ``reference``.

    Dominated or duplicate points in ``front`` are tolerated and contribute
    nothing extra.
    """
    points = sorted(p.as_tuple() for p in front)
    for p in points:
        if not dominates(ObjectiveVector(*p), reference):
            raise ValueError(f"point {p} does not dominate the reference point {reference.as_tuple()}")

    rx, ry = reference.as_tuple()
    area = 0.0
    best_y = ry
    # sweep by ascending cost; each point adds the strip between its error and
    # the best error seen so far, from its cost to the reference cost
    for x, y in points:
        if y < best_y:
            area += (rx - x) * (best_y - y)
            best_y = y
    return area
