"""Prompt genome and the LLM-executed variation operators."""
from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass, field

from . import templates
from .providers import ChatRequest, CompletionProvider, EmptyReplyError, ProviderError

logger = logging.getLogger(__name__)

__all__ = [
    "Prompt",
    "OperatorError",
    "EmptyOffspringError",
    "OperatorTransportError",
    "crossover_request",
    "mutation_request",
    "seed_request",
    "clean_reply",
    "ga_llm",
    "mutate_only",
    "generate_initial_population",
]

OPERATOR_TAGS = ("seed", "ga_llm")
DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_OUTPUT_TOKENS = 128

_QUOTE_PAIRS = {'"': '"', "'": "'", "“": "”", "«": "»", "‘": "’", "`": "`"}


@dataclass(frozen=True)
class Prompt:
    """An evolving instruction text with its lineage."""

    text: str
    id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    generation: int = 0
    parents: tuple[str, ...] = ()
    operator_tag: str = "seed"

    def __post_init__(self):
        if not self.text or self.text != self.text.strip():
            raise ValueError(f"prompt text must be non-empty and trimmed: {self.text!r}")
        if self.operator_tag not in OPERATOR_TAGS:
            raise ValueError(f"unknown operator_tag {self.operator_tag!r}")
        if self.generation < 0:
            raise ValueError("generation must be >= 0")
        object.__setattr__(self, "parents", tuple(self.parents))
        expected = 2 if self.operator_tag == "ga_llm" else 0
        if len(self.parents) != expected:
            raise ValueError(
                f"{self.operator_tag} prompts need {expected} parents, got {len(self.parents)}"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "generation": self.generation,
            "parents": list(self.parents),
            "operator_tag": self.operator_tag,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Prompt":
        return cls(
            text=d["text"],
            id=d["id"],
            generation=d["generation"],
            parents=tuple(d["parents"]),
            operator_tag=d["operator_tag"],
        )


class OperatorError(RuntimeError):
    """A variation operator could not produce an offspring."""

    def __init__(self, message, parent_ids=()):
        super().__init__(message)
        self.parent_ids = tuple(parent_ids)


class EmptyOffspringError(OperatorError):
    """The generator replied with nothing usable."""


class OperatorTransportError(OperatorError):
    """The generator could not be reached, retries included."""


def _text(p) -> str:
    return p.text if isinstance(p, Prompt) else str(p)


def crossover_request(a, b, temperature=DEFAULT_TEMPERATURE, max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS):
    user = templates.fill(templates.USER_CROSSOVER, prompt_a=_text(a), prompt_b=_text(b))
    return ChatRequest(templates.SYSTEM, user, temperature, max_output_tokens)


def mutation_request(p, temperature=DEFAULT_TEMPERATURE, max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS):
    user = templates.fill(templates.USER_MUTATION, prompt=_text(p))
    return ChatRequest(templates.SYSTEM, user, temperature, max_output_tokens)


def seed_request(task_description=templates.DEFAULT_TASK, temperature=DEFAULT_TEMPERATURE,
                 max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS):
    user = templates.fill(templates.USER_SEED, task=task_description)
    return ChatRequest(templates.SYSTEM, user, temperature, max_output_tokens)


def clean_reply(reply: str) -> str:
    """Trim a generator reply and peel off quotes wrapping the whole text.

    A pair is only removed when the quote character does not occur inside, so
    ``'positivo' ou 'negativo'`` survives intact.
    """
    text = (reply or "").strip()
    while len(text) >= 2 and text[0] in _QUOTE_PAIRS and text[-1] == _QUOTE_PAIRS[text[0]]:
        inner = text[1:-1]
        if text[0] in inner or text[-1] in inner:
            break
        text = inner.strip()
    return text


def _ask(provider, request, parent_ids) -> str:
    try:
        reply = provider.complete(request)
    except EmptyReplyError as exc:
        raise EmptyOffspringError(str(exc), parent_ids) from exc
    except ProviderError as exc:
        raise OperatorTransportError(f"generator failed: {exc}", parent_ids) from exc
    text = clean_reply(reply)
    if not text:
        raise EmptyOffspringError("generator returned an empty prompt", parent_ids)
    return text


def ga_llm(a: Prompt, b: Prompt, provider: CompletionProvider, *, id=None, generation=None,
           temperature=DEFAULT_TEMPERATURE, max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS) -> Prompt:
    """Crossover of ``a`` and ``b`` followed by a mutation of the result.

    Exactly two provider calls. Raises :class:`EmptyOffspringError` on an
    unusable reply and :class:`OperatorTransportError` when the provider stays
    unreachable after its retries.
    """
    parents = (a.id, b.id)
    child = _ask(provider, crossover_request(a, b, temperature, max_output_tokens), parents)
    mutated = _ask(provider, mutation_request(child, temperature, max_output_tokens), parents)
    return Prompt(
        text=mutated,
        id=id or uuid.uuid4().hex[:12],
        generation=max(a.generation, b.generation) + 1 if generation is None else generation,
        parents=parents,
        operator_tag="ga_llm",
    )


def mutate_only(a: Prompt, b: Prompt, provider: CompletionProvider, *, id=None, generation=None,
                temperature=DEFAULT_TEMPERATURE, max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS) -> Prompt:
    """Fallback offspring: one mutation of ``a`` (lineage still names both parents)."""
    parents = (a.id, b.id)
    text = _ask(provider, mutation_request(a, temperature, max_output_tokens), parents)
    return Prompt(
        text=text,
        id=id or uuid.uuid4().hex[:12],
        generation=max(a.generation, b.generation) + 1 if generation is None else generation,
        parents=parents,
        operator_tag="ga_llm",
    )


def generate_initial_population(n: int, provider: CompletionProvider,
                                task_description: str = templates.DEFAULT_TASK, *,
                                max_attempts: int = 5, id_prefix: str = "g0-",
                                temperature=DEFAULT_TEMPERATURE,
                                max_output_tokens=DEFAULT_MAX_OUTPUT_TOKENS) -> list[Prompt]:
    """Ask the generator for ``n`` seed instructions, one call each.

    A reply duplicating an earlier seed is re-requested up to ``max_attempts``
    times in total for that slot, after which the duplicate is kept. Provider
    failures propagate (the run cannot start without seeds).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    request = seed_request(task_description, temperature, max_output_tokens)
    seeds: list[Prompt] = []
    seen: set[str] = set()
    for i in range(n):
        text = ""
        for attempt in range(max_attempts):
            text = clean_reply(provider.complete(request))
            if text and text not in seen:
                break
            logger.info("seed %d: duplicate or empty reply, re-requesting (%d)", i, attempt + 1)
        if not text:
            raise EmptyOffspringError(f"no usable seed prompt for slot {i}")
        seen.add(text)
        seeds.append(Prompt(text=text, id=f"{id_prefix}{i}", generation=0))
    return seeds
