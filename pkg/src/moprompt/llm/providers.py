"""Completion-provider contract, error types, retries and transcript logging."""
from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Protocol, runtime_checkable

logger = logging.getLogger(__name__)

__all__ = [
    "ChatRequest",
    "CompletionProvider",
    "ProviderError",
    "TransportError",
    "RateLimitError",
    "EmptyReplyError",
    "RetryPolicy",
    "Transcript",
    "ProviderClient",
]


class ProviderError(RuntimeError):
    """Base class for provider failures. Not retried unless a subclass says so."""

    retryable = False


class TransportError(ProviderError):
    retryable = True


class RateLimitError(ProviderError):
    retryable = True


class EmptyReplyError(ProviderError):
    """The provider answered with no text."""


@dataclass(frozen=True)
class ChatRequest:
    system: str
    user: str
    temperature: float = 0.7
    max_output_tokens: int = 128

    def __post_init__(self):
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")

    def messages(self) -> list[dict]:
        msgs = []
        if self.system:
            msgs.append({"role": "system", "content": self.system})
        msgs.append({"role": "user", "content": self.user})
        return msgs

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@runtime_checkable
class CompletionProvider(Protocol):
    provider_id: str

    def complete(self, request: ChatRequest) -> str: ...


@dataclass
class RetryPolicy:
    """Exponential backoff on retryable errors: delays base, base*factor, ..."""

    attempts: int = 3
    base_delay: float = 1.0
    factor: float = 2.0
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    def delay(self, retry_index: int) -> float:
        return self.base_delay * self.factor**retry_index


class Transcript:
    """Append-only JSONL log of provider traffic, safe to share between threads."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def log(self, provider_id, request: ChatRequest, reply, latency_ms, error=None):
        rec = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "provider": provider_id,
            "request_hash": request.digest(),
            "reply": reply,
            "latency_ms": round(latency_ms, 3),
        }
        if error is not None:
            rec["error"] = error
        line = json.dumps(rec, ensure_ascii=False)
        with self._lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


class ProviderClient:
    """Wraps a provider with retries, call accounting, an in-flight cap and an
    optional transcript. It satisfies the provider contract itself.

    ``calls`` counts logical requests; ``attempts`` includes retries.
    """

    def __init__(
        self,
        provider: CompletionProvider,
        retry: RetryPolicy | None = None,
        transcript: Transcript | None = None,
        max_in_flight: int = 4,
    ):
        self.provider = provider
        self.retry = retry or RetryPolicy()
        self.transcript = transcript
        self.max_in_flight = max_in_flight
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._lock = threading.Lock()
        self.calls = 0
        self.attempts = 0
        self.retries = 0
        self.failures = 0
        self.last_retries = 0

    @property
    def provider_id(self) -> str:
        return self.provider.provider_id

    def complete(self, request: ChatRequest) -> str:
        with self._lock:
            self.calls += 1
        retries = 0
        while True:
            with self._lock:
                self.attempts += 1
            t0 = time.perf_counter()
            try:
                with self._slots:
                    reply = self.provider.complete(request)
                if not reply or not reply.strip():
                    raise EmptyReplyError(f"{self.provider_id} returned an empty reply")
            except ProviderError as exc:
                self._log(request, None, t0, error=f"{type(exc).__name__}: {exc}")
                if exc.retryable and retries + 1 < self.retry.attempts:
                    delay = self.retry.delay(retries)
                    retries += 1
                    with self._lock:
                        self.retries += 1
                    logger.warning("%s: %s; retry %d in %.1fs", self.provider_id, exc, retries, delay)
                    self.retry.sleep(delay)
                    continue
                with self._lock:
                    self.failures += 1
                    self.last_retries = retries
                raise
            self._log(request, reply, t0)
            with self._lock:
                self.last_retries = retries
            return reply

    def _log(self, request, reply, t0, error=None):
        if self.transcript is not None:
            latency = (time.perf_counter() - t0) * 1000.0
            self.transcript.log(self.provider_id, request, reply, latency, error=error)

    def counters(self) -> dict:
        return {
            "calls": self.calls,
            "attempts": self.attempts,
            "retries": self.retries,
            "failures": self.failures,
        }
