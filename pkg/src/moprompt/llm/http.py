"""Chat-completion provider over HTTP (OpenAI-compatible wire format)."""
from __future__ import annotations

import os

import requests

from .providers import ChatRequest, EmptyReplyError, ProviderError, RateLimitError, TransportError


class MissingAPIKeyError(ProviderError):
    pass


class HTTPChatProvider:
    """POSTs ``{"model", "messages", "temperature", "max_tokens"}`` to ``url``
    and reads ``choices[0].message.content`` from the reply.

    The API key is read from the environment variable ``api_key_env`` at
    construction time; pass ``api_key_env=None`` for keyless local servers.
    """

    def __init__(self, url: str, model: str, api_key_env: str | None = "OPENAI_API_KEY",
                 timeout: float = 60.0, session: requests.Session | None = None):
        self.url = url
        self.model = model
        self.timeout = timeout
        self.provider_id = model
        self.api_key = None
        if api_key_env:
            self.api_key = os.environ.get(api_key_env)
            if not self.api_key:
                raise MissingAPIKeyError(f"environment variable {api_key_env} is not set")
        self.session = session or requests.Session()

    def payload(self, request: ChatRequest) -> dict:
        return {
            "model": self.model,
            "messages": request.messages(),
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }

    def complete(self, request: ChatRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self.session.post(self.url, json=self.payload(request), headers=headers,
                                     timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc

        if resp.status_code == 429:
            raise RateLimitError(f"rate limited by {self.url}")
        if resp.status_code >= 500:
            raise TransportError(f"{self.url} answered {resp.status_code}")
        if resp.status_code >= 400:
            raise ProviderError(f"{self.url} answered {resp.status_code}: {resp.text[:200]}")

        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion payload: {exc}") from exc
        if not content or not content.strip():
            raise EmptyReplyError(f"{self.model} returned an empty reply")
        return content
