"""Chat-completion endpoint client with retry/backoff semantics.

Transient transport problems (timeouts, connection failures, 429 and
5xx statuses) are retried with exponential backoff. Credential problems
are never retried, and response-content problems are surfaced to the
caller untouched: what the model said is the experiment's data.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import httpx

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from ..errors import AuthError, ParseError, Timeout, TransportError

RETRY_STATUSES = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class EndpointConfig:
    """Where and how to talk to a chat-completion API.

    The credential is read from the environment variable named by
    ``credential_env``; it is never passed as a flag or stored in files.
    """

    base_url: str
    model: str
    credential_env: str | None = None
    timeout_s: float = 60.0
    max_retries: int = 3
    max_in_flight: int = 1
    backoff_s: float = 1.0

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    @classmethod
    def from_file(cls, path: str | Path) -> "EndpointConfig":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        section = raw.get("endpoint", raw)
        for key in ("base_url", "model"):
            if key not in section:
                raise ParseError(str(path), 1, f"endpoint config needs {key!r}")
        return cls(
            base_url=section["base_url"],
            model=section["model"],
            credential_env=section.get("credential_env"),
            timeout_s=float(section.get("timeout_s", 60.0)),
            max_retries=int(section.get("max_retries", 3)),
            max_in_flight=int(section.get("max_in_flight", 1)),
            backoff_s=float(section.get("backoff_s", 1.0)),
        )


@dataclass(frozen=True)
class ChatExchange:
    """One request/response pair, stored verbatim for audit."""

    request_text: str
    raw_response: str
    endpoint: str
    latency_s: float
    timestamp: str
    retries: int = 0


def classify_remote(
    prompt: str, config: EndpointConfig, transport: httpx.BaseTransport | None = None
) -> ChatExchange:
    """Submit one prompt and return the verbatim completion text.

    Raises Timeout or TransportError once retries are exhausted, and
    AuthError immediately on missing credentials or 401/403 — auth
    failures are never retried.
    """
    headers = {"content-type": "application/json"}
    if config.credential_env:
        token = os.environ.get(config.credential_env)
        if not token:
            raise AuthError(f"environment variable {config.credential_env} is not set")
        headers["authorization"] = f"Bearer {token}"
    url = config.base_url.rstrip("/") + "/chat/completions"
    body = {"model": config.model, "messages": [{"role": "user", "content": prompt}]}

    last_error: Exception | None = None
    with httpx.Client(transport=transport, timeout=config.timeout_s) as client:
        for attempt in range(config.max_retries + 1):
            if attempt > 0 and config.backoff_s > 0:
                time.sleep(config.backoff_s * 2 ** (attempt - 1))
            started = time.monotonic()
            try:
                response = client.post(url, json=body, headers=headers)
            except httpx.TimeoutException as exc:
                last_error = Timeout(f"{url}: {exc}")
                continue
            except httpx.TransportError as exc:
                last_error = TransportError(f"{url}: {exc}")
                continue
            latency = time.monotonic() - started
            if response.status_code in (401, 403):
                raise AuthError(f"{url}: credentials rejected ({response.status_code})")
            if response.status_code in RETRY_STATUSES:
                last_error = TransportError(f"{url}: HTTP {response.status_code}")
                continue
            if response.status_code != 200:
                raise TransportError(f"{url}: HTTP {response.status_code}")
            try:
                content = response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise TransportError(f"{url}: malformed completion body ({exc})") from exc
            return ChatExchange(
                request_text=prompt,
                raw_response=str(content),
                endpoint=f"{config.base_url} model={config.model}",
                latency_s=latency,
                timestamp=datetime.now(timezone.utc).isoformat(),
                retries=attempt,
            )
    if isinstance(last_error, Timeout):
        raise Timeout(f"{url}: gave up after {config.max_retries + 1} attempts") from last_error
    raise TransportError(f"{url}: gave up after {config.max_retries + 1} attempts") from last_error


class RemoteEndpoint:
    """Submission adapter around classify_remote for run_experiment."""

    def __init__(self, config: EndpointConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self.transport = transport

    @property
    def model(self) -> str:
        return self.config.model

    def submit(self, prompt: str) -> ChatExchange:
        return classify_remote(prompt, self.config, self.transport)
