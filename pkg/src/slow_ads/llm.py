"""Black-box completion client.

The HTTP backend speaks the chat-completion protocol; a rule-based mock covers
offline runs. Transient failures are retried with exponential backoff and raw
responses land in a content-addressed disk cache.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Protocol, Sequence

import httpx

from .errors import AuthError, LlmError, RetriesExhausted

log = logging.getLogger(__name__)

TRANSIENT_STATUS = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


class TransientError(LlmError):
    """Worth retrying: rate limits, 5xx, timeouts, dropped connections."""


@dataclass(frozen=True)
class LlmConfig:
    model_id: str = "mock"
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    backend: str = "http"  # or "mock"
    temperature: float = 0.0
    max_output_tokens: int = 512
    timeout: float = 60.0
    max_retries: int = 5
    max_in_flight: int = 4
    api_key_env: str = "OPENAI_API_KEY"
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    backoff_base: float = 1.0
    backoff_max: float = 30.0

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.backend not in ("http", "mock"):
            raise ValueError(f"unknown backend {self.backend!r}")


class Backend(Protocol):
    def __call__(self, prompt: str, config: LlmConfig) -> str: ...


class HttpBackend:
    """Single-user-message chat completion over HTTP.

    The API key is read from the environment variable named in the config.
    ``transport`` lets tests swap in ``httpx.MockTransport``.
    """

    def __init__(self, transport: httpx.BaseTransport | None = None):
        self._transport = transport
        self._clients: dict[float, httpx.Client] = {}
        self._lock = threading.Lock()

    def _client(self, timeout: float) -> httpx.Client:
        with self._lock:
            if timeout not in self._clients:
                self._clients[timeout] = httpx.Client(timeout=timeout, transport=self._transport)
            return self._clients[timeout]

    def __call__(self, prompt: str, config: LlmConfig) -> str:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(config.api_key_env)
        if key:
            headers[config.auth_header] = f"{config.auth_scheme} {key}".strip()
        payload = {
            "model": config.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.temperature,
            "max_tokens": config.max_output_tokens,
        }
        try:
            resp = self._client(config.timeout).post(config.endpoint, json=payload, headers=headers)
        except httpx.TransportError as exc:
            raise TransientError(f"transport error: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"HTTP {resp.status_code}: check ${config.api_key_env}", resp.status_code)
        if resp.status_code in TRANSIENT_STATUS:
            raise TransientError(f"HTTP {resp.status_code}", resp.status_code)
        if resp.status_code >= 400:
            raise LlmError(f"HTTP {resp.status_code}: {resp.text[:200]}", resp.status_code)
        try:
            return resp.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise LlmError(f"unexpected response body: {resp.text[:200]}", resp.status_code) from exc


Template = str | Callable[[re.Match], str]


def _echo(prompt: str) -> str:
    from .prompt import DICT_TEMPLATE, VANILLA_TEMPLATE

    vanilla_head = VANILLA_TEMPLATE.split("{source_language}")[0]
    if prompt.startswith(vanilla_head) and ": " in prompt:
        sentence = prompt.split(": ", 1)[1]
    elif prompt.startswith(DICT_TEMPLATE.split("{source_language}")[0]):
        sentence = prompt.split("\n")[1]
    else:
        sentence = prompt
    return f"The refined translation is: {sentence}"


class MockBackend:
    """Deterministic rule-based backend.

    Rules are ``(pattern, template)`` pairs tried in order with ``re.search``
    (DOTALL). A string template is expanded with the match groups (``\\1``,
    ``\\g<name>``); a callable template receives the match. Prompts no rule
    matches get the echo rule: the sentence back after the response marker.
    """

    def __init__(self, rules: Iterable[tuple[str | re.Pattern, Template]] = ()):
        self.rules = [
            (re.compile(p, re.DOTALL) if isinstance(p, str) else p, t) for p, t in rules
        ]
        self.calls = 0
        self._lock = threading.Lock()

    def __call__(self, prompt: str, config: LlmConfig | None = None) -> str:
        with self._lock:
            self.calls += 1
        for pattern, template in self.rules:
            m = pattern.search(prompt)
            if m:
                return template(m) if callable(template) else m.expand(template)
        return _echo(prompt)


@dataclass(frozen=True)
class Completion:
    text: str
    attempts: int


def complete(
    config: LlmConfig,
    prompt: str,
    backend: Backend,
    sleep: Callable[[float], None] = time.sleep,
) -> Completion:
    """Call ``backend`` with exponential backoff on transient failures."""
    last: LlmError | None = None
    for attempt in range(1, config.max_retries + 2):
        try:
            return Completion(backend(prompt, config), attempt)
        except TransientError as exc:
            last = exc
            if attempt > config.max_retries:
                break
            delay = min(config.backoff_base * 2 ** (attempt - 1), config.backoff_max)
            log.info("transient failure (%s); retry %d in %.1fs", exc, attempt, delay)
            sleep(delay)
    raise RetriesExhausted(
        f"gave up after {config.max_retries + 1} attempts: {last}",
        getattr(last, "status", None),
        config.max_retries + 1,
    )


def cache_key(model_id: str, prompt: str) -> str:
    return hashlib.sha256(json.dumps([model_id, prompt]).encode("utf-8")).hexdigest()


class ResponseCache:
    """One JSON file per (model, prompt) under ``root/<key[:2]>/<key>.json``."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, model_id: str, prompt: str) -> str | None:
        key = cache_key(model_id, prompt)
        path = self.path(key)
        if not path.is_file():
            return None
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
            if record["model_id"] != model_id or record["prompt"] != prompt:
                raise ValueError("key collision")
            return record["response"]
        except (ValueError, KeyError, TypeError, OSError) as exc:
            log.warning("ignoring corrupt cache record %s (%s)", path, exc)
            return None

    def put(self, model_id: str, prompt: str, response: str, attempts: int = 1) -> None:
        key = cache_key(model_id, prompt)
        record = {
            "cache_key": key,
            "model_id": model_id,
            "prompt": prompt,
            "response": response,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "attempt_count": attempts,
        }
        path = self.path(key)
        path.parent.mkdir(exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(record, f, ensure_ascii=False)
        os.replace(tmp, path)

    def records(self) -> Iterable[Path]:
        return self.root.glob("??/*.json")


def cache_stats(root: str | Path) -> dict:
    models: dict[str, int] = {}
    count = corrupt = size = 0
    for path in ResponseCache(root).records():
        size += path.stat().st_size
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
            models[record["model_id"]] = models.get(record["model_id"], 0) + 1
            count += 1
        except (ValueError, KeyError, TypeError):
            corrupt += 1
    return {"records": count, "corrupt": corrupt, "bytes": size, "models": models}


class LlmClient:
    """Shareable client. At most ``max_in_flight`` backend calls run at once.

    Two threads missing on the same key may both call the backend; the atomic
    rename leaves a single record either way.
    """

    def __init__(
        self,
        config: LlmConfig,
        cache_dir: str | Path | None = None,
        backend: Backend | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        if backend is None:
            backend = MockBackend() if config.backend == "mock" else HttpBackend()
        self.backend = backend
        self.cache = ResponseCache(cache_dir) if cache_dir is not None else None
        self._sleep = sleep
        self._gate = threading.BoundedSemaphore(config.max_in_flight)
        self._lock = threading.Lock()
        self.backend_calls = 0
        self.cache_hits = 0

    def complete(self, prompt: str) -> str:
        if self.cache is not None:
            hit = self.cache.get(self.config.model_id, prompt)
            if hit is not None:
                with self._lock:
                    self.cache_hits += 1
                return hit
        with self._gate:
            with self._lock:
                self.backend_calls += 1
            result = complete(self.config, prompt, self.backend, self._sleep)
        if self.cache is not None:
            self.cache.put(self.config.model_id, prompt, result.text, result.attempts)
        return result.text

    def complete_many(self, prompts: Sequence[str]) -> list[str | Exception]:
        """Complete in parallel; failed calls come back as the exception."""

        def one(prompt: str) -> str | Exception:
            try:
                return self.complete(prompt)
            except LlmError as exc:
                log.warning("completion failed: %s", exc)
                return exc

        if self.config.max_in_flight == 1 or len(prompts) <= 1:
            return [one(p) for p in prompts]
        with ThreadPoolExecutor(self.config.max_in_flight) as pool:
            return list(pool.map(one, prompts))


def cached_complete(config: LlmConfig, cache: str | Path, prompt: str, backend: Backend | None = None) -> str:
    return LlmClient(config, cache, backend).complete(prompt)
