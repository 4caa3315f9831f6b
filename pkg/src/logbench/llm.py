"""Chat-completion backends: one remote HTTP client and two deterministic mocks.

All backends answer one prompt with one assistant message. The remote client
retries transient failures with exponential backoff, never exceeds the
configured request rate over any 60-second window, and reads its API key
from the environment only (``LOGBENCH_API_KEY``, falling back to
``OPENAI_API_KEY``). A persistent append-only cache makes completed runs
replayable without network traffic.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping, Optional

import requests

from .datasets import Dataset
from .errors import (
    AuthError,
    BackendError,
    CacheIoError,
    FixtureMiss,
    RateLimitExhausted,
    TransportError,
)
from .prompts import PromptSpec
from .templates import LogRecord

API_KEY_ENV = "LOGBENCH_API_KEY"
API_KEY_FALLBACK_ENV = "OPENAI_API_KEY"

BACKEND_KINDS = ("remote", "mock_echo", "mock_fixture")


def prompt_fingerprint(text: str) -> str:
    """Stable content hash used for cache keys and fixture lookups."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock_echo"
    model_id: str = "gpt-3.5-turbo-0301"
    endpoint_url: str = ""
    # Decoding defaults to greedy; the most reproducible choice.
    temperature: float = 0.0
    max_retries: int = 3
    requests_per_minute: int = 60
    timeout_seconds: float = 30.0
    fixture_path: str = ""

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind {self.kind!r}; expected one of {BACKEND_KINDS}")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.requests_per_minute < 1:
            raise ValueError(f"requests_per_minute must be >= 1, got {self.requests_per_minute}")
        if self.timeout_seconds <= 0:
            raise ValueError(f"timeout_seconds must be > 0, got {self.timeout_seconds}")


@dataclass(frozen=True)
class RawResponse:
    text: str
    cached: bool = False
    attempt_count: int = 1


class RateLimiter:
    """Sliding-window limiter: at most `rate` acquisitions per 60 seconds.

    Stricter than a refilling bucket, which can burst past the per-window
    bound right after startup.
    """

    def __init__(self, rate: int, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        self.rate = rate
        self._clock = clock
        self._sleep = sleep
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= 60.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.rate:
                    self._stamps.append(now)
                    return
                self._sleep(60.0 - (now - self._stamps[0]))


class Backend:
    """Common surface: one prompt in, one assistant message out."""

    model_id: str

    def __init__(self):
        self.calls_made = 0

    def complete(self, prompt: PromptSpec, record: Optional[LogRecord] = None) -> RawResponse:
        self.calls_made += 1
        return self._complete(prompt, record)

    def _complete(self, prompt: PromptSpec, record: Optional[LogRecord]) -> RawResponse:
        raise NotImplementedError


class EchoBackend(Backend):
    """Returns the target log's ground-truth template, wrapped in backticks.

    Prefers the record passed by the runner (exact even when two records
    share content but not truth); otherwise falls back to a content lookup
    over the bound dataset.
    """

    def __init__(self, config: BackendConfig, dataset: Optional[Dataset] = None):
        super().__init__()
        self.model_id = config.model_id
        self._truth_by_content: dict[str, str] = {}
        if dataset is not None:
            for rec in dataset.records:
                self._truth_by_content.setdefault(rec.content, rec.truth_template.raw)

    def _complete(self, prompt: PromptSpec, record: Optional[LogRecord]) -> RawResponse:
        if record is not None:
            truth = record.truth_template.raw
        else:
            try:
                truth = self._truth_by_content[prompt.target_log]
            except KeyError:
                raise BackendError(
                    f"echo backend has no ground truth for log {prompt.target_log!r}"
                ) from None
        return RawResponse(text=f"`{truth}'")


class FixtureBackend(Backend):
    """Replays canned responses keyed by the prompt's content hash."""

    def __init__(self, config: BackendConfig):
        super().__init__()
        self.model_id = config.model_id
        path = Path(config.fixture_path)
        if not config.fixture_path or not path.exists():
            raise BackendError(f"fixture file not found: {config.fixture_path!r}")
        self._responses: dict[str, str] = json.loads(path.read_text(encoding="utf-8"))

    def _complete(self, prompt: PromptSpec, record: Optional[LogRecord]) -> RawResponse:
        key = prompt_fingerprint(prompt.rendered)
        if key not in self._responses:
            raise FixtureMiss(f"no fixture entry for prompt hash {key}")
        return RawResponse(text=self._responses[key])


def write_fixture(path: str | Path, responses: Mapping[str, str]) -> None:
    """Persist a {rendered prompt text -> response} mapping as a fixture file."""
    hashed = {prompt_fingerprint(rendered): text for rendered, text in responses.items()}
    Path(path).write_text(json.dumps(hashed, indent=2, sort_keys=True), encoding="utf-8")


_RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


class RemoteBackend(Backend):
    """HTTP chat-completion client with retry, backoff, and rate limiting."""

    def __init__(
        self,
        config: BackendConfig,
        transport: Optional[Callable[..., requests.Response]] = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
        backoff_base: float = 0.5,
        in_flight_limit: int = 4,
    ):
        super().__init__()
        if not config.endpoint_url:
            raise ValueError("remote backend requires endpoint_url")
        self.model_id = config.model_id
        self.config = config
        self._transport = transport or requests.post
        self._sleep = sleep
        self._backoff_base = backoff_base
        self._limiter = RateLimiter(config.requests_per_minute, clock=clock, sleep=sleep)
        self._slots = threading.Semaphore(in_flight_limit)
        api_key = os.environ.get(API_KEY_ENV) or os.environ.get(API_KEY_FALLBACK_ENV)
        if not api_key:
            raise AuthError(
                f"no API key found; set {API_KEY_ENV} (or {API_KEY_FALLBACK_ENV})"
            )
        self._headers = {
            "Authorization": f"Bearer {api_key}",
            "Content-Type": "application/json",
        }

    def _complete(self, prompt: PromptSpec, record: Optional[LogRecord]) -> RawResponse:
        payload = {
            "model": self.config.model_id,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt.rendered}],
        }
        attempts = self.config.max_retries + 1
        last_failure = "no attempt made"
        for attempt in range(1, attempts + 1):
            self._limiter.acquire()
            try:
                with self._slots:
                    response = self._transport(
                        self.config.endpoint_url,
                        json=payload,
                        headers=self._headers,
                        timeout=self.config.timeout_seconds,
                    )
            except requests.Timeout:
                last_failure = "request timed out"
            except requests.RequestException as exc:
                raise TransportError(f"request failed: {exc}") from exc
            else:
                if response.status_code in (401, 403):
                    raise AuthError(f"credentials rejected (HTTP {response.status_code})")
                if response.status_code in _RETRYABLE_STATUS:
                    last_failure = f"HTTP {response.status_code}"
                elif response.status_code != 200:
                    raise TransportError(f"HTTP {response.status_code}: {response.text[:200]}")
                else:
                    return RawResponse(
                        text=_assistant_text(response), attempt_count=attempt
                    )
            if attempt < attempts:
                self._sleep(self._backoff_base * (2 ** (attempt - 1)))
        raise RateLimitExhausted(
            f"gave up after {attempts} attempt(s); last failure: {last_failure}"
        )


def _assistant_text(response: requests.Response) -> str:
    try:
        body = response.json()
        return body["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"malformed completion payload: {exc}") from exc


def make_backend(
    config: BackendConfig,
    dataset: Optional[Dataset] = None,
    **remote_kwargs,
) -> Backend:
    if config.kind == "mock_echo":
        return EchoBackend(config, dataset)
    if config.kind == "mock_fixture":
        return FixtureBackend(config)
    return RemoteBackend(config, **remote_kwargs)


def complete(
    prompt: PromptSpec,
    config: BackendConfig,
    record: Optional[LogRecord] = None,
    dataset: Optional[Dataset] = None,
    backend: Optional[Backend] = None,
) -> RawResponse:
    """One-shot completion; builds a transient backend unless one is given."""
    if backend is None:
        backend = make_backend(config, dataset)
    return backend.complete(prompt, record)


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0


class ResponseCache:
    """Append-only JSONL cache of responses, keyed by (model id, prompt hash).

    One record per line; a crash mid-write loses at most the final record.
    Duplicate keys resolve last-write-wins on load.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, str] = {}
        self.stats = CacheStats()
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open(encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    key = record["key"]
                    response = record["response"]
                except (ValueError, KeyError, TypeError) as exc:
                    raise CacheIoError(f"{self.path}: line {number}: {exc}") from exc
                if not isinstance(response, str):
                    raise CacheIoError(f"{self.path}: line {number}: response is not text")
                self._entries[key] = response

    @staticmethod
    def _key(model_id: str, prompt_sha: str) -> str:
        return hashlib.sha256(f"{model_id}:{prompt_sha}".encode("utf-8")).hexdigest()

    def get(self, model_id: str, prompt_sha: str) -> Optional[str]:
        with self._lock:
            hit = self._entries.get(self._key(model_id, prompt_sha))
        if hit is None:
            self.stats.misses += 1
        else:
            self.stats.hits += 1
        return hit

    def put(self, model_id: str, prompt_sha: str, response: str) -> None:
        record = {
            "key": self._key(model_id, prompt_sha),
            "model": model_id,
            "prompt_sha": prompt_sha,
            "response": response,
            "ts": datetime.now(timezone.utc).isoformat(),
        }
        line = json.dumps(record, sort_keys=True)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
            self._entries[record["key"]] = response

    def __len__(self) -> int:
        return len(self._entries)


def cached_complete(
    prompt: PromptSpec,
    backend: "Backend | BackendConfig",
    cache: Optional[ResponseCache],
    record: Optional[LogRecord] = None,
    dataset: Optional[Dataset] = None,
) -> RawResponse:
    """Serve from the cache when possible; otherwise complete and persist.

    Accepts a live backend, or a config from which a transient one is built.
    """
    if isinstance(backend, BackendConfig):
        backend = make_backend(backend, dataset=dataset)
    if cache is None:
        return backend.complete(prompt, record)
    sha = prompt_fingerprint(prompt.rendered)
    hit = cache.get(backend.model_id, sha)
    if hit is not None:
        return RawResponse(text=hit, cached=True)
    response = backend.complete(prompt, record)
    cache.put(backend.model_id, sha, response.text)
    return response
