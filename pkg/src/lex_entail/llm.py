"""Completion backends with deterministic parameters, disk caching, retry
with bounded exponential backoff, and a scripted mock for offline runs.

Cache layout: ``<cache_dir>/<first-2-hex>/<digest>.json``, one JSON record
per request digest, written atomically (temp file + rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Protocol

import httpx

API_KEY_ENV = "LEX_ENTAIL_API_KEY"

DEFAULT_MAX_TOKENS = 256
COT_STAGE1_MAX_TOKENS = 512


class BackendError(RuntimeError):
    """Base class for backend failures."""


class AuthenticationError(BackendError):
    """Credentials rejected; never retried."""


class MalformedResponseError(BackendError):
    """The backend answered but not in the expected shape."""


class RetryExhaustedError(BackendError):
    """Transient failures persisted past the retry budget."""


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.0
    top_p: float = 1.0
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.top_p <= 1):
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class CompletionRequest:
    model: str
    input: str
    params: GenerationParams = field(default_factory=GenerationParams)
    stage_tag: str = "single"

    def __post_init__(self) -> None:
        if not self.input:
            raise ValueError("request input must be nonempty")


@dataclass(frozen=True)
class CompletionRecord:
    request: CompletionRequest
    completion: str
    from_cache: bool
    backend_id: str
    timestamp: float


def cache_key(request: CompletionRequest) -> str:
    """Stable sha256 digest over model, input text, params and stage tag."""
    payload = json.dumps(
        {
            "model": request.model,
            "input": request.input,
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "frequency_penalty": request.params.frequency_penalty,
            "presence_penalty": request.params.presence_penalty,
            "max_tokens": request.params.max_tokens,
            "stage_tag": request.stage_tag,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class CompletionBackend(Protocol):
    backend_id: str

    def generate(self, request: CompletionRequest) -> str: ...


@dataclass
class MockRule:
    pattern: str  # literal substring; "*" matches everything
    completion: str

    def matches(self, text: str) -> bool:
        return self.pattern == "*" or self.pattern in text


class MockBackend:
    """Scripted backend: first matching rule wins; counts invocations."""

    def __init__(self, rules: list[MockRule], backend_id: str = "mock"):
        self.rules = rules
        self.backend_id = backend_id
        self.calls = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_rules(raw)

    @classmethod
    def from_rules(cls, raw: list[dict]) -> "MockBackend":
        rules = [MockRule(pattern=r["pattern"], completion=r["completion"]) for r in raw]
        return cls(rules)

    def generate(self, request: CompletionRequest) -> str:
        with self._lock:
            self.calls += 1
        for rule in self.rules:
            if rule.matches(request.input):
                return rule.completion
        raise BackendError("no mock rule matches the request input")


class TokenBucket:
    """Simple requests-per-minute limiter shared across workers."""

    def __init__(self, requests_per_minute: int, clock: Callable[[], float] = time.monotonic):
        self.capacity = max(1, requests_per_minute)
        self.tokens = float(self.capacity)
        self.rate = self.capacity / 60.0
        self.clock = clock
        self.updated = clock()
        self._lock = threading.Lock()

    def acquire(self, sleep: Callable[[float], None] = time.sleep) -> None:
        while True:
            with self._lock:
                now = self.clock()
                self.tokens = min(
                    float(self.capacity), self.tokens + (now - self.updated) * self.rate
                )
                self.updated = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                wait = (1 - self.tokens) / self.rate
            sleep(wait)


class HttpBackend:
    """OpenAI-compatible completions endpoint with retry and rate limiting.

    Bearer auth comes from LEX_ENTAIL_API_KEY; 429 and 5xx responses and
    transport errors are retried with exponential backoff; auth failures
    and other 4xx responses are not.
    """

    def __init__(
        self,
        base_url: str,
        model: str | None = None,
        max_attempts: int = 5,
        backoff_base: float = 0.5,
        backoff_cap: float = 30.0,
        requests_per_minute: int | None = None,
        sleep: Callable[[float], None] = time.sleep,
        client: httpx.Client | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.backend_id = f"http:{self.base_url}"
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.backoff_cap = backoff_cap
        self.bucket = TokenBucket(requests_per_minute) if requests_per_minute else None
        self.sleep = sleep
        self._client = client or httpx.Client(timeout=120.0)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        return headers

    def generate(self, request: CompletionRequest) -> str:
        body = {
            "model": request.model,
            "prompt": request.input,
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "frequency_penalty": request.params.frequency_penalty,
            "presence_penalty": request.params.presence_penalty,
            "max_tokens": request.params.max_tokens,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt > 0:
                delay = min(self.backoff_cap, self.backoff_base * 2 ** (attempt - 1))
                self.sleep(delay * (0.5 + random.random() / 2))
            if self.bucket is not None:
                self.bucket.acquire(self.sleep)
            try:
                response = self._client.post(
                    f"{self.base_url}/completions", json=body, headers=self._headers()
                )
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise AuthenticationError(
                    f"backend rejected credentials (HTTP {response.status_code})"
                )
            if response.status_code == 429 or response.status_code >= 500:
                last_error = BackendError(f"HTTP {response.status_code}: {response.text[:200]}")
                continue
            if response.status_code != 200:
                raise BackendError(f"HTTP {response.status_code}: {response.text[:200]}")
            try:
                payload = response.json()
                return payload["choices"][0]["text"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise MalformedResponseError(f"unexpected response shape: {exc}") from exc
        raise RetryExhaustedError(
            f"gave up after {self.max_attempts} attempts: {last_error}"
        )


class DiskCache:
    """Content-addressed on-disk store of completion records."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, digest: str) -> Path:
        return self.root / digest[:2] / f"{digest}.json"

    def get(self, digest: str) -> Optional[dict]:
        path = self._path(digest)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, digest: str, document: dict) -> None:
        path = self._path(digest)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(document, fh, ensure_ascii=False, indent=2)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def entries(self) -> list[Path]:
        return sorted(self.root.glob("*/*.json"))

    def stats(self) -> dict:
        paths = self.entries()
        return {
            "entries": len(paths),
            "bytes": sum(p.stat().st_size for p in paths),
            "root": str(self.root),
        }

    def prune(self) -> int:
        removed = 0
        for path in self.entries():
            path.unlink()
            removed += 1
        for sub in sorted(self.root.glob("*")):
            if sub.is_dir() and not any(sub.iterdir()):
                sub.rmdir()
        return removed


class CompletionClient:
    """complete() with cache-first semantics; safe for concurrent workers."""

    def __init__(
        self,
        backend: CompletionBackend,
        cache: DiskCache | None = None,
        model: str = "mock",
    ):
        self.backend = backend
        self.cache = cache
        self.model = model

    def request(
        self,
        input_text: str,
        params: GenerationParams | None = None,
        stage_tag: str = "single",
    ) -> CompletionRequest:
        return CompletionRequest(
            model=self.model,
            input=input_text,
            params=params or GenerationParams(),
            stage_tag=stage_tag,
        )

    def complete(self, request: CompletionRequest) -> CompletionRecord:
        digest = cache_key(request)
        if self.cache is not None:
            stored = self.cache.get(digest)
            if stored is not None:
                return CompletionRecord(
                    request=request,
                    completion=stored["completion"],
                    from_cache=True,
                    backend_id=stored.get("backend_id", self.backend.backend_id),
                    timestamp=stored.get("timestamp", 0.0),
                )
        completion = self.backend.generate(request)
        timestamp = time.time()
        if self.cache is not None:
            self.cache.put(
                digest,
                {
                    "digest": digest,
                    "model": request.model,
                    "input": request.input,
                    "params": {
                        "temperature": request.params.temperature,
                        "top_p": request.params.top_p,
                        "frequency_penalty": request.params.frequency_penalty,
                        "presence_penalty": request.params.presence_penalty,
                        "max_tokens": request.params.max_tokens,
                    },
                    "stage_tag": request.stage_tag,
                    "completion": completion,
                    "backend_id": self.backend.backend_id,
                    "timestamp": timestamp,
                },
            )
        return CompletionRecord(
            request=request,
            completion=completion,
            from_cache=False,
            backend_id=self.backend.backend_id,
            timestamp=timestamp,
        )
