"""Uniform completion/embedding interface over remote endpoints and mocks.

The HTTP provider speaks the common JSON chat-completions shape (configurable
base URL, path, model, bearer token), which covers any engine serving that
protocol. Mocks make the whole pipeline bit-deterministic for tests.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

import httpx

from .errors import (
    DimensionMismatch,
    ProviderError,
    Timeout,
    TransportError,
    UnscriptedRequest,
)
from .models import GenerationParams

logger = logging.getLogger(__name__)

# HTTP statuses worth retrying: rate limiting and server-side hiccups.
_TRANSIENT_STATUSES = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class CompletionRequest:
    system_prompt: str
    user_prompt: str
    params: GenerationParams
    model_name: str
    # routing hints for mocks and logging (part name, case id); never sent
    # upstream
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.system_prompt or not self.user_prompt:
            raise ValueError("prompts must be nonempty")
        if not self.model_name:
            raise ValueError("model_name must be nonempty")
        object.__setattr__(self, "metadata", dict(self.metadata))


@dataclass(frozen=True)
class CompletionResult:
    text: str
    token_usage: tuple[int, int] | None = None
    latency_ms: int = 0


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("embedding must have positive dimension")

    @property
    def dim(self) -> int:
        return len(self.values)


class ChatProvider(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionResult: ...


class Embedder(Protocol):
    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...

    def cache_key(self) -> str: ...


def _redact(headers: Mapping[str, str]) -> dict[str, str]:
    return {
        k: ("<redacted>" if k.lower() == "authorization" else v)
        for k, v in headers.items()
    }


class HttpChatProvider:
    """Chat-completions client with bounded retries and in-flight throttling.

    Transport failures and transient statuses (429/5xx) are retried with
    exponential backoff; other 4xx responses are semantic errors and fail
    immediately.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        path: str = "/v1/chat/completions",
        retry_max: int = 3,
        backoff_base: float = 0.5,
        timeout: float = 60.0,
        max_in_flight: int = 4,
        verbose: bool = False,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.path = path
        self.retry_max = retry_max
        self.backoff_base = backoff_base
        self.verbose = verbose
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(
            headers=headers, timeout=timeout, transport=transport
        )
        self._gate = threading.Semaphore(max(1, max_in_flight))

    def complete(self, request: CompletionRequest) -> CompletionResult:
        payload = {
            "model": request.model_name,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "top_k": request.params.top_k,
            "max_tokens": request.params.max_new_tokens,
        }
        url = self.base_url + self.path
        last_exc: Exception | None = None
        for attempt in range(self.retry_max + 1):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            start = time.monotonic()
            try:
                with self._gate:
                    response = self._client.post(url, json=payload)
            except httpx.TimeoutException as exc:
                last_exc = Timeout(f"request to {url} timed out: {exc}")
                continue
            except httpx.TransportError as exc:
                last_exc = TransportError(f"transport failure for {url}: {exc}")
                continue
            if self.verbose:
                logger.debug(
                    "POST %s headers=%s status=%d body=%s",
                    url,
                    _redact(dict(self._client.headers)),
                    response.status_code,
                    response.text[:2000],
                )
            if response.status_code in _TRANSIENT_STATUSES:
                last_exc = ProviderError(response.status_code, response.text)
                continue
            if response.status_code >= 400:
                raise ProviderError(response.status_code, response.text)
            return self._parse_completion(response, start)
        assert last_exc is not None
        raise last_exc

    @staticmethod
    def _parse_completion(response: httpx.Response, start: float) -> CompletionResult:
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise ProviderError(
                response.status_code, f"malformed completion body: {exc}"
            ) from exc
        usage = body.get("usage") or {}
        token_usage = None
        if "prompt_tokens" in usage and "completion_tokens" in usage:
            token_usage = (int(usage["prompt_tokens"]), int(usage["completion_tokens"]))
        return CompletionResult(
            text=text,
            token_usage=token_usage,
            latency_ms=int((time.monotonic() - start) * 1000),
        )


ScriptValue = str | Sequence[str]


def _script_key(part: str | None, case_id: str | None) -> tuple[str, str]:
    return (part or "", case_id or "")


class MockChatProvider:
    """Deterministic provider answering from a script.

    Script keys are ``(part, case_id)`` tuples or ``"part:case_id"`` strings
    split on the last colon (case ids must not contain one); ``case_id`` may
    be ``"*"`` to match any case, and a bare part name means the same. A value
    may be a sequence of responses consumed call by call (the last one
    repeats), which lets tests script retry behavior. Every call is recorded
    in ``calls``.
    """

    def __init__(self, script: Mapping):
        self._sequences: dict[tuple[str, str], list[str]] = {}
        self._cursor: dict[tuple[str, str], int] = {}
        for raw_key, value in script.items():
            if isinstance(raw_key, tuple):
                key = _script_key(*raw_key)
            else:
                part, sep, case_id = str(raw_key).rpartition(":")
                if not sep:
                    part, case_id = case_id, "*"
                key = _script_key(part, case_id or "*")
            if isinstance(value, str):
                responses = [value]
            else:
                responses = [str(v) for v in value]
            if not responses:
                raise ValueError(f"script key {raw_key!r} has no responses")
            self._sequences[key] = responses
            self._cursor[key] = 0
        self.calls: list[CompletionRequest] = []
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> CompletionResult:
        part = request.metadata.get("part", "")
        case_id = request.metadata.get("case_id", "")
        with self._lock:
            self.calls.append(request)
            for key in (_script_key(part, case_id), _script_key(part, "*")):
                if key in self._sequences:
                    responses = self._sequences[key]
                    i = self._cursor[key]
                    self._cursor[key] = min(i + 1, len(responses) - 1)
                    return CompletionResult(text=responses[i])
        raise UnscriptedRequest(
            f"no scripted response for part={part!r} case_id={case_id!r}"
        )


def load_script(path) -> dict[str, str | list[str]]:
    """Read a mock script from a JSON object file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("mock script must be a JSON object")
    return data


class HashingEmbedder:
    """Deterministic hashed bag-of-words embedder for tests and offline runs.

    Terms are hashed into a fixed number of buckets with signed counts, then
    L2-normalized, so identical texts always map to identical vectors.
    """

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim

    def cache_key(self) -> str:
        return f"hash-bow:{self.dim}"

    def _bucket(self, term: str) -> int:
        digest = hashlib.md5(term.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") % self.dim

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        _check_embed_inputs(texts)
        from .retrieval import tokenize

        out = []
        for text in texts:
            vec = [0.0] * self.dim
            for term in tokenize(text):
                vec[self._bucket(term)] += 1.0
            norm = sum(v * v for v in vec) ** 0.5
            if norm > 0:
                vec = [v / norm for v in vec]
            out.append(EmbeddingVector(tuple(vec)))
        return out


class HttpEmbedder:
    """Client for a JSON embeddings endpoint (``{"model", "input": [...]}``)."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str = "",
        path: str = "/v1/embeddings",
        timeout: float = 60.0,
        retry_max: int = 3,
        backoff_base: float = 0.5,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.path = path
        self.retry_max = retry_max
        self.backoff_base = backoff_base
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(headers=headers, timeout=timeout)

    def cache_key(self) -> str:
        return f"http:{self.model}"

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        _check_embed_inputs(texts)
        url = self.base_url + self.path
        payload = {"model": self.model, "input": list(texts)}
        last_exc: Exception | None = None
        for attempt in range(self.retry_max + 1):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._client.post(url, json=payload)
            except httpx.TimeoutException as exc:
                last_exc = Timeout(f"request to {url} timed out: {exc}")
                continue
            except httpx.TransportError as exc:
                last_exc = TransportError(f"transport failure for {url}: {exc}")
                continue
            if response.status_code in _TRANSIENT_STATUSES:
                last_exc = ProviderError(response.status_code, response.text)
                continue
            if response.status_code >= 400:
                raise ProviderError(response.status_code, response.text)
            return self._parse_embeddings(response, len(texts))
        assert last_exc is not None
        raise last_exc

    @staticmethod
    def _parse_embeddings(response: httpx.Response, expected: int) -> list[EmbeddingVector]:
        try:
            rows = response.json()["data"]
            vectors = [EmbeddingVector(tuple(row["embedding"])) for row in rows]
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ProviderError(
                response.status_code, f"malformed embeddings body: {exc}"
            ) from exc
        if len(vectors) != expected:
            raise DimensionMismatch(
                f"provider returned {len(vectors)} vectors for {expected} inputs"
            )
        dims = {v.dim for v in vectors}
        if len(dims) > 1:
            raise DimensionMismatch(f"provider returned ragged dimensions {sorted(dims)}")
        return vectors


def _check_embed_inputs(texts: Sequence[str]) -> None:
    if not texts:
        raise ValueError("embed() requires a nonempty list of texts")
    for i, text in enumerate(texts):
        if not text:
            raise ValueError(f"embed() input {i} is empty")
