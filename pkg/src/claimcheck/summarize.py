"""Condensed query generation for cleaned claim text.

Two backends share one interface: a built-in baseline that truncates to
the first k space-separated tokens, and an external neural summarizer
spoken to over a small wire protocol (HTTP POST /summarize, or
line-delimited JSON on a subprocess's standard streams):

    request:  {"text": str, "decoding": {"strategy": "greedy|beam|top_k|top_p",
               "beam_width": int?, "no_repeat_ngram": int?, "top_k": int?,
               "top_p": float?, "max_tokens": int, "early_stopping": bool}}
    response: {"summary": str}   |   {"error": str}

Generated queries carry a fingerprint of the full summarizer configuration
so a local cache can guarantee that repeated experiments reuse byte-identical
queries.
"""

from __future__ import annotations

import enum
import hashlib
import json
import shlex
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import BackendError, ConfigError, InputValidationError


class DecodingStrategy(enum.Enum):
    GREEDY = "greedy"
    BEAM = "beam"
    TOP_K = "top_k"
    TOP_P = "top_p"


@dataclass(frozen=True)
class DecodingConfig:
    """Generation parameters passed verbatim to an external summarizer.

    Exactly the fields relevant to the strategy may be set: beam_width for
    beam search, top_k / top_p for the sampling strategies. no_repeat_ngram
    optionally forbids repeated n-grams under any strategy.
    """

    strategy: DecodingStrategy
    max_tokens: int
    early_stopping: bool = False
    beam_width: int | None = None
    no_repeat_ngram: int | None = None
    top_k: int | None = None
    top_p: float | None = None

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ConfigError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.no_repeat_ngram is not None and self.no_repeat_ngram < 1:
            raise ConfigError("no_repeat_ngram must be >= 1 when set")
        s = self.strategy
        if s is DecodingStrategy.BEAM:
            if self.beam_width is None or self.beam_width < 1:
                raise ConfigError("beam decoding requires beam_width >= 1")
        elif self.beam_width is not None:
            raise ConfigError(f"beam_width is only valid for beam decoding, not {s.value}")
        if s is DecodingStrategy.TOP_K:
            if self.top_k is None or self.top_k < 1:
                raise ConfigError("top_k decoding requires top_k >= 1")
        elif self.top_k is not None:
            raise ConfigError(f"top_k is only valid for top_k decoding, not {s.value}")
        if s is DecodingStrategy.TOP_P:
            if self.top_p is None or not 0.0 < self.top_p <= 1.0:
                raise ConfigError("top_p decoding requires top_p in (0, 1]")
        elif self.top_p is not None:
            raise ConfigError(f"top_p is only valid for top_p decoding, not {s.value}")

    def to_wire(self) -> dict:
        wire = {"strategy": self.strategy.value, "max_tokens": self.max_tokens,
                "early_stopping": self.early_stopping}
        for name in ("beam_width", "no_repeat_ngram", "top_k", "top_p"):
            value = getattr(self, name)
            if value is not None:
                wire[name] = value
        return wire


# Best-performing configuration for external models: beam width 6,
# no repeated bigrams, 15 generated tokens, early stopping on.
DEFAULT_EXTERNAL_DECODING = DecodingConfig(
    strategy=DecodingStrategy.BEAM,
    max_tokens=15,
    early_stopping=True,
    beam_width=6,
    no_repeat_ngram=2,
)

DEFAULT_TRUNCATE_K = 11


@dataclass(frozen=True)
class TruncateK:
    k: int = DEFAULT_TRUNCATE_K

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"truncate k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class External:
    """External summarizer endpoint: `http(s)://host:port` or `cmd:<command line>`."""

    endpoint: str
    decoding: DecodingConfig = DEFAULT_EXTERNAL_DECODING
    timeout: float = 30.0

    def __post_init__(self):
        e = self.endpoint
        if not (e.startswith("http://") or e.startswith("https://") or e.startswith("cmd:")):
            raise ConfigError(f"endpoint must start with http(s):// or cmd:, got {e!r}")


SummarizerSpec = TruncateK | External


def spec_fingerprint(spec: SummarizerSpec) -> str:
    """Stable hash of the full summarizer configuration (cache key half)."""
    if isinstance(spec, TruncateK):
        payload = {"backend": "truncate_k", "k": spec.k}
    else:
        payload = {"backend": "external", "endpoint": spec.endpoint,
                   "decoding": spec.decoding.to_wire()}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class GeneratedQuery:
    """A condensed query for a source claim, tagged with its generation recipe."""

    text: str
    source_smc_id: str
    spec_fingerprint: str


def truncate_k(text: str, k: int) -> str:
    """First min(k, word count) whitespace-separated tokens, space-joined."""
    if k < 1:
        raise InputValidationError(f"k must be >= 1, got {k}")
    return " ".join(text.split()[:k])


def summarize(smc_text: str, spec: SummarizerSpec, smc_id: str = "",
              client: "ExternalClient | None" = None) -> GeneratedQuery:
    """Generate a condensed query with the given backend.

    For external backends the request carries the full decoding
    configuration verbatim; responses are validated (non-empty, at most
    4x max_tokens words) before being accepted.
    """
    fingerprint = spec_fingerprint(spec)
    if isinstance(spec, TruncateK):
        text = truncate_k(smc_text, spec.k)
    else:
        own_client = client is None
        client = client or make_client(spec)
        try:
            text = client.summarize(smc_text, spec.decoding)
        finally:
            if own_client:
                client.close()
        words = len(text.split())
        if smc_text.strip() and not text.strip():
            raise BackendError("summarizer returned an empty summary", retryable=True)
        if words > 4 * spec.decoding.max_tokens:
            raise BackendError(
                f"runaway summary: {words} words exceeds 4 x max_tokens "
                f"({spec.decoding.max_tokens})",
                retryable=False,
            )
    return GeneratedQuery(text=text, source_smc_id=smc_id, spec_fingerprint=fingerprint)


def make_client(spec: External) -> "ExternalClient":
    if spec.endpoint.startswith("cmd:"):
        return SubprocessClient(spec.endpoint[len("cmd:"):], timeout=spec.timeout)
    return HttpClient(spec.endpoint, timeout=spec.timeout)


class ExternalClient:
    def summarize(self, text: str, decoding: DecodingConfig) -> str:
        raise NotImplementedError

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class HttpClient(ExternalClient):
    def __init__(self, base_url: str, timeout: float = 30.0, session: requests.Session | None = None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()

    def summarize(self, text: str, decoding: DecodingConfig) -> str:
        body = {"text": text, "decoding": decoding.to_wire()}
        try:
            resp = self._session.post(f"{self.base_url}/summarize", json=body, timeout=self.timeout)
        except requests.Timeout:
            raise BackendError(f"summarizer timed out after {self.timeout}s", retryable=True)
        except requests.RequestException as exc:
            raise BackendError(f"summarizer unreachable: {type(exc).__name__}", retryable=True)
        try:
            payload = resp.json()
        except ValueError:
            raise BackendError("summarizer returned a non-JSON body", retryable=False)
        if resp.status_code < 200 or resp.status_code >= 300 or "error" in payload:
            message = payload.get("error", f"HTTP {resp.status_code}")
            raise BackendError(f"summarizer error: {message}", retryable=resp.status_code >= 500)
        if not isinstance(payload.get("summary"), str):
            raise BackendError("summarizer response missing 'summary' string", retryable=False)
        return payload["summary"]

    def close(self) -> None:
        self._session.close()


class SubprocessClient(ExternalClient):
    """Line-delimited JSON over a long-lived child process's stdin/stdout."""

    def __init__(self, command: str, timeout: float = 30.0):
        self.command = command
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()
        self._reader = ThreadPoolExecutor(max_workers=1)

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                shlex.split(self.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def summarize(self, text: str, decoding: DecodingConfig) -> str:
        request = json.dumps({"text": text, "decoding": decoding.to_wire()})
        with self._lock:
            try:
                proc = self._ensure_proc()
                proc.stdin.write(request + "\n")
                proc.stdin.flush()
            except (OSError, ValueError) as exc:
                raise BackendError(f"summarizer process not writable: {exc}", retryable=True)
            future = self._reader.submit(proc.stdout.readline)
            try:
                line = future.result(timeout=self.timeout)
            except FutureTimeout:
                proc.kill()
                raise BackendError(f"summarizer timed out after {self.timeout}s", retryable=True)
        if not line:
            raise BackendError("summarizer process closed its output", retryable=True)
        try:
            payload = json.loads(line)
        except json.JSONDecodeError:
            raise BackendError("summarizer wrote a non-JSON line", retryable=False)
        if "error" in payload:
            raise BackendError(f"summarizer error: {payload['error']}", retryable=False)
        if not isinstance(payload.get("summary"), str):
            raise BackendError("summarizer response missing 'summary' string", retryable=False)
        return payload["summary"]

    def close(self) -> None:
        with self._lock:
            if self._proc is not None and self._proc.poll() is None:
                try:
                    self._proc.stdin.close()
                except OSError:
                    pass
                try:
                    self._proc.wait(timeout=2)
                except subprocess.TimeoutExpired:
                    self._proc.kill()
            self._proc = None
        self._reader.shutdown(wait=False)


class QueryCache:
    """Disk cache of generated queries keyed by (claim id, spec fingerprint).

    Writes are serialized and atomic (write-to-temp + rename); reads take
    no lock, so any number of workers may look up concurrently.
    """

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def _path(self, smc_id: str, fingerprint: str) -> Path:
        key = hashlib.sha256(f"{fingerprint}\n{smc_id}".encode()).hexdigest()
        return self.cache_dir / f"{key}.json"

    def get(self, smc_id: str, fingerprint: str) -> str | None:
        path = self._path(smc_id, fingerprint)
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)["text"]
        except FileNotFoundError:
            return None

    def put(self, smc_id: str, fingerprint: str, text: str) -> None:
        path = self._path(smc_id, fingerprint)
        payload = json.dumps({"smc_id": smc_id, "fingerprint": fingerprint, "text": text})
        with self._write_lock:
            tmp = path.with_suffix(".tmp")
            tmp.write_text(payload, encoding="utf-8")
            tmp.replace(path)


def summarize_cached(smc_text: str, spec: SummarizerSpec, smc_id: str,
                     cache: QueryCache | None, client: ExternalClient | None = None) -> GeneratedQuery:
    """Cache-first summarize: identical (claim, spec) pairs reuse the stored query."""
    fingerprint = spec_fingerprint(spec)
    if cache is not None:
        hit = cache.get(smc_id, fingerprint)
        if hit is not None:
            return GeneratedQuery(text=hit, source_smc_id=smc_id, spec_fingerprint=fingerprint)
    query = summarize(smc_text, spec, smc_id=smc_id, client=client)
    if cache is not None:
        cache.put(smc_id, fingerprint, query.text)
    return query
