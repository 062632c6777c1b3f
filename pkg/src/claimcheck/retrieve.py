"""Fact-check retrieval: URL canonicalization, a local ranked index over
fact-check records, a ClaimReview-style remote search client, and gold-URL
matching.

The local index supports BM25 (idf = ln((N - df + 0.5)/(df + 0.5) + 1),
saturation k1, length normalization b) and a raw-count TF-IDF cosine
ranking (idf = ln(N / df)). Both filter zero-score documents and break
score ties by ascending canonical URL so result lists are deterministic.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlsplit, urlunsplit

import requests

from .errors import IngestionError, InputValidationError, ThrottleError, TransportError
from .metrics import word_tokens

API_KEY_ENV = "CLAIMCHECK_API_KEY"
DEFAULT_API_BASE = "https://factchecktools.googleapis.com"


def normalize_url(url: str) -> str:
    """Canonicalize an absolute URL for equality checks.

    Lowercases scheme and host, strips query string and fragment, drops
    default ports, and removes a trailing slash except on the bare root
    (whose canonical form keeps it: ``http://x.org`` -> ``http://x.org/``).
    Idempotent by construction.
    """
    if not isinstance(url, str) or not url.strip():
        raise InputValidationError("URL must be a non-empty string")
    parts = urlsplit(url.strip())
    if not parts.scheme or not parts.netloc:
        raise InputValidationError(f"not an absolute URL: {url!r}")
    scheme = parts.scheme.lower()
    host = parts.hostname
    if host is None:
        raise InputValidationError(f"URL has no host: {url!r}")
    netloc = host.lower()
    port = parts.port
    if port is not None and not (
        (scheme == "http" and port == 80) or (scheme == "https" and port == 443)
    ):
        netloc = f"{netloc}:{port}"
    path = parts.path or "/"
    if path != "/" and path.endswith("/"):
        path = path.rstrip("/") or "/"
    return urlunsplit((scheme, netloc, path, "", ""))


@dataclass(frozen=True)
class FactCheckRecord:
    """A previously fact-checked article and its publisher-written claim summary."""

    url: str
    scr: str
    publisher: str = ""
    site: str = ""
    language: str = "en"
    review_date: str | None = None
    verdict: str | None = None


@dataclass(frozen=True)
class RankedResult:
    url: str
    rank: int
    score: float | None = None
    publisher: str | None = None
    verdict: str | None = None


def load_records(path: str | Path) -> list[FactCheckRecord]:
    """Read a JSON Lines corpus of fact-check records."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputValidationError(f"{path}:{lineno}: invalid JSON ({exc})")
            if not obj.get("url") or not obj.get("scr"):
                raise InputValidationError(f"{path}:{lineno}: record needs non-empty url and scr")
            records.append(
                FactCheckRecord(
                    url=obj["url"],
                    scr=obj["scr"],
                    publisher=obj.get("publisher", ""),
                    site=obj.get("site", ""),
                    language=obj.get("language", "en"),
                    review_date=obj.get("review_date"),
                    verdict=obj.get("verdict"),
                )
            )
    return records


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.5
    b: float = 0.75

    def __post_init__(self):
        if self.k1 <= 0:
            raise InputValidationError(f"BM25 k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise InputValidationError(f"BM25 b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class TfidfParams:
    pass


RankingParams = Bm25Params | TfidfParams


class LocalIndex:
    """Immutable ranked index over a closed record collection.

    Documents are the records' claim summaries, tokenized with the shared
    metric tokenizer. Safe for unlimited concurrent readers.
    """

    def __init__(self, records: list[FactCheckRecord], ranking: RankingParams | None = None):
        if not records:
            raise InputValidationError("cannot index an empty record collection")
        self.ranking = ranking if ranking is not None else Bm25Params()

        self._records: list[FactCheckRecord] = []
        self._urls: list[str] = []
        seen: dict[str, int] = {}
        for rec in records:
            if not rec.scr.strip():
                raise IngestionError(f"record {rec.url!r} has an empty claim summary")
            canon = normalize_url(rec.url)
            if canon in seen:
                raise IngestionError(
                    f"duplicate canonical URL {canon!r} "
                    f"(records {seen[canon]} and {len(self._records)})"
                )
            seen[canon] = len(self._records)
            self._records.append(rec)
            self._urls.append(canon)

        self._doc_terms = [word_tokens(rec.scr) for rec in self._records]
        self._doc_counts = [self._count(t) for t in self._doc_terms]
        self._doc_len = [len(t) for t in self._doc_terms]
        self.n_docs = len(self._records)
        self.avg_doc_len = sum(self._doc_len) / self.n_docs
        df: dict[str, int] = {}
        for counts in self._doc_counts:
            for term in counts:
                df[term] = df.get(term, 0) + 1
        self._df = df

    @staticmethod
    def _count(terms: list[str]) -> dict[str, int]:
        counts: dict[str, int] = {}
        for t in terms:
            counts[t] = counts.get(t, 0) + 1
        return counts

    @property
    def vocab_size(self) -> int:
        return len(self._df)

    def df(self, term: str) -> int:
        return self._df.get(term, 0)

    def idf(self, term: str) -> float:
        """IDF under the active ranking scheme (0 for unseen terms under TF-IDF)."""
        df = self.df(term)
        if isinstance(self.ranking, Bm25Params):
            return math.log((self.n_docs - df + 0.5) / (df + 0.5) + 1.0)
        return math.log(self.n_docs / df) if df else 0.0

    def record(self, url: str) -> FactCheckRecord:
        return self._records[self._urls.index(url)]

    def search(self, query: str, limit: int) -> list[RankedResult]:
        query_words = word_tokens(query)
        if isinstance(self.ranking, Bm25Params):
            unique_terms = sorted(set(query_words))
            scores = [self._bm25(unique_terms, d) for d in range(self.n_docs)]
        else:
            scores = [self._tfidf_cosine(query_words, d) for d in range(self.n_docs)]
        scored = [
            (score, self._urls[d], d) for d, score in enumerate(scores) if score > 0.0
        ]
        scored.sort(key=lambda item: (-item[0], item[1]))
        return [
            RankedResult(
                url=url,
                rank=rank,
                score=score,
                publisher=self._records[d].publisher or None,
                verdict=self._records[d].verdict,
            )
            for rank, (score, url, d) in enumerate(scored[:limit], start=1)
        ]

    def _bm25(self, query_terms: list[str], doc: int) -> float:
        k1, b = self.ranking.k1, self.ranking.b
        counts = self._doc_counts[doc]
        norm = k1 * (1.0 - b + b * self._doc_len[doc] / self.avg_doc_len)
        score = 0.0
        for term in query_terms:
            tf = counts.get(term, 0)
            if tf:
                score += self.idf(term) * (tf * (k1 + 1.0)) / (tf + norm)
        return score

    def _tfidf_cosine(self, query_words: list[str], doc: int) -> float:
        q_counts = self._count(query_words)
        q_vec = {t: c * self.idf(t) for t, c in q_counts.items() if self.idf(t) != 0.0}
        d_vec = {t: c * self.idf(t) for t, c in self._doc_counts[doc].items() if self.idf(t) != 0.0}
        qn = math.sqrt(sum(w * w for w in q_vec.values()))
        dn = math.sqrt(sum(w * w for w in d_vec.values()))
        if qn == 0.0 or dn == 0.0:
            return 0.0
        dot = sum(w * d_vec[t] for t, w in q_vec.items() if t in d_vec)
        return dot / (qn * dn)


def build_index(records: list[FactCheckRecord], ranking: RankingParams | None = None) -> LocalIndex:
    return LocalIndex(records, ranking)


class RateLimiter:
    """Shared minimum-interval gate for outbound requests; thread-safe."""

    def __init__(self, min_interval: float = 0.0):
        self.min_interval = min_interval
        self._lock = threading.Lock()
        self._last = 0.0

    def wait(self) -> None:
        if self.min_interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._last + self.min_interval - now
            if delay > 0:
                time.sleep(delay)
            self._last = time.monotonic()


class RemoteApi:
    """Client for a ClaimReview-style claim search endpoint.

    GET {base}/v1alpha1/claims:search with query/pageSize/languageCode/key
    parameters; the response's claims[].claimReview[] entries are flattened
    in API order. The API key is read from the environment when not given
    and is never logged or echoed in errors.
    """

    def __init__(
        self,
        base_url: str = DEFAULT_API_BASE,
        api_key: str | None = None,
        language_filter: str | None = None,
        publisher_filter: str | None = None,
        page_size: int = 20,
        timeout: float = 10.0,
        max_attempts: int = 3,
        rate_limiter: RateLimiter | None = None,
        session: requests.Session | None = None,
    ):
        if not 1 <= page_size <= 50:
            raise InputValidationError(f"page_size must be within [1, 50], got {page_size}")
        if max_attempts < 1:
            raise InputValidationError("max_attempts must be >= 1")
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.language_filter = language_filter
        self.publisher_filter = publisher_filter
        self.page_size = page_size
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.rate_limiter = rate_limiter or RateLimiter()
        self._session = session or requests.Session()

    def search(self, query: str, limit: int) -> list[RankedResult]:
        params = {"query": query, "pageSize": max(self.page_size, limit)}
        if self.language_filter:
            params["languageCode"] = self.language_filter
        if self.publisher_filter:
            params["reviewPublisherSiteFilter"] = self.publisher_filter
        if self.api_key:
            params["key"] = self.api_key

        payload = self._get_with_retries(params)
        results: list[RankedResult] = []
        seen: set[str] = set()
        for claim in payload.get("claims", []):
            for review in claim.get("claimReview", []):
                raw_url = review.get("url")
                if not raw_url:
                    continue
                try:
                    url = normalize_url(raw_url)
                except InputValidationError:
                    continue
                if url in seen:
                    continue
                seen.add(url)
                publisher = (review.get("publisher") or {}).get("name")
                results.append(
                    RankedResult(
                        url=url,
                        rank=len(results) + 1,
                        score=None,
                        publisher=publisher,
                        verdict=review.get("textualRating"),
                    )
                )
                if len(results) >= limit:
                    return results
        return results

    def _get_with_retries(self, params: dict) -> dict:
        url = f"{self.base_url}/v1alpha1/claims:search"
        last_error = "request not attempted"
        for attempt in range(1, self.max_attempts + 1):
            self.rate_limiter.wait()
            try:
                resp = self._session.get(url, params=params, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = type(exc).__name__
            else:
                if resp.status_code == 429:
                    retry_after = resp.headers.get("Retry-After")
                    raise ThrottleError(
                        "claim search rate limited",
                        retry_after=float(retry_after) if retry_after else None,
                        attempts=attempt,
                    )
                if 200 <= resp.status_code < 300:
                    try:
                        return resp.json()
                    except ValueError:
                        last_error = "response body is not JSON"
                elif 400 <= resp.status_code < 500:
                    raise TransportError(
                        f"claim search rejected with HTTP {resp.status_code}",
                        retryable=False,
                        attempts=attempt,
                    )
                else:
                    last_error = f"HTTP {resp.status_code}"
            if attempt < self.max_attempts:
                time.sleep(0.5 * (2 ** (attempt - 1)))
        raise TransportError(
            f"claim search failed after {self.max_attempts} attempts: {last_error}",
            retryable=True,
            attempts=self.max_attempts,
        )


RetrieverBackend = LocalIndex | RemoteApi


def search(query: str, backend: RetrieverBackend, limit: int = 5) -> list[RankedResult]:
    """Run one query against either backend, enforcing shared preconditions."""
    if not query or not query.strip():
        raise InputValidationError("query must be non-empty")
    if not 1 <= limit <= 100:
        raise InputValidationError(f"limit must be within [1, 100], got {limit}")
    return backend.search(query, limit)


def match_gold(results: list[RankedResult], gold_urls: set[str]) -> int | None:
    """Smallest rank whose URL is one of the gold URLs, or None."""
    if not gold_urls:
        raise InputValidationError("gold_urls must be non-empty")
    ranks = [r.rank for r in results if r.url in gold_urls]
    return min(ranks) if ranks else None
