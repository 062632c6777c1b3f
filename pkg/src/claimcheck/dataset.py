"""Claim/summary dataset loading, curation, and statistics.

The dataset file is UTF-8 JSON Lines, one pair per line:

    {"smc": str, "scr": str, "fca_url": str, "publisher": str,
     "source_country": "IN"|"US"|"other", "category": str,
     "summarizable": bool, "smc_language": str, "scr_language": str}

`smc` is the raw social-media claim, `scr` the publisher's claim summary,
`fca_url` the gold fact-check article. Annotation files are JSON Lines of
per-annotator records used only for the agreement figure.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import InputValidationError
from .lexer import TokenKind, tokenize
from .preprocess import remove_urls
from .retrieve import normalize_url

SOURCE_COUNTRIES = ("IN", "US", "other")

CATEGORIES = (
    "Politics",
    "Crime and Terrorism",
    "World",
    "Entertainment",
    "Technology",
    "Food",
    "Religion",
    "Sports",
    "Health",
    "Education",
    "Business",
    "Environment",
    "Other",
)


@dataclass(frozen=True)
class DatasetPair:
    smc: str
    scr: str
    fca_url: str
    publisher: str = ""
    source_country: str = "other"
    category: str = "Other"
    summarizable: bool = True
    smc_language: str = "en"
    scr_language: str = "en"


@dataclass(frozen=True)
class AnnotationRecord:
    pair_id: str
    annotator_id: str
    summarizable: bool
    category: str = "Other"
    smc_language: str = "en"
    scr_language: str = "en"


@dataclass
class LoadIssue:
    line: int
    message: str


@dataclass
class LoadResult:
    pairs: list[DatasetPair]
    issues: list[LoadIssue]

    @property
    def ok(self) -> bool:
        return not self.issues


_REQUIRED = ("smc", "scr", "fca_url")


def _parse_pair(obj: dict) -> DatasetPair:
    for name in _REQUIRED:
        value = obj.get(name)
        if not isinstance(value, str) or not value.strip():
            raise InputValidationError(f"missing or empty field {name!r}")
    try:
        normalize_url(obj["fca_url"])
    except InputValidationError as exc:
        raise InputValidationError(f"fca_url does not normalize: {exc}")
    country = obj.get("source_country", "other")
    if country not in SOURCE_COUNTRIES:
        raise InputValidationError(f"source_country must be one of {SOURCE_COUNTRIES}, got {country!r}")
    category = obj.get("category", "Other")
    if category not in CATEGORIES:
        raise InputValidationError(f"unknown category {category!r}")
    summarizable = obj.get("summarizable", True)
    if not isinstance(summarizable, bool):
        raise InputValidationError("summarizable must be a boolean")
    return DatasetPair(
        smc=obj["smc"],
        scr=obj["scr"],
        fca_url=obj["fca_url"],
        publisher=obj.get("publisher", ""),
        source_country=country,
        category=category,
        summarizable=summarizable,
        smc_language=obj.get("smc_language", "en"),
        scr_language=obj.get("scr_language", "en"),
    )


def load(path: str | Path) -> LoadResult:
    """Load a JSON Lines dataset; bad lines are reported, not fatal."""
    pairs: list[DatasetPair] = []
    issues: list[LoadIssue] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                issues.append(LoadIssue(lineno, f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(obj, dict):
                issues.append(LoadIssue(lineno, "line is not a JSON object"))
                continue
            try:
                pairs.append(_parse_pair(obj))
            except InputValidationError as exc:
                issues.append(LoadIssue(lineno, str(exc)))
    if not pairs and not issues:
        warnings.warn(f"dataset file {path} is empty", stacklevel=2)
    return LoadResult(pairs=pairs, issues=issues)


def _is_english(tag: str) -> bool:
    return tag.split("-")[0].strip().lower() == "en"


def curate(pairs: list[DatasetPair]) -> list[DatasetPair]:
    """Strip URLs from claims, drop exact duplicate pairs (first occurrence
    wins), then drop non-summarizable and non-English pairs."""
    stripped = [replace(p, smc=remove_urls(tokenize(p.smc)).source) for p in pairs]
    seen: set[tuple[str, str]] = set()
    deduped = []
    for p in stripped:
        key = (p.smc, p.scr)
        if key in seen:
            continue
        seen.add(key)
        deduped.append(p)
    return [
        p for p in deduped
        if p.summarizable and _is_english(p.smc_language) and _is_english(p.scr_language)
    ]


def _lower_median(values: list[int]) -> int:
    """Order statistic at ceil(n/2): the lower median for even n."""
    if not values:
        raise InputValidationError("median of empty list")
    ordered = sorted(values)
    return ordered[(len(ordered) + 1) // 2 - 1]


@dataclass
class DatasetStats:
    n_pairs: int
    n_unique_smc: int
    n_unique_scr: int
    country_percent: dict[str, float]
    median_smc_chars: int
    median_smc_words: int
    median_scr_chars: int
    median_scr_words: int
    category_counts: dict[str, int]

    def to_text(self) -> str:
        lines = [
            f"pairs            {self.n_pairs}",
            f"unique claims    {self.n_unique_smc}",
            f"unique summaries {self.n_unique_scr}",
            "source countries " + "  ".join(
                f"{c}={p:.1f}%" for c, p in sorted(self.country_percent.items())
            ),
            f"median claim     {self.median_smc_chars} chars / {self.median_smc_words} words",
            f"median summary   {self.median_scr_chars} chars / {self.median_scr_words} words",
            "categories       " + "  ".join(
                f"{c}={n}" for c, n in sorted(self.category_counts.items(), key=lambda kv: -kv[1])
            ),
        ]
        return "\n".join(lines)


def stats(pairs: list[DatasetPair]) -> DatasetStats:
    """Counts, country split, and lower-median lengths (words = whitespace
    tokens of the raw string, chars include spaces)."""
    if not pairs:
        raise InputValidationError("stats over an empty dataset")
    n = len(pairs)
    country_counts: dict[str, int] = {}
    category_counts: dict[str, int] = {}
    for p in pairs:
        country_counts[p.source_country] = country_counts.get(p.source_country, 0) + 1
        category_counts[p.category] = category_counts.get(p.category, 0) + 1
    return DatasetStats(
        n_pairs=n,
        n_unique_smc=len({p.smc for p in pairs}),
        n_unique_scr=len({p.scr for p in pairs}),
        country_percent={c: 100.0 * k / n for c, k in country_counts.items()},
        median_smc_chars=_lower_median([len(p.smc) for p in pairs]),
        median_smc_words=_lower_median([len(p.smc.split()) for p in pairs]),
        median_scr_chars=_lower_median([len(p.scr) for p in pairs]),
        median_scr_words=_lower_median([len(p.scr.split()) for p in pairs]),
        category_counts=category_counts,
    )


def load_annotations(path: str | Path) -> list[AnnotationRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputValidationError(f"{path}:{lineno}: invalid JSON ({exc.msg})")
            try:
                records.append(
                    AnnotationRecord(
                        pair_id=str(obj["pair_id"]),
                        annotator_id=str(obj["annotator_id"]),
                        summarizable=bool(obj["summarizable"]),
                        category=obj.get("category", "Other"),
                        smc_language=obj.get("smc_language", "en"),
                        scr_language=obj.get("scr_language", "en"),
                    )
                )
            except KeyError as exc:
                raise InputValidationError(f"{path}:{lineno}: missing field {exc}")
    return records


def agreement(records: list[AnnotationRecord]) -> float:
    """Percent of pairs where both annotators agree on summarizability."""
    by_pair: dict[str, list[AnnotationRecord]] = {}
    for rec in records:
        by_pair.setdefault(rec.pair_id, []).append(rec)
    offenders = sorted(pid for pid, recs in by_pair.items() if len(recs) != 2)
    if offenders:
        raise InputValidationError(
            f"pairs without exactly two annotations: {', '.join(offenders[:10])}"
        )
    if not by_pair:
        raise InputValidationError("no annotation records")
    agreed = sum(1 for recs in by_pair.values() if recs[0].summarizable == recs[1].summarizable)
    return 100.0 * agreed / len(by_pair)
