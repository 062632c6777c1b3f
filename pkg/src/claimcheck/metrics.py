"""Retrieval and summary-quality metrics.

Recall@k and MRR over per-query match outcomes, word-level TF-IDF weighted
cosine similarity with threshold bucketing, and a smoothed 4-gram BLEU.
All text metrics share one word tokenizer: the base cleanup strategy
(sigils stripped, punctuation and emoji dropped, lowercased) followed by a
whitespace split, so scores do not depend on surface punctuation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

from .errors import InputValidationError
from .lexer import tokenize
from .preprocess import Strategy, apply


def word_tokens(text: str) -> list[str]:
    """Lowercased, punctuation-free word list used by every text metric."""
    return apply(Strategy.P, tokenize(text)).split()


@dataclass(frozen=True)
class QueryOutcome:
    query_id: str
    gold_rank: int | None  # 1-based rank of the first gold hit, None if absent

    def __post_init__(self):
        if self.gold_rank is not None and self.gold_rank < 1:
            raise InputValidationError(f"gold_rank must be >= 1, got {self.gold_rank}")


def recall_at_k(outcomes: list[QueryOutcome], k: int) -> float:
    """Percentage of queries whose gold article ranked in the top k."""
    if not outcomes:
        raise InputValidationError("recall_at_k needs at least one outcome")
    if k < 1:
        raise InputValidationError(f"k must be >= 1, got {k}")
    hits = sum(1 for o in outcomes if o.gold_rank is not None and o.gold_rank <= k)
    return 100.0 * hits / len(outcomes)


def mrr(outcomes: list[QueryOutcome]) -> float:
    """Mean reciprocal rank; a missing gold contributes 0.

    Summation runs in sorted query_id order so parallel evaluation reduces
    to the same float every time.
    """
    if not outcomes:
        raise InputValidationError("mrr needs at least one outcome")
    total = 0.0
    for o in sorted(outcomes, key=lambda o: o.query_id):
        if o.gold_rank is not None:
            total += 1.0 / o.gold_rank
    return total / len(outcomes)


def recall_curve(outcomes: list[QueryOutcome], k_max: int) -> dict[int, float]:
    if k_max < 1:
        raise InputValidationError(f"k_max must be >= 1, got {k_max}")
    return {k: recall_at_k(outcomes, k) for k in range(1, k_max + 1)}


# ---------------------------------------------------------------------------
# TF-IDF weighted cosine similarity

def _terms(text: str, ngram: int) -> Counter:
    """Bag of word n-grams of orders 1..ngram."""
    words = word_tokens(text)
    bag: Counter = Counter()
    for n in range(1, ngram + 1):
        for i in range(len(words) - n + 1):
            bag[tuple(words[i:i + n])] += 1
    return bag


class IdfTable:
    """Document frequencies fitted on a corpus; idf(t) = ln(N / df(t)).

    Terms never seen in the corpus get weight 0, and so do terms present
    in every document (ln 1 = 0).
    """

    def __init__(self, corpus: list[str], ngram: int = 1):
        if not corpus:
            raise InputValidationError("idf corpus must be non-empty")
        if ngram not in (1, 2):
            raise InputValidationError(f"ngram must be 1 or 2, got {ngram}")
        self.ngram = ngram
        self.n_docs = len(corpus)
        df: Counter = Counter()
        for doc in corpus:
            df.update(set(_terms(doc, ngram)))
        self._idf = {t: math.log(self.n_docs / d) for t, d in df.items()}

    def idf(self, term) -> float:
        return self._idf.get(term, 0.0)

    def vector(self, text: str) -> dict:
        return {t: c * self.idf(t) for t, c in _terms(text, self.ngram).items() if self.idf(t) != 0.0}


def tfidf_cosine(doc_a: str, doc_b: str, idf_corpus: list[str] | IdfTable, ngram: int = 1) -> float:
    """Cosine of raw-count TF-IDF vectors; 0.0 when either vector is all zero."""
    table = idf_corpus if isinstance(idf_corpus, IdfTable) else IdfTable(idf_corpus, ngram)
    va, vb = table.vector(doc_a), table.vector(doc_b)
    norm_a = math.sqrt(sum(w * w for w in va.values()))
    norm_b = math.sqrt(sum(w * w for w in vb.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    dot = sum(w * vb[t] for t, w in va.items() if t in vb)
    return dot / (norm_a * norm_b)


def similarity_buckets(
    pairs: list[tuple[str, str]],
    thresholds: list[float],
    idf_corpus: list[str] | IdfTable,
    ngram: int = 1,
) -> dict[float, float]:
    """For each threshold t, the percentage of pairs with cosine >= t."""
    if not pairs:
        raise InputValidationError("similarity_buckets needs at least one pair")
    if sorted(thresholds) != list(thresholds) or any(not 0.0 <= t <= 1.0 for t in thresholds):
        raise InputValidationError("thresholds must be ascending and within [0, 1]")
    table = idf_corpus if isinstance(idf_corpus, IdfTable) else IdfTable(idf_corpus, ngram)
    sims = [tfidf_cosine(a, b, table) for a, b in pairs]
    return {t: 100.0 * sum(1 for s in sims if s >= t) / len(sims) for t in thresholds}


# ---------------------------------------------------------------------------
# BLEU

def _ngram_counts(words: list[str], n: int) -> Counter:
    return Counter(tuple(words[i:i + n]) for i in range(len(words) - n + 1))


def bleu4(candidate: str, reference: str) -> float:
    """Sentence BLEU with uniform 1..4-gram weights on the 0-100 scale.

    Add-one smoothing replaces a zero precision for n >= 2 with
    (0 + 1) / (total + 1); a zero unigram precision keeps the score at 0.
    An empty candidate scores 0 with a warning instead of raising.
    """
    cand = word_tokens(candidate)
    ref = word_tokens(reference)
    if not cand:
        warnings.warn("bleu4: empty candidate scores 0", stacklevel=2)
        return 0.0
    if not ref:
        return 0.0

    log_sum = 0.0
    for n in range(1, 5):
        cand_counts = _ngram_counts(cand, n)
        total = sum(cand_counts.values())
        ref_counts = _ngram_counts(ref, n)
        matched = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        elif matched == 0:
            precision = 1.0 / (total + 1)
        else:
            precision = matched / total
        log_sum += 0.25 * math.log(precision)

    c, r = len(cand), len(ref)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return 100.0 * brevity * math.exp(log_sum)


def corpus_bleu4(pairs: list[tuple[str, str]]) -> float:
    """Macro-average of sentence scores over (candidate, reference) pairs."""
    if not pairs:
        raise InputValidationError("corpus_bleu4 needs at least one pair")
    return sum(bleu4(c, r) for c, r in pairs) / len(pairs)


# ---------------------------------------------------------------------------
# Reporting

@dataclass
class MetricsReport:
    recall_at: dict[int, float]
    mrr: float
    n_queries: int
    per_query: list[QueryOutcome] = field(default_factory=list)

    @classmethod
    def from_outcomes(cls, outcomes: list[QueryOutcome], k_list: list[int]) -> "MetricsReport":
        return cls(
            recall_at={k: recall_at_k(outcomes, k) for k in sorted(k_list)},
            mrr=mrr(outcomes),
            n_queries=len(outcomes),
            per_query=sorted(outcomes, key=lambda o: o.query_id),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_queries": self.n_queries,
                "recall_at": {str(k): v for k, v in sorted(self.recall_at.items())},
                "mrr": self.mrr,
                "per_query": [
                    {"query_id": o.query_id, "gold_rank": o.gold_rank} for o in self.per_query
                ],
            },
            indent=2,
        )

    def to_table(self, label: str = "run") -> str:
        return render_grid({(label, ""): self})

    def curve_csv(self, k_max: int | None = None) -> str:
        """recall_curve as CSV (k, percentage) for plotting."""
        k_max = k_max or (max(self.recall_at) if self.recall_at else 1)
        curve = recall_curve(self.per_query, k_max)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["k", "recall_percent"])
        for k, v in curve.items():
            writer.writerow([k, f"{v:.4f}"])
        return buf.getvalue()


def render_grid(reports: dict[tuple[str, str], MetricsReport], k: int = 5) -> str:
    """Aligned text table: one row per strategy, R@k / MRR cells per summarizer."""
    rows = sorted({key[0] for key in reports})
    cols = sorted({key[1] for key in reports})
    col_heads = [c if c else "result" for c in cols]
    lines = []
    cells: dict[tuple[str, str], str] = {}
    for (row, col), rep in reports.items():
        r_at = rep.recall_at.get(k)
        r_txt = f"{r_at:.2f}" if r_at is not None else "-"
        cells[(row, col)] = f"{r_txt} / {rep.mrr:.2f}"
    widths = [max(len("strategy"), *(len(r) for r in rows))]
    for c in cols:
        col_cells = [cells.get((r, c), "-") for r in rows]
        widths.append(max(len(f"{col_heads[cols.index(c)]} (R@{k}/MRR)"), *(len(x) for x in col_cells)))
    head_cells = ["strategy"] + [f"{h} (R@{k}/MRR)" for h in col_heads]
    lines.append("  ".join(h.ljust(w) for h, w in zip(head_cells, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        row_cells = [r] + [cells.get((r, c), "-") for c in cols]
        lines.append("  ".join(x.ljust(w) for x, w in zip(row_cells, widths)))
    return "\n".join(lines)
