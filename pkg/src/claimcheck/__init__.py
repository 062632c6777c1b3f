"""Toolkit for detecting whether a noisy social-media claim was already
fact-checked: lossless tweet lexing, cleanup strategies, condensed query
generation, ranked fact-check retrieval, and evaluation metrics."""

from .lexer import Token, TokenKind, TokenStream, detokenize, tokenize
from .preprocess import HandleMap, Strategy, apply, load_handle_map, remove_urls
from .summarize import (
    DecodingConfig,
    DecodingStrategy,
    External,
    GeneratedQuery,
    QueryCache,
    TruncateK,
    spec_fingerprint,
    summarize,
    summarize_cached,
    truncate_k,
)
from .retrieve import (
    Bm25Params,
    FactCheckRecord,
    LocalIndex,
    RankedResult,
    RemoteApi,
    TfidfParams,
    build_index,
    load_records,
    match_gold,
    normalize_url,
    search,
)
from .metrics import (
    IdfTable,
    MetricsReport,
    QueryOutcome,
    bleu4,
    corpus_bleu4,
    mrr,
    recall_at_k,
    recall_curve,
    similarity_buckets,
    tfidf_cosine,
    word_tokens,
)
from .dataset import (
    AnnotationRecord,
    DatasetPair,
    DatasetStats,
    agreement,
    curate,
    load,
    load_annotations,
    stats,
)

__version__ = "0.1.0"
