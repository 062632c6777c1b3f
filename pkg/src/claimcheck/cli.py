"""Command-line front end.

Subcommands wire the full workflow together: `check` runs one claim
through cleanup -> query generation -> retrieval, `eval` scores a dataset
and emits a metrics report, `stats` prints dataset statistics and the
similarity complexity analysis, `build-index` validates a record corpus.

Exit codes are stable: 0 success, 2 validation/configuration problems,
3 transport or summarizer-backend failures, 4 file I/O problems.
Settings resolve as CLI flags > config file > environment > defaults;
the config file is flat `key = value` lines mirroring the flag names.
The remote API key is only ever read from the CLAIMCHECK_API_KEY
environment variable and is never printed.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import click

from . import dataset as ds
from .errors import (
    BackendError,
    ClaimCheckError,
    ConfigError,
    IngestionError,
    InputValidationError,
    StructuralError,
    TransportError,
)
from .lexer import tokenize
from .metrics import MetricsReport, QueryOutcome, similarity_buckets
from .preprocess import HandleMap, Strategy, apply, load_handle_map
from .retrieve import (
    Bm25Params,
    RemoteApi,
    TfidfParams,
    build_index,
    load_records,
    match_gold,
    normalize_url,
    search,
)
from .summarize import (
    DecodingConfig,
    DecodingStrategy,
    External,
    QueryCache,
    TruncateK,
    make_client,
    summarize_cached,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TRANSPORT = 3
EXIT_IO = 4

ENV_PREFIX = "CLAIMCHECK_"

_DEFAULTS = {
    "strategy": "np",
    "summarizer": "truncate:11",
    "retriever": "api",
    "limit": "5",
    "k_list": "1,3,5,10",
    "query_field": "ccr",
    "report": "table",
    "parallelism": "4",
    "decoding": "beam",
    "max_tokens": "15",
}

_CONFIG_KEYS = (
    "strategy", "summarizer", "retriever", "limit", "k_list", "query_field",
    "report", "parallelism", "handle_map", "cache_dir", "decoding",
    "beam_width", "no_repeat_ngram", "max_tokens", "top_k", "top_p",
    "early_stopping",
)


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip().strip('"')
    return values


def _resolve(key: str, flag_value, file_values: dict[str, str]) -> str | None:
    if flag_value is not None:
        return str(flag_value)
    if key in file_values:
        return file_values[key]
    env = os.environ.get(ENV_PREFIX + key.upper())
    if env is not None:
        return env
    return _DEFAULTS.get(key)


@dataclass
class PipelineConfig:
    strategy: Strategy
    summarizer: TruncateK | External
    retriever_spec: str
    limit: int
    k_list: list[int]
    query_field: str
    report: str
    parallelism: int
    handles: HandleMap | None
    cache: QueryCache | None
    skip_errors: bool


def _parse_decoding(get) -> DecodingConfig:
    strategy = DecodingStrategy(get("decoding"))
    max_tokens = int(get("max_tokens"))
    early = get("early_stopping")
    kwargs: dict = {}
    if strategy is DecodingStrategy.BEAM:
        kwargs["beam_width"] = int(get("beam_width") or 6)
        kwargs["early_stopping"] = (early or "true").lower() in ("1", "true", "yes")
        ng = get("no_repeat_ngram")
        kwargs["no_repeat_ngram"] = int(ng) if ng is not None else 2
    else:
        kwargs["early_stopping"] = (early or "false").lower() in ("1", "true", "yes")
        ng = get("no_repeat_ngram")
        if ng is not None:
            kwargs["no_repeat_ngram"] = int(ng)
        if strategy is DecodingStrategy.TOP_K:
            kwargs["top_k"] = int(get("top_k") or 50)
        elif strategy is DecodingStrategy.TOP_P:
            kwargs["top_p"] = float(get("top_p") or 0.92)
    return DecodingConfig(strategy=strategy, max_tokens=max_tokens, **kwargs)


def _parse_summarizer(value: str, decoding: DecodingConfig) -> TruncateK | External:
    if value.startswith("truncate:"):
        try:
            return TruncateK(k=int(value.split(":", 1)[1]))
        except ValueError:
            raise ConfigError(f"bad truncate spec {value!r}; expected truncate:K")
    if value.startswith(("http://", "https://", "cmd:")):
        return External(endpoint=value, decoding=decoding)
    raise ConfigError(
        f"unknown summarizer {value!r}; expected truncate:K, http(s)://URL, or cmd:COMMAND"
    )


def _build_config(flags: dict, skip_errors: bool) -> PipelineConfig:
    file_values = _read_config_file(flags["config"]) if flags.get("config") else {}

    def get(key: str):
        return _resolve(key, flags.get(key), file_values)

    strategy = Strategy.from_string(get("strategy"))
    decoding = _parse_decoding(get)
    summarizer = _parse_summarizer(get("summarizer"), decoding)
    handle_map_path = get("handle_map")
    handles = load_handle_map(handle_map_path) if handle_map_path else None
    if strategy is Strategy.P_MRR_HRR_MREP and handles is None:
        raise ConfigError("strategy p-mrr-hrr+mrep requires --handle-map")
    cache_dir = get("cache_dir")
    k_list = sorted({int(k) for k in str(get("k_list")).replace(" ", "").split(",") if k})
    if not k_list:
        raise ConfigError("--k-list must name at least one cutoff")
    query_field = get("query_field")
    if query_field not in ("ccr", "scr", "smc"):
        raise ConfigError(f"--query-field must be ccr, scr, or smc, got {query_field!r}")
    report = get("report")
    if report not in ("table", "json", "csv"):
        raise ConfigError(f"--report must be table, json, or csv, got {report!r}")
    return PipelineConfig(
        strategy=strategy,
        summarizer=summarizer,
        retriever_spec=get("retriever"),
        limit=int(get("limit")),
        k_list=k_list,
        query_field=query_field,
        report=report,
        parallelism=max(1, int(get("parallelism"))),
        handles=handles,
        cache=QueryCache(cache_dir) if cache_dir else None,
        skip_errors=skip_errors,
    )


def _make_backend(spec: str):
    if spec == "api":
        return RemoteApi()
    if spec.startswith("index:"):
        path = spec.split(":", 1)[1]
        return build_index(load_records(path))
    raise ConfigError(f"unknown retriever {spec!r}; expected `api` or `index:PATH`")


def _exit_for(exc: Exception) -> int:
    if isinstance(exc, (TransportError, BackendError)):
        return EXIT_TRANSPORT
    if isinstance(exc, (InputValidationError, ConfigError, StructuralError, IngestionError)):
        return EXIT_VALIDATION
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_VALIDATION


def _run(fn):
    try:
        fn()
    except (ClaimCheckError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))


def _smc_id(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


_SHARED_OPTIONS = [
    click.option("--strategy", default=None, help="Cleanup strategy (np, p, p+erep, p-h, p-m, p-h-m, p-mrr-hrr, p-mrr-hrr+mrep)."),
    click.option("--summarizer", default=None, help="truncate:K, http(s)://URL, or cmd:COMMAND."),
    click.option("--decoding", default=None, type=click.Choice(["greedy", "beam", "top_k", "top_p"])),
    click.option("--beam-width", default=None, type=int),
    click.option("--no-repeat-ngram", default=None, type=int),
    click.option("--max-tokens", default=None, type=int),
    click.option("--top-k", default=None, type=int),
    click.option("--top-p", default=None, type=float),
    click.option("--retriever", default=None, help="`api` or `index:PATH` (fact-check records JSONL)."),
    click.option("--limit", default=None, type=int, help="Results per query (default 5)."),
    click.option("--handle-map", default=None, help="TSV of handle -> display name."),
    click.option("--cache-dir", default=None, help="Directory for the generated-query cache."),
    click.option("--config", default=None, help="Flat key = value config file."),
]


def _with_shared_options(fn):
    for opt in reversed(_SHARED_OPTIONS):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option()
def main():
    """Detect previously fact-checked claims and evaluate the pipeline."""


@main.command()
@click.argument("claim_text")
@_with_shared_options
def check(claim_text, **flags):
    """Check one claim: print the generated query and the ranked articles."""

    def go():
        if not claim_text.strip():
            raise InputValidationError("claim text must be non-empty")
        config = _build_config(flags, skip_errors=False)
        backend = _make_backend(config.retriever_spec)
        processed = apply(config.strategy, tokenize(claim_text), config.handles)
        query = summarize_cached(processed, config.summarizer, _smc_id(claim_text), config.cache)
        click.echo(f"query: {query.text}")
        results = search(query.text, backend, config.limit)
        if not results:
            click.echo("no matches")
        for r in results:
            extra = f"  [{r.verdict}]" if r.verdict else ""
            publisher = f"{r.publisher}  " if r.publisher else ""
            click.echo(f"{r.rank:2d}. {publisher}{r.url}{extra}")

    _run(go)


@main.command(name="eval")
@click.argument("dataset_path", type=click.Path())
@click.option("--k-list", default=None, help="Comma-separated recall cutoffs (default 1,3,5,10).")
@click.option("--query-field", default=None, type=click.Choice(["ccr", "scr", "smc"]),
              help="Query with generated queries (ccr), gold summaries (scr), or cleaned claims (smc).")
@click.option("--report", default=None, type=click.Choice(["table", "json", "csv"]))
@click.option("--parallelism", default=None, type=int)
@click.option("--skip-errors", is_flag=True, help="Record per-query failures and keep going.")
@click.option("--curate", "curate_flag", is_flag=True, help="Apply dataset curation before evaluating.")
@_with_shared_options
def eval_command(dataset_path, skip_errors, curate_flag, **flags):
    """Evaluate retrieval over a dataset of claim/summary pairs."""

    def go():
        config = _build_config(flags, skip_errors=skip_errors)
        loaded = ds.load(dataset_path)
        if loaded.issues:
            for issue in loaded.issues:
                click.echo(f"{dataset_path}:{issue.line}: {issue.message}", err=True)
            if not skip_errors:
                raise InputValidationError(
                    f"{len(loaded.issues)} bad dataset lines (use --skip-errors to continue)"
                )
        pairs = ds.curate(loaded.pairs) if curate_flag else loaded.pairs
        if not pairs:
            raise InputValidationError("no usable dataset pairs")
        backend = _make_backend(config.retriever_spec)

        gold_map: dict[str, set[str]] = {}
        for p in pairs:
            gold_map.setdefault(p.smc, set()).add(normalize_url(p.fca_url))

        fetch_limit = max(config.limit, max(config.k_list))
        client = make_client(config.summarizer) if isinstance(config.summarizer, External) else None

        def run_one(idx_pair):
            idx, pair = idx_pair
            if config.query_field == "scr":
                query_text = pair.scr
            else:
                processed = apply(config.strategy, tokenize(pair.smc), config.handles)
                if config.query_field == "smc":
                    query_text = processed
                else:
                    query_text = summarize_cached(
                        processed, config.summarizer, _smc_id(pair.smc), config.cache,
                        client=client,
                    ).text
            results = search(query_text, backend, fetch_limit)
            rank = match_gold(results, gold_map[pair.smc])
            return QueryOutcome(query_id=f"q{idx:05d}", gold_rank=rank)

        outcomes: list[QueryOutcome] = []
        failures: list[tuple[int, str]] = []
        try:
            with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
                futures = [(i, pool.submit(run_one, (i, p))) for i, p in enumerate(pairs)]
                for i, fut in futures:
                    try:
                        outcomes.append(fut.result())
                    except (ClaimCheckError, OSError) as exc:
                        if not config.skip_errors:
                            raise
                        failures.append((i, str(exc)))
        finally:
            if client is not None:
                client.close()

        if not outcomes:
            raise InputValidationError("every query failed")
        report = MetricsReport.from_outcomes(outcomes, config.k_list)
        if config.report == "json":
            click.echo(report.to_json())
        elif config.report == "csv":
            click.echo(report.curve_csv(max(config.k_list)), nl=False)
        else:
            label = f"{config.strategy.value}/{config.query_field}"
            click.echo(report.to_table(label))
            for k in config.k_list:
                click.echo(f"R@{k}: {report.recall_at[k]:.2f}")
            click.echo(f"MRR: {report.mrr:.4f}")
            click.echo(f"queries: {report.n_queries}")
        for idx, message in failures:
            click.echo(f"skipped pair {idx}: {message}", err=True)

    _run(go)


@main.command()
@click.argument("dataset_path", type=click.Path())
@click.option("--annotations", default=None, type=click.Path(),
              help="Annotation JSONL; prints the inter-annotator agreement.")
@click.option("--buckets/--no-buckets", default=True,
              help="Include the similarity threshold analysis (default on).")
def stats(dataset_path, annotations, buckets):
    """Print dataset statistics and the complexity analysis."""

    def go():
        loaded = ds.load(dataset_path)
        for issue in loaded.issues:
            click.echo(f"{dataset_path}:{issue.line}: {issue.message}", err=True)
        if not loaded.pairs:
            raise InputValidationError("no usable dataset pairs")
        info = ds.stats(loaded.pairs)
        click.echo(info.to_text())
        if buckets:
            thresholds = [0.25, 0.5, 0.75]
            raw_pairs = [(p.smc, p.scr) for p in loaded.pairs]
            corpus = [p.smc for p in loaded.pairs] + [p.scr for p in loaded.pairs]
            np_row = similarity_buckets(raw_pairs, thresholds, corpus)
            phm_texts = [
                apply(Strategy.P_H_M, tokenize(p.smc)) for p in loaded.pairs
            ]
            phm_pairs = [(t, p.scr) for t, p in zip(phm_texts, loaded.pairs)]
            phm_corpus = phm_texts + [p.scr for p in loaded.pairs]
            phm_row = similarity_buckets(phm_pairs, thresholds, phm_corpus)
            click.echo("cosine>=t        " + "  ".join(f"{t:>6.2f}" for t in thresholds))
            click.echo("np               " + "  ".join(f"{np_row[t]:5.1f}%" for t in thresholds))
            click.echo("p-h-m            " + "  ".join(f"{phm_row[t]:5.1f}%" for t in thresholds))
        if annotations:
            records = ds.load_annotations(annotations)
            click.echo(f"annotator agreement: {ds.agreement(records):.1f}%")

    _run(go)


@main.command(name="build-index")
@click.argument("records_path", type=click.Path())
@click.option("--ranking", default="bm25", type=click.Choice(["bm25", "tfidf"]))
@click.option("--k1", default=1.5, type=float)
@click.option("--b", default=0.75, type=float)
def build_index_command(records_path, ranking, k1, b):
    """Validate a fact-check record corpus and report index statistics."""

    def go():
        records = load_records(records_path)
        params = Bm25Params(k1=k1, b=b) if ranking == "bm25" else TfidfParams()
        index = build_index(records, params)
        click.echo(json.dumps({
            "documents": index.n_docs,
            "vocabulary": index.vocab_size,
            "avg_doc_words": round(index.avg_doc_len, 2),
            "ranking": ranking,
        }, indent=2))

    _run(go)


if __name__ == "__main__":
    main()
