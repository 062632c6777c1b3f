#!/usr/bin/env python3
"""Run the retrieval experiment grid: every cleanup strategy crossed with a
set of summarizers, against one retriever, printed as an aligned table of
R@5 / MRR cells plus a JSON dump for plotting.

Example (local index, truncation baseline and an external server):

    python scripts/run_grid.py data/released/pairs.jsonl \
        --retriever index:data/released/records.jsonl \
        --summarizer none --summarizer truncate:11 \
        --summarizer http://127.0.0.1:8750 \
        --cache-dir .cache/queries
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from claimcheck.dataset import load
from claimcheck.lexer import tokenize
from claimcheck.metrics import MetricsReport, QueryOutcome, render_grid
from claimcheck.preprocess import Strategy, apply, load_handle_map
from claimcheck.retrieve import build_index, load_records, match_gold, normalize_url, search
from claimcheck.summarize import External, QueryCache, TruncateK, make_client, summarize_cached
from claimcheck.cli import _make_backend, _smc_id


def summarizer_for(label: str):
    if label == "none":
        return None
    if label.startswith("truncate:"):
        return TruncateK(k=int(label.split(":", 1)[1]))
    return External(endpoint=label)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("dataset")
    parser.add_argument("--retriever", required=True, help="`api` or `index:PATH`")
    parser.add_argument("--summarizer", action="append", default=[],
                        help="none | truncate:K | http(s)://URL | cmd:COMMAND (repeatable)")
    parser.add_argument("--strategy", action="append", default=[],
                        help="Subset of strategies (default: all).")
    parser.add_argument("--handle-map", default=None)
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument("--limit", type=int, default=5)
    parser.add_argument("--json-out", default=None)
    args = parser.parse_args()

    pairs = load(args.dataset).pairs
    if not pairs:
        print("error: dataset is empty", file=sys.stderr)
        return 1
    backend = _make_backend(args.retriever)
    handles = load_handle_map(args.handle_map) if args.handle_map else None
    cache = QueryCache(args.cache_dir) if args.cache_dir else None

    strategies = [Strategy.from_string(s) for s in args.strategy] or list(Strategy)
    summarizers = args.summarizer or ["none", "truncate:11"]

    gold_map: dict[str, set[str]] = {}
    for p in pairs:
        gold_map.setdefault(p.smc, set()).add(normalize_url(p.fca_url))

    reports: dict[tuple[str, str], MetricsReport] = {}
    for strategy in strategies:
        if strategy is Strategy.P_MRR_HRR_MREP and handles is None:
            continue
        cleaned = [apply(strategy, tokenize(p.smc), handles) for p in pairs]
        for label in summarizers:
            spec = summarizer_for(label)
            client = make_client(spec) if isinstance(spec, External) else None
            outcomes = []
            try:
                for i, (p, text) in enumerate(zip(pairs, cleaned)):
                    if spec is None:
                        query = text
                    else:
                        query = summarize_cached(text, spec, _smc_id(p.smc), cache, client=client).text
                    results = search(query, backend, args.limit) if query.strip() else []
                    rank = match_gold(results, gold_map[p.smc]) if results else None
                    outcomes.append(QueryOutcome(f"q{i:05d}", rank))
            finally:
                if client is not None:
                    client.close()
            reports[(strategy.value, label)] = MetricsReport.from_outcomes(outcomes, [1, 3, 5, 10])
            cell = reports[(strategy.value, label)]
            print(f"[{strategy.value} x {label}] R@5={cell.recall_at[5]:.2f} MRR={cell.mrr:.3f}",
                  file=sys.stderr)

    print(render_grid(reports, k=5))
    if args.json_out:
        payload = {
            f"{s}|{m}": {"recall_at": r.recall_at, "mrr": r.mrr, "n": r.n_queries}
            for (s, m), r in reports.items()
        }
        Path(args.json_out).write_text(json.dumps(payload, indent=2), encoding="utf-8")
        print(f"wrote {args.json_out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
