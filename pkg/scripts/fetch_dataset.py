#!/usr/bin/env python3
"""Fetch the publicly released claim/summary dataset and convert it to the
JSON Lines schema this toolkit consumes (see README: dataset format).

Needs outbound network access. The released files live in the dataset's
public GitHub repository; this script downloads the repository archive,
locates the pairs table, maps its columns onto our schema, and writes
data/released/pairs.jsonl. Column names in the release may drift; adjust
COLUMN_ALIASES if detection fails.

Usage:
    python scripts/fetch_dataset.py                       # download + convert
    python scripts/fetch_dataset.py --source /path/zip    # reuse a local copy
    python scripts/fetch_dataset.py --source dir/         # already extracted
"""

import argparse
import csv
import io
import json
import sys
import zipfile
from pathlib import Path
from urllib.request import urlopen

REPO_ZIP = "https://codeload.github.com/varadhbhatnagar/FC-Claim-Det/zip/refs/heads/main"
OUT_PATH = Path(__file__).resolve().parent.parent / "data" / "released" / "pairs.jsonl"

COLUMN_ALIASES = {
    "smc": ["smc", "tweet", "tweet_text", "claim", "source_text", "text"],
    "scr": ["scr", "summary", "claim_review", "gold_summary", "target_text"],
    "fca_url": ["fca_url", "url", "fact_check_url", "article_url", "link"],
    "publisher": ["publisher", "organization", "org", "source"],
    "category": ["category", "topic", "class"],
    "summarizable": ["summarizable", "is_summarizable"],
    "smc_language": ["smc_language", "tweet_language", "tweet_lang"],
    "scr_language": ["scr_language", "summary_language", "scr_lang"],
}

# IFCN-certified organizations covered by the release, keyed by fragments of
# their publisher names and sites.
INDIA_PUBLISHERS = [
    "alt news", "altnews", "boom", "india today", "logical indian", "quint",
    "factchecker", "fact crescendo", "factcrescendo", "vishvas", "vishwas",
]
US_PUBLISHERS = ["politifact", "snopes", "factcheck.org"]


def infer_country(publisher: str, url: str) -> str:
    haystack = f"{publisher} {url}".lower()
    if any(frag in haystack for frag in US_PUBLISHERS):
        return "US"
    if any(frag in haystack for frag in INDIA_PUBLISHERS) or ".in/" in haystack:
        return "IN"
    return "other"


def detect_columns(header: list[str]) -> dict[str, str] | None:
    lowered = {h.lower().strip(): h for h in header}
    mapping = {}
    for field, aliases in COLUMN_ALIASES.items():
        for alias in aliases:
            if alias in lowered:
                mapping[field] = lowered[alias]
                break
    if {"smc", "scr", "fca_url"} <= set(mapping):
        return mapping
    return None


def rows_from_table(text: str, delimiter: str):
    reader = csv.DictReader(io.StringIO(text), delimiter=delimiter)
    if not reader.fieldnames:
        return None
    mapping = detect_columns(reader.fieldnames)
    if mapping is None:
        return None
    rows = []
    for row in reader:
        rows.append({field: (row.get(col) or "").strip() for field, col in mapping.items()})
    return rows


def rows_from_json_lines(text: str):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            return None
        if not isinstance(obj, dict):
            return None
        rows.append(obj)
    if not rows:
        return None
    mapping = detect_columns(list(rows[0]))
    if mapping is None:
        return None
    return [
        {field: str(row.get(col, "")).strip() for field, col in mapping.items()}
        for row in rows
    ]


def candidate_tables(root: Path):
    for path in sorted(root.rglob("*")):
        if path.suffix.lower() not in (".csv", ".tsv", ".json", ".jsonl"):
            continue
        try:
            text = path.read_text(encoding="utf-8")
        except (UnicodeDecodeError, OSError):
            continue
        if path.suffix.lower() == ".tsv":
            rows = rows_from_table(text, "\t")
        elif path.suffix.lower() == ".csv":
            rows = rows_from_table(text, ",")
        else:
            rows = rows_from_json_lines(text)
        if rows:
            yield path, rows


def convert(rows: list[dict]) -> list[dict]:
    out = []
    for row in rows:
        if not (row.get("smc") and row.get("scr") and row.get("fca_url")):
            continue
        summarizable = str(row.get("summarizable", "true")).lower() not in ("false", "0", "no")
        out.append({
            "smc": row["smc"],
            "scr": row["scr"],
            "fca_url": row["fca_url"],
            "publisher": row.get("publisher", ""),
            "source_country": infer_country(row.get("publisher", ""), row["fca_url"]),
            "category": row.get("category") or "Other",
            "summarizable": summarizable,
            "smc_language": row.get("smc_language") or "en",
            "scr_language": row.get("scr_language") or "en",
        })
    return out


def obtain_tree(source: str | None, workdir: Path) -> Path:
    if source is None:
        print(f"downloading {REPO_ZIP} ...", file=sys.stderr)
        with urlopen(REPO_ZIP, timeout=60) as resp:
            payload = resp.read()
        archive = workdir / "release.zip"
        archive.write_bytes(payload)
        source = str(archive)
    src = Path(source)
    if src.is_dir():
        return src
    extract_dir = workdir / "extracted"
    with zipfile.ZipFile(src) as zf:
        zf.extractall(extract_dir)
    return extract_dir


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--source", default=None,
                        help="Local zip or directory instead of downloading.")
    parser.add_argument("--out", default=str(OUT_PATH))
    args = parser.parse_args()

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    workdir = out_path.parent / "_fetch_tmp"
    workdir.mkdir(parents=True, exist_ok=True)

    tree = obtain_tree(args.source, workdir)
    best: tuple[Path, list[dict]] | None = None
    for path, rows in candidate_tables(tree):
        converted = convert(rows)
        if converted and (best is None or len(converted) > len(best[1])):
            best = (path, converted)
    if best is None:
        print("error: no table with claim/summary/url columns found; "
              "adjust COLUMN_ALIASES for this release layout", file=sys.stderr)
        return 1

    source_file, pairs = best
    with open(out_path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair, ensure_ascii=False) + "\n")
    print(f"converted {len(pairs)} pairs from {source_file} -> {out_path}")
    print("verify with: claimcheck stats", out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
