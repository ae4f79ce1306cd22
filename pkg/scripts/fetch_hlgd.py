#!/usr/bin/env python3
"""Fetch the published headline-grouping pair corpus into data/hlgd.json.

Tries the Hugging Face hub dataset first (id: ``hlgd``), then raw files from
the public dataset repository.  Either way the result is normalized into the
pair-file schema this toolkit reads (see groupline.corpus.HLGD_FIELDS) so the
regression suite in tests/test_dataset_regression.py can run.

Usage:
    python scripts/fetch_hlgd.py [--dest data/hlgd.json]
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.request
from pathlib import Path
from urllib.parse import urlparse

GITHUB_CANDIDATES = [
    "https://raw.githubusercontent.com/tingofurro/headline_grouping/main/hlgd_classification.json",
    "https://raw.githubusercontent.com/tingofurro/headline_grouping/master/hlgd_classification.json",
]

CUT_BY_SPLIT = {"train": "training", "validation": "validation", "test": "testing"}


def domain_of(url: str) -> str:
    try:
        netloc = urlparse(url).netloc
    except ValueError:
        return ""
    return netloc.removeprefix("www.")


def normalize_entry(row: dict, cut: str) -> dict:
    """Map a source row (hub or repo naming) onto the toolkit's schema."""

    def pick(*names, default=""):
        for name in names:
            if name in row and row[name] is not None:
                return row[name]
        return default

    url_a = str(pick("url_a", default=""))
    url_b = str(pick("url_b", default=""))
    return {
        "headline_a": str(pick("headline_a")),
        "headline_b": str(pick("headline_b")),
        "day_a": str(pick("day_a", "date_a")),
        "day_b": str(pick("day_b", "date_b")),
        "source_a": str(pick("source_a", default=domain_of(url_a))),
        "source_b": str(pick("source_b", default=domain_of(url_b))),
        "authors_a": str(pick("authors_a", default="")),
        "authors_b": str(pick("authors_b", default="")),
        "url_a": url_a,
        "url_b": url_b,
        "cut": str(pick("cut", default=cut)),
        "timeline": str(pick("timeline", "timeline_id", default="")),
        "label": int(pick("label", default=0)),
    }


def from_hub() -> list[dict] | None:
    try:
        from datasets import load_dataset
    except ImportError:
        print("datasets library not installed; skipping hub route", file=sys.stderr)
        return None
    try:
        dataset = load_dataset("hlgd")
    except Exception as exc:  # network failure, renamed dataset, ...
        print(f"hub route failed: {exc}", file=sys.stderr)
        return None
    entries = []
    for split, cut in CUT_BY_SPLIT.items():
        for row in dataset[split]:
            entries.append(normalize_entry(dict(row), cut))
    return entries


def from_repository() -> list[dict] | None:
    for url in GITHUB_CANDIDATES:
        try:
            with urllib.request.urlopen(url, timeout=60) as response:
                raw = json.loads(response.read().decode("utf-8"))
        except Exception as exc:
            print(f"repository route {url} failed: {exc}", file=sys.stderr)
            continue
        return [normalize_entry(dict(row), row.get("cut", "training")) for row in raw]
    return None


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data/hlgd.json", type=Path)
    args = parser.parse_args()

    entries = from_hub() or from_repository()
    if entries is None:
        print("could not fetch the corpus from any source; check network access",
              file=sys.stderr)
        return 1

    args.dest.parent.mkdir(parents=True, exist_ok=True)
    args.dest.write_text(
        json.dumps(entries, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    positives = sum(e["label"] for e in entries)
    print(f"wrote {len(entries)} pairs ({positives} positive) to {args.dest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
