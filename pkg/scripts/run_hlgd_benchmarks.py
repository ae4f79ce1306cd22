#!/usr/bin/env python3
"""Run the desk-scale baselines on the published pair corpus and print a table.

Needs data/hlgd.json (see scripts/fetch_hlgd.py).  Reproduces the dataset
statistics and the two baselines that need no article content: the
day-difference logistic regression and the tuned character-similarity
threshold.

Usage:
    python scripts/run_hlgd_benchmarks.py [--pairs data/hlgd.json]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from groupline import corpus, evaluation, scoring
from groupline.pairs import corpus_stats


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", default="data/hlgd.json", type=Path)
    args = parser.parse_args()
    if not args.pairs.exists():
        print(f"{args.pairs} not found; run scripts/fetch_hlgd.py first", file=sys.stderr)
        return 1

    pairs = corpus.read_hlgd(args.pairs)
    train = [p for p in pairs if p.cut == "train"]

    stats = corpus_stats(pairs)
    positives = stats.positives
    within4 = sum(
        count_pair[0] for day, count_pair in stats.time_diff_histogram.items() if day <= 4
    )
    print(f"pairs: {len(pairs)}  positives: {positives}  negatives: {stats.negatives}")
    print(f"positives within 4 days: {within4 / positives:.3f}")
    print(f"mean positive levenshtein ratio: {stats.mean_positive_ratio:.3f}")
    print()

    model = scoring.fit_time_logistic(train)
    time_report = evaluation.evaluate_scorer(
        scoring.TimeOnlyScorer(model), pairs, model.decision_threshold
    )
    print(time_report.to_table())

    lev = scoring.LevenshteinScorer()
    threshold = scoring.tune_threshold(
        [lev.score_pair(p) for p in train], [p.label for p in train]
    )
    lev_report = evaluation.evaluate_scorer(lev, pairs, threshold)
    print(lev_report.to_table())
    return 0


if __name__ == "__main__":
    sys.exit(main())
