"""Regression checks against the published pair corpus.

These tests need the released dataset on disk; fetch it on a networked
machine with ``python scripts/fetch_hlgd.py`` (or point GROUPLINE_HLGD at an
existing copy).  Without the file every test here skips cleanly; the property
suite in test_acceptance.py carries the offline guarantees.

Published reference points checked here: 20,056 labeled pairs of which 3,522
are positive; ~98% of positives within 4 days; mean positive character
similarity ~0.51; day-difference logistic baseline around 0.654 dev / 0.585
test F-1; a tuned character-similarity threshold around 0.485 corpus F-1.
"""

from __future__ import annotations

import os
from pathlib import Path

import pytest

from groupline import corpus, evaluation, merging, scoring
from groupline.pairs import corpus_stats

DEFAULT_PATH = Path(__file__).parent.parent / "data" / "hlgd.json"
DATASET_PATH = Path(os.environ.get("GROUPLINE_HLGD", DEFAULT_PATH))
ANNOTATION_DIR = Path(
    os.environ.get("GROUPLINE_HLGD_ANNOTATIONS",
                   Path(__file__).parent.parent / "data" / "annotations")
)

needs_dataset = pytest.mark.skipif(
    not DATASET_PATH.exists(),
    reason=f"published pair corpus not found at {DATASET_PATH}; run scripts/fetch_hlgd.py",
)


@pytest.fixture(scope="module")
def hlgd():
    return corpus.read_hlgd(DATASET_PATH)


@pytest.fixture(scope="module")
def hlgd_stats(hlgd):
    return corpus_stats(hlgd)


@needs_dataset
def test_total_pair_count_is_exact(hlgd):
    assert len(hlgd) == 20056


@needs_dataset
def test_positive_pair_count_is_exact(hlgd):
    assert sum(p.label for p in hlgd) == 3522


@needs_dataset
def test_positives_concentrate_within_four_days(hlgd):
    positives = [p for p in hlgd if p.label == 1]
    within = sum(1 for p in positives if p.day_diff <= 4)
    assert within / len(positives) >= 0.97


@needs_dataset
def test_mean_positive_levenshtein_ratio(hlgd_stats):
    assert hlgd_stats.mean_positive_ratio == pytest.approx(0.51, abs=0.02)


@needs_dataset
def test_time_only_baseline_dev_and_test_f1(hlgd):
    train = [p for p in hlgd if p.cut == "train"]
    model = scoring.fit_time_logistic(train)
    scorer = scoring.TimeOnlyScorer(model)
    report = evaluation.evaluate_scorer(scorer, hlgd, model.decision_threshold)
    assert report.by_cut["dev"].f1 == pytest.approx(0.654, abs=0.03)
    assert report.by_cut["test"].f1 == pytest.approx(0.585, abs=0.03)


@needs_dataset
def test_time_only_weight_is_negative(hlgd):
    train = [p for p in hlgd if p.cut == "train"]
    model = scoring.fit_time_logistic(train)
    assert model.weight < 0


@needs_dataset
def test_levenshtein_classifier_corpus_f1(hlgd):
    scorer = scoring.LevenshteinScorer()
    train = [p for p in hlgd if p.cut == "train"]
    threshold = scoring.tune_threshold(
        [scorer.score_pair(p) for p in train], [p.label for p in train]
    )
    report = evaluation.evaluate_scorer(scorer, hlgd, threshold)
    assert report.overall.f1 == pytest.approx(0.485, abs=0.03)


@pytest.mark.skipif(
    not ANNOTATION_DIR.exists() or not any(ANNOTATION_DIR.glob("*/")),
    reason="raw five-annotator files not present in the release copy",
)
def test_leave_one_out_agreement_average():
    """Conditional: only runs when the release ships the five raw annotation
    sets, laid out as <dir>/<timeline>/{a1..a5}.csv next to <timeline>.jsonl."""
    scores = []
    for timeline_dir in sorted(d for d in ANNOTATION_DIR.iterdir() if d.is_dir()):
        timeline = corpus.parse_timeline(timeline_dir.with_suffix(".jsonl"))
        annotations = [
            corpus.parse_annotation_set(path, timeline)
            for path in sorted(timeline_dir.glob("*.csv"))
        ]
        if len(annotations) < 3:
            pytest.skip(f"{timeline_dir} has fewer than 3 annotation files")
        report = merging.leave_one_out_agreement(annotations)
        scores.append(report.average)
    assert scores, "no timelines with annotations found"
    assert sum(scores) / len(scores) == pytest.approx(0.814, abs=0.02)
