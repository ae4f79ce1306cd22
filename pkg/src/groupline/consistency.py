"""Commutative and transitive consistency audits for ordered pairwise scorers.

Same-group prediction should not depend on argument order, and two positive
pairs in a triplet should imply the third; these audits quantify how far a
scorer strays from both expectations.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

from .corpus import LabeledPair, Timeline, day_difference
from .scoring import PairScorer, PairView


@dataclass(frozen=True)
class CommutativeReport:
    """Order-swap audit: how often predictions flip, and how much the
    predicted-class probability moves when they do not."""

    pairs_tested: int
    flips: int
    mean_fluctuation: float

    @property
    def flip_rate(self) -> float:
        return self.flips / self.pairs_tested if self.pairs_tested else 0.0

    def to_dict(self) -> dict:
        return {
            "pairs_tested": self.pairs_tested,
            "flips": self.flips,
            "flip_rate": self.flip_rate,
            "mean_fluctuation": self.mean_fluctuation,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass(frozen=True)
class TransitiveReport:
    """Triangle audit over triplets with at least two positive predictions."""

    triplets_with_two_positives: int
    consistent_111: int
    inconsistent_110: int

    def __post_init__(self) -> None:
        if self.consistent_111 + self.inconsistent_110 != self.triplets_with_two_positives:
            raise ValueError("111 + 110 must equal the triplets-with-two-positives count")

    @property
    def consistency_rate(self) -> float:
        if self.triplets_with_two_positives == 0:
            return 1.0
        return self.consistent_111 / self.triplets_with_two_positives

    def to_dict(self) -> dict:
        return {
            "triplets_with_two_positives": self.triplets_with_two_positives,
            "consistent_111": self.consistent_111,
            "inconsistent_110": self.inconsistent_110,
            "consistency_rate": self.consistency_rate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _predicted_class_probability(score: float, prediction: int, calibrated: bool,
                                 lo: float, hi: float) -> float:
    """Probability assigned to the predicted class, min-max normalizing
    uncalibrated scores over the evaluation split."""
    if calibrated:
        prob_positive = score
    elif hi > lo:
        prob_positive = (score - lo) / (hi - lo)
    else:
        prob_positive = 0.5
    return prob_positive if prediction == 1 else 1.0 - prob_positive


def commutative_audit(
    scorer: PairScorer, pairs: Sequence[LabeledPair], threshold: float
) -> CommutativeReport:
    """Evaluate every pair in both orders; count prediction flips and measure
    the probability fluctuation of the non-flipping pairs."""
    forward = [scorer.score_pair(p) for p in pairs]
    backward = [scorer.score_pair(p, swapped=True) for p in pairs]

    lo = min(forward + backward, default=0.0)
    hi = max(forward + backward, default=0.0)

    flips = 0
    fluctuations: list[float] = []
    for s_ab, s_ba in zip(forward, backward):
        pred_ab = 1 if s_ab >= threshold else 0
        pred_ba = 1 if s_ba >= threshold else 0
        if pred_ab != pred_ba:
            flips += 1
            continue
        p_ab = _predicted_class_probability(s_ab, pred_ab, scorer.calibrated, lo, hi)
        p_ba = _predicted_class_probability(s_ba, pred_ba, scorer.calibrated, lo, hi)
        fluctuations.append(abs(p_ab - p_ba))

    mean_fluctuation = sum(fluctuations) / len(fluctuations) if fluctuations else 0.0
    return CommutativeReport(len(pairs), flips, mean_fluctuation)


def transitive_audit(
    scorer: PairScorer,
    timeline: Timeline,
    threshold: float,
    window_days: int = 4,
    dump_110: str | Path | IO[str] | None = None,
) -> TransitiveReport:
    """Classify eligible headline triplets into 111 vs 110 triangles.

    A triplet is eligible when all three of its pairs are within the day
    window (mirroring which pairs exist in the dataset).  Each unordered pair
    gets one prediction, scored in canonical chronological order; a
    symmetrized scorer is order-invariant anyway.
    """
    headlines = timeline.headlines
    n = len(headlines)
    scored: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if day_difference(headlines[i], headlines[j]) <= window_days:
                view = PairView(headlines[i], headlines[j], scorer.tier)
                scored[(i, j)] = scorer.score_ordered(view)

    consistent = 0
    inconsistent = 0
    rows_110: list[tuple[str, str, str, float, float, float]] = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in scored:
                continue
            for k in range(j + 1, n):
                if (i, k) not in scored or (j, k) not in scored:
                    continue
                s_ij, s_ik, s_jk = scored[(i, j)], scored[(i, k)], scored[(j, k)]
                positives = (s_ij >= threshold) + (s_ik >= threshold) + (s_jk >= threshold)
                if positives == 3:
                    consistent += 1
                elif positives == 2:
                    inconsistent += 1
                    if dump_110 is not None:
                        rows_110.append(
                            (headlines[i].id, headlines[j].id, headlines[k].id, s_ij, s_ik, s_jk)
                        )

    if dump_110 is not None:
        _write_110_csv(rows_110, dump_110)
    return TransitiveReport(consistent + inconsistent, consistent, inconsistent)


def _write_110_csv(
    rows: list[tuple[str, str, str, float, float, float]], dest: str | Path | IO[str]
) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["id_a", "id_b", "id_c", "score_ab", "score_ac", "score_bc"])
    writer.writerows(rows)
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(buf.getvalue(), encoding="utf-8")
    else:
        dest.write(buf.getvalue())
