"""Turn a timeline plus global groups into the binary pair dataset, with stats.

Negative pairs are kept only when published within a small day window; that
window filter alone (no random subsampling) produces the dataset's class
balance, so generation is fully deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import LabeledPair, Partition, Timeline, day_difference
from .errors import ConfigError
from .scoring import levenshtein_ratio


@dataclass(frozen=True)
class PairBuildConfig:
    window_days: int = 4
    include_all_positives: bool = True

    def __post_init__(self) -> None:
        if self.window_days < 0:
            raise ConfigError(f"window_days must be >= 0, got {self.window_days}")


def generate_labeled_pairs(
    timeline: Timeline, groups: Partition, cfg: PairBuildConfig = PairBuildConfig()
) -> list[LabeledPair]:
    """Emit every unordered headline pair with its same-group label.

    Positive pairs are always emitted (unless ``include_all_positives`` is
    off, in which case they obey the window too); negatives only when the
    publication dates are at most ``window_days`` apart.  Output order follows
    the timeline's canonical (date, id) order, the earlier headline first.
    """
    missing = [h.id for h in timeline.headlines if h.id not in groups.groups]
    if missing:
        raise ValueError(f"partition missing timeline headlines: {missing}")

    out: list[LabeledPair] = []
    headlines = timeline.headlines
    for i in range(len(headlines)):
        for j in range(i + 1, len(headlines)):
            a, b = headlines[i], headlines[j]
            label = 1 if groups.same_group(a.id, b.id) else 0
            dd = day_difference(a, b)
            if label == 1 and not cfg.include_all_positives and dd > cfg.window_days:
                continue
            if label == 0 and dd > cfg.window_days:
                continue
            out.append(LabeledPair(a, b, dd, label, timeline.split, timeline.timeline_id))
    return out


@dataclass(frozen=True)
class CorpusStats:
    """Counts, day-difference histogram, and text-similarity stats of a pair set."""

    positives: int
    negatives: int
    time_diff_histogram: dict[int, tuple[int, int]]
    levenshtein_ratios: tuple[float, ...] = field(repr=False)
    mean_positive_ratio: float

    def to_dict(self) -> dict:
        return {
            "positives": self.positives,
            "negatives": self.negatives,
            "time_diff_histogram": {
                str(day): list(self.time_diff_histogram[day])
                for day in sorted(self.time_diff_histogram)
            },
            "mean_positive_ratio": self.mean_positive_ratio,
            "levenshtein_ratios": list(self.levenshtein_ratios),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def corpus_stats(pairs: Sequence[LabeledPair]) -> CorpusStats:
    """Histogram day differences and character-level similarity of positive pairs."""
    positives = 0
    negatives = 0
    histogram: dict[int, list[int]] = {}
    ratios: list[float] = []
    for pair in pairs:
        bucket = histogram.setdefault(pair.day_diff, [0, 0])
        if pair.label == 1:
            positives += 1
            bucket[0] += 1
            ratios.append(levenshtein_ratio(pair.headline_a.text, pair.headline_b.text))
        else:
            negatives += 1
            bucket[1] += 1
    mean_ratio = sum(ratios) / len(ratios) if ratios else 0.0
    return CorpusStats(
        positives=positives,
        negatives=negatives,
        time_diff_histogram={d: (p, n) for d, (p, n) in histogram.items()},
        levenshtein_ratios=tuple(ratios),
        mean_positive_ratio=mean_ratio,
    )
