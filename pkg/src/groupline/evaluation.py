"""Binary F-1 evaluation of pair scorers, broken down by split and timeline."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import AnnotationSet, LabeledPair, Partition, Timeline
from .scoring import PairScorer


@dataclass(frozen=True)
class MetricBlock:
    """Confusion counts and the derived precision/recall/F-1."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if (p + r) else 0.0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
        }


def f1_score(predictions: Sequence[int], labels: Sequence[int]) -> tuple[float, float, float]:
    """(precision, recall, f1) for the positive class, with zero-division -> 0."""
    block = confusion_counts(predictions, labels)
    return block.precision, block.recall, block.f1


def confusion_counts(predictions: Sequence[int], labels: Sequence[int]) -> MetricBlock:
    if len(predictions) != len(labels):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(labels)} labels")
    tp = fp = fn = tn = 0
    for pred, label in zip(predictions, labels):
        if pred == 1 and label == 1:
            tp += 1
        elif pred == 1:
            fp += 1
        elif label == 1:
            fn += 1
        else:
            tn += 1
    return MetricBlock(tp, fp, fn, tn)


@dataclass(frozen=True)
class EvalReport:
    scorer: str
    tier: int
    threshold: float
    overall: MetricBlock
    by_cut: Mapping[str, MetricBlock]
    by_timeline: Mapping[str, MetricBlock]

    def to_dict(self) -> dict:
        return {
            "scorer": self.scorer,
            "tier": self.tier,
            "threshold": self.threshold,
            "overall": self.overall.to_dict(),
            "by_cut": {k: self.by_cut[k].to_dict() for k in sorted(self.by_cut)},
            "by_timeline": {k: self.by_timeline[k].to_dict() for k in sorted(self.by_timeline)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_table(self) -> str:
        """Aligned plain-text summary, one row per slice."""
        rows = [("overall", self.overall)]
        rows += [(f"cut:{name}", self.by_cut[name]) for name in sorted(self.by_cut)]
        rows += [(f"timeline:{name}", self.by_timeline[name]) for name in sorted(self.by_timeline)]
        width = max(len(name) for name, _ in rows)
        lines = [
            f"scorer={self.scorer} tier={self.tier} threshold={self.threshold:.6g}",
            f"{'slice'.ljust(width)}  {'P':>6}  {'R':>6}  {'F1':>6}  {'tp':>6} {'fp':>6} {'fn':>6} {'tn':>6}",
        ]
        for name, block in rows:
            lines.append(
                f"{name.ljust(width)}  {block.precision:6.3f}  {block.recall:6.3f}  "
                f"{block.f1:6.3f}  {block.tp:6d} {block.fp:6d} {block.fn:6d} {block.tn:6d}"
            )
        return "\n".join(lines) + "\n"


def evaluate_scorer(
    scorer: PairScorer, pairs: Sequence[LabeledPair], threshold: float
) -> EvalReport:
    """Score every pair in canonical order and report metrics per cut/timeline.

    Prediction is 1 iff score >= threshold.  Each pair is scored through a
    PairView restricted to the scorer's tier; a symmetrized scorer handles the
    reverse order internally.
    """
    predictions: list[int] = []
    labels: list[int] = []
    cut_preds: dict[str, tuple[list[int], list[int]]] = {}
    timeline_preds: dict[str, tuple[list[int], list[int]]] = {}
    for pair in pairs:
        score = scorer.score_pair(pair)
        pred = 1 if score >= threshold else 0
        predictions.append(pred)
        labels.append(pair.label)
        for key, store in ((pair.cut, cut_preds), (pair.timeline_id, timeline_preds)):
            slot = store.setdefault(key, ([], []))
            slot[0].append(pred)
            slot[1].append(pair.label)
    return EvalReport(
        scorer=scorer.identity,
        tier=scorer.tier,
        threshold=threshold,
        overall=confusion_counts(predictions, labels),
        by_cut={cut: confusion_counts(p, l) for cut, (p, l) in cut_preds.items()},
        by_timeline={tid: confusion_counts(p, l) for tid, (p, l) in timeline_preds.items()},
    )


def human_performance(
    extra: AnnotationSet, groups: Partition, timeline: Timeline, cfg=None
) -> EvalReport:
    """Score a sixth annotation as a predictor against the global groups.

    Pair labels come from the merged groups via the standard pair builder (so
    numbers are comparable to scorer evaluations); the annotation predicts 1
    for a pair iff it put both headlines in the same group.
    """
    from .pairs import PairBuildConfig, generate_labeled_pairs

    if cfg is None:
        cfg = PairBuildConfig()
    uncovered = sorted(set(timeline.headline_ids()) - set(extra.assignment))
    if uncovered:
        raise ValueError(f"annotation does not cover headline ids: {uncovered}")

    gold_pairs = generate_labeled_pairs(timeline, groups, cfg)
    extra_partition = extra.to_partition()
    predictions = [
        1 if extra_partition.same_group(p.headline_a.id, p.headline_b.id) else 0
        for p in gold_pairs
    ]
    labels = [p.label for p in gold_pairs]
    block = confusion_counts(predictions, labels)
    return EvalReport(
        scorer=f"human:{extra.annotator_id}",
        tier=3,
        threshold=0.5,
        overall=block,
        by_cut={timeline.split: block},
        by_timeline={timeline.timeline_id: block},
    )
