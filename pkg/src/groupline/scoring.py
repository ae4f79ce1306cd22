"""Pairwise same-group scorers and their training/tuning helpers.

Every method implements the same contract (:class:`PairScorer`): an ordered
score that is monotone in same-group confidence, evaluated through a
:class:`PairView` that exposes exactly the fields the scorer's challenge tier
permits (1: headline text, 2: + publication dates, 3: + content/source/url).
"""

from __future__ import annotations

import json
import math
import subprocess
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Sequence

from .corpus import Headline, LabeledPair, day_difference
from .errors import ConfigError, MissingContentError, TierViolation

TIER_HEADLINE = 1
TIER_TIME = 2
TIER_FULL = 3

CONTEXT_WORDS = 512


class PairView:
    """Capability-restricted window onto an ordered headline pair.

    Reading a field above the view's tier raises :class:`TierViolation`; the
    ``_a`` accessors name the first headline in the view's order, so a swapped
    view transparently exchanges sides.
    """

    __slots__ = ("_first", "_second", "tier")

    def __init__(self, first: Headline, second: Headline, tier: int):
        if tier not in (TIER_HEADLINE, TIER_TIME, TIER_FULL):
            raise ConfigError(f"tier must be 1, 2 or 3, got {tier}")
        self._first = first
        self._second = second
        self.tier = tier

    @classmethod
    def from_pair(cls, pair: LabeledPair, tier: int, swapped: bool = False) -> PairView:
        a, b = pair.headline_a, pair.headline_b
        return cls(b, a, tier) if swapped else cls(a, b, tier)

    def swapped(self) -> PairView:
        return PairView(self._second, self._first, self.tier)

    def restricted(self, tier: int) -> PairView:
        return PairView(self._first, self._second, min(self.tier, tier))

    def _require(self, tier: int, name: str):
        if self.tier < tier:
            raise TierViolation(
                f"tier-{self.tier} view does not expose {name!r} (requires tier {tier})"
            )

    @property
    def text_a(self) -> str:
        self._require(TIER_HEADLINE, "text_a")
        return self._first.text

    @property
    def text_b(self) -> str:
        self._require(TIER_HEADLINE, "text_b")
        return self._second.text

    @property
    def date_a(self):
        self._require(TIER_TIME, "date_a")
        return self._first.publish_date

    @property
    def date_b(self):
        self._require(TIER_TIME, "date_b")
        return self._second.publish_date

    @property
    def day_diff(self) -> int:
        self._require(TIER_TIME, "day_diff")
        return day_difference(self._first, self._second)

    @property
    def content_a(self) -> str | None:
        self._require(TIER_FULL, "content_a")
        return self._first.content

    @property
    def content_b(self) -> str | None:
        self._require(TIER_FULL, "content_b")
        return self._second.content

    @property
    def source_a(self) -> str:
        self._require(TIER_FULL, "source_a")
        return self._first.source

    @property
    def source_b(self) -> str:
        self._require(TIER_FULL, "source_b")
        return self._second.source

    @property
    def url_a(self) -> str | None:
        self._require(TIER_FULL, "url_a")
        return self._first.url

    @property
    def url_b(self) -> str | None:
        self._require(TIER_FULL, "url_b")
        return self._second.url

    @property
    def authors_a(self) -> str | None:
        self._require(TIER_FULL, "authors_a")
        return self._first.authors

    @property
    def authors_b(self) -> str | None:
        self._require(TIER_FULL, "authors_b")
        return self._second.authors


class PairScorer:
    """Uniform contract for all pairwise scorers.

    ``score_ordered`` sees one PairView; higher means more same-group
    confidence.  ``calibrated`` marks scores that are probabilities in [0, 1];
    ``symmetric`` marks scorers whose score is order-invariant by construction.
    """

    identity: str = "scorer"
    tier: int = TIER_HEADLINE
    calibrated: bool = False
    symmetric: bool = False

    def score_ordered(self, view: PairView) -> float:
        raise NotImplementedError

    def view(self, pair: LabeledPair, swapped: bool = False) -> PairView:
        return PairView.from_pair(pair, self.tier, swapped)

    def score_pair(self, pair: LabeledPair, swapped: bool = False) -> float:
        return self.score_ordered(self.view(pair, swapped))


# ---------------------------------------------------------------------------
# Levenshtein ratio (challenge 1)
# ---------------------------------------------------------------------------


def levenshtein_distance(s1: str, s2: str) -> int:
    """Minimal insert/delete/substitute count, over Unicode code points."""
    if s1 == s2:
        return 0
    # strip common affixes; cheap and leaves the DP smaller
    start = 0
    end1, end2 = len(s1), len(s2)
    while start < end1 and start < end2 and s1[start] == s2[start]:
        start += 1
    while end1 > start and end2 > start and s1[end1 - 1] == s2[end2 - 1]:
        end1 -= 1
        end2 -= 1
    s1, s2 = s1[start:end1], s2[start:end2]
    if not s1:
        return len(s2)
    if not s2:
        return len(s1)
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    previous = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, start=1):
        current = [i]
        append = current.append
        prev_row = previous
        for j, c2 in enumerate(s2, start=1):
            cost = prev_row[j - 1] if c1 == c2 else prev_row[j - 1] + 1
            deletion = prev_row[j] + 1
            insertion = current[j - 1] + 1
            best = cost if cost < deletion else deletion
            append(best if best < insertion else insertion)
        previous = current
    return previous[-1]


def levenshtein_ratio(s1: str, s2: str) -> float:
    """1 - distance / max length, in [0, 1]; two empty strings count as identical."""
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(s1, s2) / longest


class LevenshteinScorer(PairScorer):
    """Character-level edit similarity of the two headline texts."""

    identity = "levenshtein-ratio"
    tier = TIER_HEADLINE
    calibrated = True
    symmetric = True

    def score_ordered(self, view: PairView) -> float:
        return levenshtein_ratio(view.text_a, view.text_b)


# ---------------------------------------------------------------------------
# Time-only logistic baseline (challenge 2)
# ---------------------------------------------------------------------------


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@dataclass(frozen=True)
class TimeLogistic:
    """Logistic model p(same group) = sigmoid(weight * day_diff + bias)."""

    weight: float
    bias: float
    decision_threshold: float

    def predict_proba(self, day_diff: float) -> float:
        return _sigmoid(self.weight * day_diff + self.bias)

    def to_dict(self) -> dict:
        return {
            "weight": self.weight,
            "bias": self.bias,
            "decision_threshold": self.decision_threshold,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, payload: dict) -> TimeLogistic:
        return cls(
            float(payload["weight"]),
            float(payload["bias"]),
            float(payload["decision_threshold"]),
        )


def fit_time_logistic(
    pairs: Sequence[LabeledPair],
    *,
    learning_rate: float = 0.1,
    iterations: int = 5000,
) -> TimeLogistic:
    """Fit the day-difference logistic regression by full-batch gradient descent.

    The single feature is standardized by the training mean/std for the fit
    and the learned parameters are folded back to raw day units.  The decision
    threshold is then tuned on the same pairs.
    """
    data = [(pair.day_diff, pair.label) for pair in pairs]
    labels = {label for _, label in data}
    if labels != {0, 1}:
        raise ValueError("training pairs must contain both labels")

    n = len(data)
    mean = sum(dt for dt, _ in data) / n
    variance = sum((dt - mean) ** 2 for dt, _ in data) / n
    std = math.sqrt(variance) if variance > 0 else 1.0

    # identical (day_diff, label) rows share one gradient term
    grouped = Counter(data)
    w = 0.0
    b = 0.0
    for _ in range(iterations):
        grad_w = 0.0
        grad_b = 0.0
        for (dt, y), count in grouped.items():
            z = (dt - mean) / std
            err = _sigmoid(w * z + b) - y
            grad_w += count * err * z
            grad_b += count * err
        w -= learning_rate * grad_w / n
        b -= learning_rate * grad_b / n

    weight = w / std
    bias = b - w * mean / std
    scores = [_sigmoid(weight * dt + bias) for dt, _ in data]
    threshold = tune_threshold(scores, [y for _, y in data])
    return TimeLogistic(weight, bias, threshold)


class TimeOnlyScorer(PairScorer):
    """Publication-date-only baseline around a fitted TimeLogistic."""

    tier = TIER_TIME
    calibrated = True
    symmetric = True

    def __init__(self, model: TimeLogistic):
        self.model = model
        self.identity = "time-only"

    def score_ordered(self, view: PairView) -> float:
        return self.model.predict_proba(view.day_diff)


# ---------------------------------------------------------------------------
# Time-decay fusion (challenge >= 2)
# ---------------------------------------------------------------------------


class TimeDecayScorer(PairScorer):
    """Multiplies a base scorer by exp(-lambda * day_diff)."""

    def __init__(self, base: PairScorer, decay: float):
        if decay < 0:
            raise ConfigError(f"decay lambda must be >= 0, got {decay}")
        self.base = base
        self.decay = decay
        self.identity = f"{base.identity}+time"
        self.tier = max(base.tier, TIER_TIME)
        self.calibrated = base.calibrated
        self.symmetric = base.symmetric

    def score_ordered(self, view: PairView) -> float:
        base_score = self.base.score_ordered(view.restricted(self.base.tier))
        return base_score * math.exp(-self.decay * view.day_diff)


def time_decay(base: PairScorer, decay: float) -> PairScorer:
    return TimeDecayScorer(base, decay)


# ---------------------------------------------------------------------------
# Conditional headline likelihood backends and the generator-swap score
# ---------------------------------------------------------------------------


def tokenize(text: str) -> list[str]:
    """Lowercased whitespace tokens; the unit for all likelihood computations."""
    return text.lower().split()


class ConditionalLM:
    """Backend contract: length-normalized log P(headline | content), <= 0."""

    def cond_logprob(self, headline: str, content: str) -> float:
        raise NotImplementedError


class NgramLM(ConditionalLM):
    """Interpolated per-article unigram model over a smoothed background.

    P(w | content) = alpha * relfreq(w, first CONTEXT_WORDS content tokens)
                   + (1 - alpha) * P_bg(w)
    with P_bg an add-one smoothed unigram model over the training headlines.
    ``cond_logprob`` is the mean per-token log probability of the headline.
    """

    def __init__(self, alpha: float, background_counts: dict[str, int], total_tokens: int):
        if not 0.0 <= alpha < 1.0:
            raise ConfigError(f"alpha must be in [0, 1), got {alpha}")
        self.alpha = alpha
        self.background_counts = background_counts
        self.total_tokens = total_tokens
        self._denominator = total_tokens + len(background_counts) + 1

    def background_prob(self, token: str) -> float:
        return (self.background_counts.get(token, 0) + 1) / self._denominator

    def cond_logprob(self, headline: str, content: str) -> float:
        tokens = tokenize(headline)
        if not tokens:
            raise ValueError("empty headline")
        context = tokenize(content)[:CONTEXT_WORDS]
        context_counts = Counter(context)
        context_len = len(context)
        total = 0.0
        for token in tokens:
            rel = context_counts[token] / context_len if context_len else 0.0
            total += math.log(self.alpha * rel + (1.0 - self.alpha) * self.background_prob(token))
        return total / len(tokens)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "background_counts": dict(sorted(self.background_counts.items())),
            "total_tokens": self.total_tokens,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, payload: dict) -> NgramLM:
        return cls(
            float(payload["alpha"]),
            {str(k): int(v) for k, v in payload["background_counts"].items()},
            int(payload["total_tokens"]),
        )


def train_ngram_backend(
    corpus: Iterable[tuple[str, str]], *, alpha: float = 0.9
) -> NgramLM:
    """Build the desk-scale conditional backend from (content, headline) pairs."""
    counts: Counter[str] = Counter()
    total = 0
    seen_any = False
    for _content, headline in corpus:
        seen_any = True
        tokens = tokenize(headline)
        counts.update(tokens)
        total += len(tokens)
    if not seen_any:
        raise ValueError("empty training corpus")
    return NgramLM(alpha, dict(counts), total)


class SubprocessLM(ConditionalLM):
    """External backend over a child process's stdio, one JSON line per request.

    Request:  {"content": str, "headline": str}
    Response: {"logprob_per_token": real}
    """

    def __init__(self, argv: Sequence[str]):
        self.argv = list(argv)
        self._proc = subprocess.Popen(
            self.argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def cond_logprob(self, headline: str, content: str) -> float:
        if not headline.strip():
            raise ValueError("empty headline")
        assert self._proc.stdin is not None and self._proc.stdout is not None
        request = json.dumps({"content": content, "headline": headline}, ensure_ascii=False)
        self._proc.stdin.write(request + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise RuntimeError(f"LM backend {self.argv!r} closed its output")
        return float(json.loads(line)["logprob_per_token"])

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self) -> SubprocessLM:
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def swap_score(lm: ConditionalLM, article_1: Headline, article_2: Headline) -> float:
    """Likelihood that the two articles could swap headlines.

    Sum, in probability space, of each headline's length-normalized
    conditional probability given the other article's content; symmetric in
    its arguments by construction.
    """
    for article in (article_1, article_2):
        if article.content is None:
            raise MissingContentError(f"article {article.id!r} carries no content")
        if not article.text.strip():
            raise ValueError(f"article {article.id!r} has an empty headline")
    return math.exp(lm.cond_logprob(article_2.text, article_1.content)) + math.exp(
        lm.cond_logprob(article_1.text, article_2.content)
    )


class SwapScorer(PairScorer):
    """Generator-swap score over a conditional-likelihood backend."""

    identity = "generator-swap"
    tier = TIER_FULL
    calibrated = False
    symmetric = True

    def __init__(self, lm: ConditionalLM):
        self.lm = lm

    def score_ordered(self, view: PairView) -> float:
        content_a, content_b = view.content_a, view.content_b
        if content_a is None or content_b is None:
            raise MissingContentError("generator-swap needs content on both sides")
        if not view.text_a.strip() or not view.text_b.strip():
            raise ValueError("empty headline")
        return math.exp(self.lm.cond_logprob(view.text_b, content_a)) + math.exp(
            self.lm.cond_logprob(view.text_a, content_b)
        )


# ---------------------------------------------------------------------------
# Threshold tuning and symmetrization
# ---------------------------------------------------------------------------


def tune_threshold(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Threshold (predict 1 iff score >= t) maximizing F-1 on the given data.

    Sweeps the midpoints between consecutive distinct scores plus guards below
    the minimum (predict all 1) and above the maximum (predict all 0); ties
    break toward the smallest threshold.  F-1 comparisons are exact integer
    arithmetic, so the sweep is immune to float noise.
    """
    if len(scores) != len(labels):
        raise ValueError(f"length mismatch: {len(scores)} scores vs {len(labels)} labels")
    if set(labels) != {0, 1}:
        raise ValueError("labels must contain both classes")

    ranked = sorted(zip(scores, labels), key=lambda pair: -pair[0])
    total_pos = sum(label for _, label in ranked)
    n = len(ranked)

    # cut k = predict the top k scores positive; F1(k) = 2 tp / (k + P)
    best_tp, best_k = 0, 0  # k = 0 -> F1 = 0 (threshold above max)
    tp = 0
    for k in range(1, n + 1):
        tp += ranked[k - 1][1]
        if k < n and ranked[k][0] == ranked[k - 1][0]:
            continue  # not a realizable cut: equal scores may not be split
        # compare 2 tp / (k + P) exactly; >= keeps the larger k, i.e. the
        # smaller threshold, on ties
        if tp * (best_k + total_pos) >= best_tp * (k + total_pos):
            best_tp, best_k = tp, k

    if best_k == 0:
        return ranked[0][0] + 1.0
    if best_k == n:
        return ranked[-1][0] - 1.0
    return (ranked[best_k - 1][0] + ranked[best_k][0]) / 2.0


class SymmetrizedScorer(PairScorer):
    """Order-invariant wrapper: mean of the base scorer over both orders."""

    def __init__(self, base: PairScorer):
        self.base = base
        self.identity = f"symmetrized({base.identity})"
        self.tier = base.tier
        self.calibrated = base.calibrated
        self.symmetric = True

    def score_ordered(self, view: PairView) -> float:
        return (self.base.score_ordered(view) + self.base.score_ordered(view.swapped())) / 2.0


def symmetrize(base: PairScorer) -> PairScorer:
    return SymmetrizedScorer(base)


# ---------------------------------------------------------------------------
# Shipped operating points
# ---------------------------------------------------------------------------


def list_presets() -> list[str]:
    root = resources.files("groupline").joinpath("presets")
    return sorted(path.name[: -len(".json")] for path in root.iterdir() if path.name.endswith(".json"))


def load_preset(name: str) -> dict:
    """Load a shipped operating point: {"threshold": ..., optional "lambda": ...}."""
    path = resources.files("groupline").joinpath("presets", f"{name}.json")
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"unknown preset {name!r}; available: {list_presets()}") from None
    return json.loads(raw)
