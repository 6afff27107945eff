"""Multi-annotator triage: labels, agreement, consensus, and prevalence.

Human annotators sort candidate images into three categories (1 = highly
likely GAN-generated, 2 = likely, 3 = not).  This module keeps the label
history in an append-only JSONL log (replayable after a crash), computes
Cohen's kappa over doubly-labeled items, derives strict/loose consensus
counts, and turns them into prevalence bounds with optional population
extrapolation and tweet-share rates.
"""

from __future__ import annotations

import json
import math
import random
import threading
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import IntEnum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .geometry import ScoreRecord

HALF = Fraction(1, 2)


class Category(IntEnum):
    HIGHLY_LIKELY_GAN = 1
    LIKELY_GAN = 2
    NOT_GAN = 3


VALID_CATEGORIES = frozenset(int(c) for c in Category)

#: Categories counting toward the loose ("likely or highly likely") consensus.
LOOSE_CATEGORIES = frozenset({1, 2})


class UnsupportedConfiguration(ValueError):
    """Consensus rules are defined for exactly two annotators."""


class UnknownImageError(KeyError):
    """A label referenced an image outside the loaded candidate set."""


@dataclass(frozen=True)
class AnnotationLabel:
    """One label event; (annotator_id, image_id) keys the current label."""

    annotator_id: str
    image_id: str
    category: int
    ts: str

    def __post_init__(self) -> None:
        if int(self.category) not in VALID_CATEGORIES:
            raise ValueError(f"category must be one of {sorted(VALID_CATEGORIES)}")
        object.__setattr__(self, "category", int(self.category))


def cohen_kappa(pairs: Sequence[tuple[object, object]]) -> float:
    """Chance-corrected agreement between two label vectors.

    kappa = (p_o - p_e) / (1 - p_e) with p_e from the row/column marginals;
    degenerate all-one-agreeing-cell tables (p_e = 1) are defined as 1.
    """
    if not pairs:
        raise ValueError("cohen_kappa needs at least one label pair")
    n = len(pairs)
    p_o = sum(1 for a, b in pairs if a == b) / n
    row = Counter(a for a, _ in pairs)
    col = Counter(b for _, b in pairs)
    p_e = sum(row[c] * col[c] for c in set(row) | set(col)) / (n * n)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


@dataclass(frozen=True)
class ConsensusCounts:
    """Two-annotator agreement tallies over the candidate set."""

    n_candidates: int
    n_doubly_labeled: int
    strict: int
    loose: int

    def __post_init__(self) -> None:
        if not (0 <= self.strict <= self.loose <= self.n_doubly_labeled <= self.n_candidates):
            raise ValueError(
                "consensus counts must satisfy "
                "strict <= loose <= doubly-labeled <= candidates"
            )


def _consensus(
    candidate_ids: Iterable[str],
    labels_by_annotator: Mapping[str, Mapping[str, int]],
) -> tuple[ConsensusCounts, set[str], set[str]]:
    annotators = sorted(labels_by_annotator)
    if len(annotators) > 2:
        raise UnsupportedConfiguration(
            f"consensus is defined for exactly two annotators, got {len(annotators)}"
        )
    ids = list(candidate_ids)
    strict_ids: set[str] = set()
    loose_ids: set[str] = set()
    doubly = 0
    if len(annotators) == 2:
        first = labels_by_annotator[annotators[0]]
        second = labels_by_annotator[annotators[1]]
        for image_id in ids:
            la = first.get(image_id)
            lb = second.get(image_id)
            if la is None or lb is None:
                continue
            doubly += 1
            if la == 1 and lb == 1:
                strict_ids.add(image_id)
            if la in LOOSE_CATEGORIES and lb in LOOSE_CATEGORIES:
                loose_ids.add(image_id)
    counts = ConsensusCounts(
        n_candidates=len(ids),
        n_doubly_labeled=doubly,
        strict=len(strict_ids),
        loose=len(loose_ids),
    )
    return counts, strict_ids, loose_ids


def consensus_counts(
    candidate_ids: Iterable[str],
    labels_by_annotator: Mapping[str, Mapping[str, int]],
) -> ConsensusCounts:
    """Strict (both 1) and loose (both in {1,2}) agreement counts.

    Items lacking a current label from either annotator count only toward
    n_candidates.
    """
    counts, _, _ = _consensus(candidate_ids, labels_by_annotator)
    return counts


def consensus_sets(
    candidate_ids: Iterable[str],
    labels_by_annotator: Mapping[str, Mapping[str, int]],
) -> tuple[set[str], set[str]]:
    """The strict and loose consensus image-id sets."""
    _, strict_ids, loose_ids = _consensus(candidate_ids, labels_by_annotator)
    return strict_ids, loose_ids


def format_percent(rate: Fraction | float) -> str:
    """Render a rate as a percentage with three decimals, half away from zero."""
    frac = rate if isinstance(rate, Fraction) else Fraction(rate)
    milli = math.floor(abs(frac) * 100_000 + HALF)
    sign = "-" if frac < 0 and milli > 0 else ""
    return f"{sign}{milli // 1000}.{milli % 1000:03d}%"


def sum_tweets(image_ids: Iterable[str], tweets_per_account: Mapping[str, int]) -> int:
    """Total tweets of the given accounts (missing accounts count zero)."""
    return sum(int(tweets_per_account.get(image_id, 0)) for image_id in image_ids)


@dataclass(frozen=True)
class PrevalenceReport:
    """Prevalence bounds plus optional extrapolation and tweet shares."""

    n_sample: int
    strict_count: int
    loose_count: int
    lower_rate: Fraction
    upper_rate: Fraction
    kappa: float | None = None
    extrapolation_base: int | None = None
    extrapolated_low: int | None = None
    extrapolated_high: int | None = None
    tweet_lower_rate: Fraction | None = None
    tweet_upper_rate: Fraction | None = None

    def __post_init__(self) -> None:
        if self.lower_rate > self.upper_rate:
            raise ValueError("lower rate cannot exceed upper rate")

    @property
    def lower_percent(self) -> str:
        return format_percent(self.lower_rate)

    @property
    def upper_percent(self) -> str:
        return format_percent(self.upper_rate)

    def to_json_dict(self) -> dict:
        return {
            "n_sample": self.n_sample,
            "strict_count": self.strict_count,
            "loose_count": self.loose_count,
            "lower_rate": float(self.lower_rate),
            "upper_rate": float(self.upper_rate),
            "lower_percent": self.lower_percent,
            "upper_percent": self.upper_percent,
            "kappa": self.kappa,
            "extrapolation_base": self.extrapolation_base,
            "extrapolated_low": self.extrapolated_low,
            "extrapolated_high": self.extrapolated_high,
            "tweet_lower_rate": (
                float(self.tweet_lower_rate) if self.tweet_lower_rate is not None else None
            ),
            "tweet_upper_rate": (
                float(self.tweet_upper_rate) if self.tweet_upper_rate is not None else None
            ),
            "tweet_lower_percent": (
                format_percent(self.tweet_lower_rate)
                if self.tweet_lower_rate is not None
                else None
            ),
            "tweet_upper_percent": (
                format_percent(self.tweet_upper_rate)
                if self.tweet_upper_rate is not None
                else None
            ),
        }


def prevalence_report(
    counts: ConsensusCounts,
    n_sample: int,
    kappa: float | None = None,
    extrapolation_base: int | None = None,
    strict_tweets: int | None = None,
    loose_tweets: int | None = None,
    total_tweets: int | None = None,
) -> PrevalenceReport:
    """Prevalence bounds from consensus counts over a random sample.

    Rates are exact fractions of n_sample; extrapolated counts are floored
    (count * base // n_sample); tweet shares divide the consensus accounts'
    tweet totals by the sample's total tweet count.
    """
    if n_sample <= 0:
        raise ValueError("n_sample must be positive")
    if counts.n_candidates > n_sample:
        raise ValueError("candidate count cannot exceed the sample size")
    lower = Fraction(counts.strict, n_sample)
    upper = Fraction(counts.loose, n_sample)
    extrapolated_low = extrapolated_high = None
    if extrapolation_base is not None:
        if extrapolation_base < 0:
            raise ValueError("extrapolation base must be non-negative")
        extrapolated_low = counts.strict * extrapolation_base // n_sample
        extrapolated_high = counts.loose * extrapolation_base // n_sample
    tweet_lower = tweet_upper = None
    if total_tweets is not None:
        if total_tweets <= 0:
            raise ValueError("total tweet count must be positive")
        if strict_tweets is None or loose_tweets is None:
            raise ValueError("tweet shares need strict and loose tweet sums")
        tweet_lower = Fraction(int(strict_tweets), int(total_tweets))
        tweet_upper = Fraction(int(loose_tweets), int(total_tweets))
    return PrevalenceReport(
        n_sample=n_sample,
        strict_count=counts.strict,
        loose_count=counts.loose,
        lower_rate=lower,
        upper_rate=upper,
        kappa=kappa,
        extrapolation_base=extrapolation_base,
        extrapolated_low=extrapolated_low,
        extrapolated_high=extrapolated_high,
        tweet_lower_rate=tweet_lower,
        tweet_upper_rate=tweet_upper,
    )


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class LabelStore:
    """Durable annotation state over a fixed candidate set.

    Labels append to a JSONL log; replaying the log reproduces the store
    exactly (last write wins per (annotator, image), full history retained).
    All mutations serialize through one lock, so the store is safe under the
    service's concurrent request handling.
    """

    def __init__(
        self,
        candidates: Sequence[ScoreRecord],
        log_path: str | Path,
        n_sample: int | None = None,
        extrapolation_base: int | None = None,
        tweets_per_account: Mapping[str, int] | None = None,
        total_tweets: int | None = None,
        shuffle_seed: int | None = None,
    ) -> None:
        by_id: dict[str, ScoreRecord] = {}
        for record in candidates:
            if record.image_id in by_id:
                raise ValueError(f"duplicate candidate image_id {record.image_id!r}")
            by_id[record.image_id] = record
        self._by_id = by_id
        order = sorted(by_id, key=lambda i: (by_id[i].g, i))
        if shuffle_seed is not None:
            random.Random(shuffle_seed).shuffle(order)
        self._order = order
        self._log_path = Path(log_path)
        self.n_sample = n_sample if n_sample is not None else len(by_id)
        self.extrapolation_base = extrapolation_base
        self._tweets_per_account = dict(tweets_per_account) if tweets_per_account else None
        self._total_tweets = total_tweets
        self._history: list[AnnotationLabel] = []
        self._current: dict[tuple[str, str], AnnotationLabel] = {}
        self._annotators: set[str] = set()
        self._lock = threading.Lock()
        if self._log_path.exists():
            self._replay()

    # -- log handling ------------------------------------------------------

    def _replay(self) -> None:
        with open(self._log_path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    payload = json.loads(line)
                    label = AnnotationLabel(
                        annotator_id=str(payload["annotator"]),
                        image_id=str(payload["image_id"]),
                        category=int(payload["category"]),
                        ts=str(payload["ts"]),
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ValueError(
                        f"corrupt label log {self._log_path} line {line_no}: {exc}"
                    ) from exc
                if label.image_id not in self._by_id:
                    raise ValueError(
                        f"label log {self._log_path} line {line_no} references "
                        f"unknown image {label.image_id!r}; wrong candidate set?"
                    )
                self._apply(label)

    def _apply(self, label: AnnotationLabel) -> None:
        self._history.append(label)
        self._current[(label.annotator_id, label.image_id)] = label
        self._annotators.add(label.annotator_id)

    def _append_to_log(self, label: AnnotationLabel) -> None:
        line = json.dumps(
            {
                "annotator": label.annotator_id,
                "image_id": label.image_id,
                "category": label.category,
                "ts": label.ts,
            },
            separators=(",", ":"),
        )
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()

    # -- queries and mutations ----------------------------------------------

    @property
    def revision(self) -> int:
        return len(self._history)

    @property
    def n_candidates(self) -> int:
        return len(self._by_id)

    def candidate(self, image_id: str) -> ScoreRecord:
        try:
            return self._by_id[image_id]
        except KeyError:
            raise UnknownImageError(image_id) from None

    def register(self, annotator_id: str) -> None:
        with self._lock:
            self._annotators.add(str(annotator_id))

    def submit(
        self, annotator_id: str, image_id: str, category: int, ts: str | None = None
    ) -> int:
        """Record a label; resubmission supersedes.  Returns the store revision."""
        if image_id not in self._by_id:
            raise UnknownImageError(image_id)
        if int(category) not in VALID_CATEGORIES:
            raise ValueError(
                f"category must be one of {sorted(VALID_CATEGORIES)}, got {category!r}"
            )
        label = AnnotationLabel(
            annotator_id=str(annotator_id),
            image_id=image_id,
            category=int(category),
            ts=ts if ts is not None else _utc_now_iso(),
        )
        with self._lock:
            self._append_to_log(label)
            self._apply(label)
            return self.revision

    def current_label(self, annotator_id: str, image_id: str) -> AnnotationLabel | None:
        with self._lock:
            return self._current.get((annotator_id, image_id))

    def next_candidates(self, annotator_id: str, k: int) -> list[ScoreRecord]:
        """Up to k candidates the annotator has not labeled yet, queue order."""
        if k < 0:
            raise ValueError("k must be non-negative")
        annotator_id = str(annotator_id)
        with self._lock:
            self._annotators.add(annotator_id)
            labeled = {
                image_id
                for (annotator, image_id) in self._current
                if annotator == annotator_id
            }
            out = []
            for image_id in self._order:
                if image_id in labeled:
                    continue
                out.append(self._by_id[image_id])
                if len(out) >= k:
                    break
            return out

    def _labels_by_annotator(self) -> dict[str, dict[str, int]]:
        labels: dict[str, dict[str, int]] = {}
        for (annotator, image_id), label in self._current.items():
            labels.setdefault(annotator, {})[image_id] = label.category
        return labels

    def stats(self) -> dict:
        """Live annotation statistics, consistent with the standalone operations.

        Kappa and consensus need exactly two labeling annotators (kappa also
        needs at least two doubly-labeled items); otherwise they come back
        unavailable/zeroed rather than erroring.
        """
        with self._lock:
            labels = self._labels_by_annotator()
            registered = set(self._annotators) | set(labels)
            progress = {
                annotator: {"labeled": len(labels.get(annotator, {})), "total": self.n_candidates}
                for annotator in sorted(registered)
            }
            kappa: float | None = None
            if len(labels) == 2:
                counts, strict_ids, loose_ids = _consensus(self._order, labels)
                first, second = sorted(labels)
                pairs = [
                    (labels[first][image_id], labels[second][image_id])
                    for image_id in self._order
                    if image_id in labels[first] and image_id in labels[second]
                ]
                if len(pairs) >= 2:
                    kappa = cohen_kappa(pairs)
            else:
                counts = ConsensusCounts(
                    n_candidates=self.n_candidates, n_doubly_labeled=0, strict=0, loose=0
                )
                strict_ids, loose_ids = set(), set()
            prevalence = None
            if self.n_sample > 0:
                strict_tweets = loose_tweets = None
                if self._tweets_per_account is not None and self._total_tweets:
                    strict_tweets = sum_tweets(strict_ids, self._tweets_per_account)
                    loose_tweets = sum_tweets(loose_ids, self._tweets_per_account)
                prevalence = prevalence_report(
                    counts,
                    n_sample=self.n_sample,
                    kappa=kappa,
                    extrapolation_base=self.extrapolation_base,
                    strict_tweets=strict_tweets,
                    loose_tweets=loose_tweets,
                    total_tweets=self._total_tweets if strict_tweets is not None else None,
                ).to_json_dict()
            return {
                "revision": self.revision,
                "n_candidates": self.n_candidates,
                "n_doubly_labeled": counts.n_doubly_labeled,
                "annotators": progress,
                "kappa": kappa,
                "consensus": {"strict": counts.strict, "loose": counts.loose},
                "prevalence": prevalence,
            }
