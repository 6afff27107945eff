"""Estimator-style wrapper around calibration and scoring.

`GanEyeScorer` follows the scikit-learn protocol so the metric composes
with the wider ecosystem: ``fit`` learns the reference eye locations from a
GAN landmark corpus, ``transform`` yields a score column, and ``predict``
flags triage candidates below the threshold.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .geometry import (
    DEFAULT_MIN_CALIBRATION_COUNT,
    DEFAULT_THRESHOLD,
    EyeCalibration,
    ScoreRecord,
    calibrate,
    make_score_record,
)
from .landmarks import LandmarkRecord, normalized_eye_summary


def _check_records(X: Iterable) -> list[LandmarkRecord]:
    records = list(X)
    for i, record in enumerate(records):
        if not isinstance(record, LandmarkRecord):
            raise TypeError(
                f"expected LandmarkRecord at position {i}, got {type(record).__name__}"
            )
    return records


class GanEyeScorer(BaseEstimator):
    """Score landmark records by eye distance from a fitted GAN reference.

    Parameters
    ----------
    threshold:
        Operating point for `predict`; scores strictly below it are flagged.
    min_calibration_count:
        Minimum usable single-face reference images for `fit`.
    source:
        Provenance label stored on the fitted calibration.
    """

    def __init__(
        self,
        threshold: float = DEFAULT_THRESHOLD,
        min_calibration_count: int = DEFAULT_MIN_CALIBRATION_COUNT,
        source: str = "reference",
    ) -> None:
        self.threshold = threshold
        self.min_calibration_count = min_calibration_count
        self.source = source

    def fit(self, X: Iterable[LandmarkRecord], y=None) -> "GanEyeScorer":
        """Calibrate reference eye locations from single-face landmark records."""
        records = _check_records(X)
        self.calibration_ = calibrate(
            (normalized_eye_summary(r) for r in records),
            min_count=self.min_calibration_count,
            source=self.source,
        )
        return self

    @classmethod
    def from_calibration(
        cls, calibration: EyeCalibration, threshold: float = DEFAULT_THRESHOLD
    ) -> "GanEyeScorer":
        """Build an already-fitted scorer around an existing calibration."""
        scorer = cls(threshold=threshold)
        scorer.calibration_ = calibration
        return scorer

    def score_records(self, X: Iterable[LandmarkRecord]) -> list[ScoreRecord]:
        """Full per-image scoring results, in input order."""
        check_is_fitted(self, "calibration_")
        out = []
        for record in _check_records(X):
            n_faces, eyes = normalized_eye_summary(record)
            out.append(make_score_record(record.image_id, n_faces, eyes, self.calibration_))
        return out

    def transform(self, X: Iterable[LandmarkRecord]) -> np.ndarray:
        """Score column of shape (n, 1)."""
        return np.array([[r.g] for r in self.score_records(X)], dtype=float).reshape(-1, 1)

    def predict(self, X: Iterable[LandmarkRecord]) -> np.ndarray:
        """Boolean candidate flags: score strictly below the threshold."""
        if not (0.0 < self.threshold <= 1.0):
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        return np.array([r.g < self.threshold for r in self.score_records(X)], dtype=bool)
