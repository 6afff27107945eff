"""Eye-placement geometry and the GAN eye-distance score.

GAN face generators put the eyes of every synthesized face in nearly the
same spot.  This module turns detector landmarks into normalized eye
centers, learns the reference ("calibration") eye locations from a known
GAN corpus, and scores unseen images by how far their eyes sit from that
reference.  The score is

    g = (dist(left, left_ref) + dist(right, right_ref)) / (2 * sqrt(2))

for an image with exactly one detected face, and g = 1 otherwise (no face,
several faces, or an image the detector could not process).  Distances are
Euclidean in the unit square, so g is always in [0, 1].

Everything here is a pure function over frozen inputs and safe to run in
parallel over disjoint records.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

logger = logging.getLogger(__name__)

#: Largest possible summed distance of two eye pairs inside the unit square.
MAX_SUMMED_DISTANCE = 2.0 * math.sqrt(2.0)

#: Default operating threshold: scores strictly below it become triage candidates.
DEFAULT_THRESHOLD = 0.02

#: Default minimum number of usable reference images for a calibration.
DEFAULT_MIN_CALIBRATION_COUNT = 10


class ContractViolation(ValueError):
    """Face count and eye payload disagree (eyes must be present iff one face)."""


class CalibrationError(ValueError):
    """Too few usable reference records to produce a calibration."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PixelPoint:
    """A point in pixel coordinates, origin at the top-left, y growing downward.

    Coordinates may be fractional: centroids of integer landmark points are
    pixel points too.
    """

    x: float
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _require_finite("x", self.x))
        object.__setattr__(self, "y", _require_finite("y", self.y))


@dataclass(frozen=True)
class NormPoint:
    """A point normalized by image width/height; both components in [0, 1]."""

    x: float
    y: float

    def __post_init__(self) -> None:
        x = _require_finite("x", self.x)
        y = _require_finite("y", self.y)
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise ValueError(f"normalized point ({x}, {y}) outside the unit square")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def distance_to(self, other: "NormPoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class EyePair:
    """Normalized centers of the left and right eye of a single face."""

    left: NormPoint
    right: NormPoint


@dataclass(frozen=True)
class EyeCalibration:
    """Reference eye locations: per-eye means over a GAN reference corpus."""

    left: NormPoint
    right: NormPoint
    n_images: int
    source: str = ""

    def __post_init__(self) -> None:
        if int(self.n_images) < 1:
            raise ValueError("calibration must be backed by at least one image")
        object.__setattr__(self, "n_images", int(self.n_images))


@dataclass(frozen=True)
class ScoreRecord:
    """Per-image scoring result.

    ``eyes`` is present exactly when one face was detected; in every other
    case the score is pinned to 1.
    """

    image_id: str
    n_faces: int
    eyes: EyePair | None
    g: float

    def __post_init__(self) -> None:
        n_faces = int(self.n_faces)
        if n_faces < 0:
            raise ValueError("n_faces must be non-negative")
        object.__setattr__(self, "n_faces", n_faces)
        g = _require_finite("g", self.g)
        if not (0.0 <= g <= 1.0):
            raise ValueError(f"score {g} outside [0, 1]")
        object.__setattr__(self, "g", g)
        if n_faces == 1:
            if self.eyes is None:
                raise ContractViolation("record with one face must carry eye centers")
        else:
            if self.eyes is not None:
                raise ContractViolation("record without exactly one face must not carry eyes")
            if g != 1.0:
                raise ValueError("score must be 1 when the face count is not exactly one")


def eye_center(points: Sequence[PixelPoint]) -> PixelPoint:
    """Mean of the per-eye landmark points; the detector-agnostic eye center."""
    if not points:
        raise ValueError("eye_center needs at least one landmark point")
    n = len(points)
    return PixelPoint(
        math.fsum(p.x for p in points) / n,
        math.fsum(p.y for p in points) / n,
    )


def normalize_point(p: PixelPoint, width: float, height: float) -> NormPoint:
    """Divide by the image dimensions and clamp into the unit square.

    Detectors occasionally report landmarks slightly outside the frame;
    clamping preserves the [0, 1] guarantee of the score.
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"image dimensions must be positive, got {width}x{height}")
    return NormPoint(
        min(1.0, max(0.0, p.x / width)),
        min(1.0, max(0.0, p.y / height)),
    )


def gan_eye_distance(n_faces: int, eyes: EyePair | None, cal: EyeCalibration) -> float:
    """Distance score of detected eyes from the calibration, in [0, 1].

    Exactly one face: mean of the two per-eye Euclidean distances, scaled by
    1/(2*sqrt(2)) so the result cannot exceed 1.  Any other face count
    (including failed detection) scores 1.
    """
    if n_faces < 0:
        raise ValueError("n_faces must be non-negative")
    if n_faces != 1:
        if eyes is not None:
            raise ContractViolation(
                f"eye centers supplied for a record with {n_faces} faces"
            )
        return 1.0
    if eyes is None:
        raise ContractViolation("record with one face is missing its eye centers")
    summed = eyes.left.distance_to(cal.left) + eyes.right.distance_to(cal.right)
    return summed / MAX_SUMMED_DISTANCE


def make_score_record(
    image_id: str, n_faces: int, eyes: EyePair | None, cal: EyeCalibration
) -> ScoreRecord:
    """Score one summarized image against the calibration."""
    g = gan_eye_distance(n_faces, eyes, cal)
    return ScoreRecord(image_id=image_id, n_faces=n_faces, eyes=eyes, g=g)


def calibrate(
    summaries: Iterable[tuple[int, EyePair | None]],
    min_count: int = DEFAULT_MIN_CALIBRATION_COUNT,
    source: str = "reference",
) -> EyeCalibration:
    """Average normalized eye centers over single-face reference records.

    Records with zero or multiple faces are skipped (with a warning tally);
    the remaining per-eye means become the ground-truth eye locations.
    """
    usable: list[EyePair] = []
    skipped = 0
    for n_faces, eyes in summaries:
        if n_faces == 1:
            if eyes is None:
                raise ContractViolation("summary with one face is missing eye centers")
            usable.append(eyes)
        else:
            if eyes is not None:
                raise ContractViolation(
                    f"summary with {n_faces} faces must not carry eye centers"
                )
            skipped += 1
    if skipped:
        logger.warning(
            "calibration skipped %d reference records without exactly one face", skipped
        )
    n = len(usable)
    if n < min_count:
        raise CalibrationError(
            f"calibration needs at least {min_count} usable reference records, got {n}"
        )
    left = NormPoint(
        math.fsum(e.left.x for e in usable) / n,
        math.fsum(e.left.y for e in usable) / n,
    )
    right = NormPoint(
        math.fsum(e.right.x for e in usable) / n,
        math.fsum(e.right.y for e in usable) / n,
    )
    return EyeCalibration(left=left, right=right, n_images=n, source=source)


def filter_candidates(
    scores: Iterable[ScoreRecord], threshold: float = DEFAULT_THRESHOLD
) -> list[ScoreRecord]:
    """Records with g strictly below the threshold, ascending g, ties by id."""
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    kept = [r for r in scores if r.g < threshold]
    kept.sort(key=lambda r: (r.g, r.image_id))
    return kept


def recall_at(scores: Sequence[ScoreRecord], threshold: float) -> float:
    """Fraction of (known-positive) records scoring strictly below the threshold."""
    if not scores:
        raise ValueError("recall_at needs a non-empty score list")
    hits = sum(1 for r in scores if r.g < threshold)
    return hits / len(scores)


# --- serialization ----------------------------------------------------------
#
# Calibration file: one JSON object.
# Score records: one JSON object per line; floats keep full round-trip precision.


def calibration_to_json(cal: EyeCalibration) -> str:
    return json.dumps(
        {
            "left": [cal.left.x, cal.left.y],
            "right": [cal.right.x, cal.right.y],
            "n_images": cal.n_images,
            "source": cal.source,
        }
    )


def write_calibration(cal: EyeCalibration, path: str | Path) -> None:
    Path(path).write_text(calibration_to_json(cal) + "\n", encoding="utf-8")


def read_calibration(path: str | Path) -> EyeCalibration:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"calibration file {path} is not valid JSON: {exc}") from exc
    try:
        return EyeCalibration(
            left=NormPoint(*map(float, payload["left"])),
            right=NormPoint(*map(float, payload["right"])),
            n_images=int(payload["n_images"]),
            source=str(payload.get("source", "")),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"calibration file {path} is missing fields: {exc}") from exc


def score_record_to_json(record: ScoreRecord) -> str:
    eyes = record.eyes
    return json.dumps(
        {
            "image_id": record.image_id,
            "n_faces": record.n_faces,
            "g": record.g,
            "left": [eyes.left.x, eyes.left.y] if eyes is not None else None,
            "right": [eyes.right.x, eyes.right.y] if eyes is not None else None,
        },
        separators=(",", ":"),
    )


def parse_score_record(line: str, line_no: int | None = None) -> ScoreRecord:
    where = f" (line {line_no})" if line_no is not None else ""
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed score record{where}: {exc}") from exc
    try:
        left = payload["left"]
        right = payload["right"]
        eyes = None
        if left is not None or right is not None:
            if left is None or right is None:
                raise ValueError(f"score record{where} has only one eye")
            eyes = EyePair(
                left=NormPoint(*map(float, left)), right=NormPoint(*map(float, right))
            )
        return ScoreRecord(
            image_id=str(payload["image_id"]),
            n_faces=int(payload["n_faces"]),
            eyes=eyes,
            g=float(payload["g"]),
        )
    except KeyError as exc:
        raise ValueError(f"score record{where} is missing field {exc}") from exc


def write_score_file(records: Iterable[ScoreRecord], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(score_record_to_json(record) + "\n")
            count += 1
    return count


def iter_score_file(path: str | Path) -> Iterator[ScoreRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                yield parse_score_record(line, line_no=line_no)


def read_score_file(path: str | Path) -> list[ScoreRecord]:
    return list(iter_score_file(path))


def with_threshold_sort_key(record: ScoreRecord) -> tuple[float, str]:
    """Deterministic candidate ordering: ascending g, ties by image id."""
    return (record.g, record.image_id)


def rescore(record: ScoreRecord, cal: EyeCalibration) -> ScoreRecord:
    """Recompute g for a record against a different calibration."""
    return replace(record, g=gan_eye_distance(record.n_faces, record.eyes, cal))
