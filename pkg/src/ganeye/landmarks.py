"""Landmark ingestion providers.

Three interchangeable sources produce :class:`LandmarkRecord` streams:

* precomputed landmark files (one JSON record per line),
* an external detector subprocess speaking a line protocol on stdin/stdout,
* a built-in marker detector for synthetic corpora (solid pure-red and
  pure-blue disks stand in for eyes).

The line format is
``{"image_id":…,"width":…,"height":…,"detector":…,"faces":[{"left_eye":[[x,y],…],"right_eye":[[x,y],…]},…]}``
with pixel coordinates and a top-left origin.
"""

from __future__ import annotations

import json
import logging
import math
import os
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .geometry import EyePair, PixelPoint, eye_center, normalize_point

logger = logging.getLogger(__name__)

MARKER_RED = (255, 0, 0)
MARKER_BLUE = (0, 0, 255)


class ParseError(ValueError):
    """A landmark line violates the record schema."""


class DetectionError(ValueError):
    """The synthetic marker detector found an inconsistent marker layout."""


class DecodeError(ValueError):
    """An image file could not be decoded."""


class DetectorError(RuntimeError):
    """The external detector subprocess failed (spawn, protocol, or exit)."""


@dataclass(frozen=True)
class FaceLandmarks:
    """Per-eye landmark points of one detected face."""

    left_eye_points: tuple[PixelPoint, ...]
    right_eye_points: tuple[PixelPoint, ...]

    def __post_init__(self) -> None:
        if not self.left_eye_points or not self.right_eye_points:
            raise ValueError("both eye point lists must be non-empty")


@dataclass(frozen=True)
class LandmarkRecord:
    """Detector output for one image: dimensions plus zero or more faces."""

    image_id: str
    width: int
    height: int
    faces: tuple[FaceLandmarks, ...]
    detector: str = ""

    def __post_init__(self) -> None:
        if int(self.width) <= 0 or int(self.height) <= 0:
            raise ValueError(
                f"image dimensions must be positive, got {self.width}x{self.height}"
            )
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))

    @property
    def n_faces(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class FetchManifestEntry:
    """One downloadable image: opaque id plus its HTTP(S) location."""

    image_id: str
    url: str


def normalized_eye_summary(record: LandmarkRecord) -> tuple[int, EyePair | None]:
    """Face count plus normalized eye centers when exactly one face was found."""
    n = record.n_faces
    if n != 1:
        return n, None
    face = record.faces[0]
    left = normalize_point(eye_center(face.left_eye_points), record.width, record.height)
    right = normalize_point(eye_center(face.right_eye_points), record.width, record.height)
    return 1, EyePair(left=left, right=right)


@dataclass(frozen=True)
class DetectionSummary:
    """Corpus-level face-detection tallies."""

    frac_with_faces: float
    frac_exactly_one_among_detected: float | None


def detection_summary(records: Sequence[LandmarkRecord]) -> DetectionSummary:
    """Fraction of records with any face, and of those, with exactly one.

    The second fraction is None when no record has a detected face (0/0).
    """
    if not records:
        raise ValueError("detection_summary needs a non-empty record list")
    with_faces = sum(1 for r in records if r.n_faces >= 1)
    exactly_one = sum(1 for r in records if r.n_faces == 1)
    frac_one = exactly_one / with_faces if with_faces else None
    return DetectionSummary(
        frac_with_faces=with_faces / len(records),
        frac_exactly_one_among_detected=frac_one,
    )


# --- line format -------------------------------------------------------------


def _points_from_json(raw: object, what: str, where: str) -> tuple[PixelPoint, ...]:
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{what} must be a non-empty point list{where}")
    points = []
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ParseError(f"{what} holds a malformed point {item!r}{where}")
        x, y = item
        if not all(math.isfinite(float(v)) for v in (x, y)):
            raise ParseError(f"{what} holds a non-finite point {item!r}{where}")
        points.append(PixelPoint(float(x), float(y)))
    return tuple(points)


def parse_landmark_record(line: str, line_no: int | None = None) -> LandmarkRecord:
    """Parse one serialized landmark record; errors cite the line number."""
    where = f" (line {line_no})" if line_no is not None else ""
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed landmark record{where}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"landmark record must be a JSON object{where}")
    for field in ("image_id", "width", "height", "faces"):
        if field not in payload:
            raise ParseError(f"landmark record missing {field!r}{where}")
    raw_faces = payload["faces"]
    if not isinstance(raw_faces, list):
        raise ParseError(f"'faces' must be a list{where}")
    faces = []
    for face in raw_faces:
        if not isinstance(face, dict) or "left_eye" not in face or "right_eye" not in face:
            raise ParseError(f"face entry missing eye point lists{where}")
        faces.append(
            FaceLandmarks(
                left_eye_points=_points_from_json(face["left_eye"], "left_eye", where),
                right_eye_points=_points_from_json(face["right_eye"], "right_eye", where),
            )
        )
    try:
        return LandmarkRecord(
            image_id=str(payload["image_id"]),
            width=int(payload["width"]),
            height=int(payload["height"]),
            faces=tuple(faces),
            detector=str(payload.get("detector", "")),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid landmark record{where}: {exc}") from exc


def serialize_landmark_record(record: LandmarkRecord) -> str:
    return json.dumps(
        {
            "image_id": record.image_id,
            "width": record.width,
            "height": record.height,
            "detector": record.detector,
            "faces": [
                {
                    "left_eye": [[p.x, p.y] for p in face.left_eye_points],
                    "right_eye": [[p.x, p.y] for p in face.right_eye_points],
                }
                for face in record.faces
            ],
        },
        separators=(",", ":"),
    )


def iter_landmark_file(path: str | Path) -> Iterator[LandmarkRecord]:
    """Stream records from a landmark file without a whole-file duplicate check."""
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                yield parse_landmark_record(line, line_no=line_no)


def load_landmark_file(path: str | Path) -> list[LandmarkRecord]:
    """Load a landmark file, rejecting duplicate image ids."""
    records: list[LandmarkRecord] = []
    seen: dict[str, int] = {}
    duplicates: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = parse_landmark_record(line, line_no=line_no)
            if record.image_id in seen:
                duplicates.append(
                    f"{record.image_id!r} on lines {seen[record.image_id]} and {line_no}"
                )
            else:
                seen[record.image_id] = line_no
            records.append(record)
    if duplicates:
        raise ParseError(f"duplicate image ids in {path}: " + "; ".join(duplicates))
    return records


def write_landmark_file(records: Iterable[LandmarkRecord], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(serialize_landmark_record(record) + "\n")
            count += 1
    return count


# --- synthetic marker detector ------------------------------------------------


def _connected_components(mask: np.ndarray) -> list[tuple[float, float, int]]:
    """4-connected components of a boolean mask.

    Returns (centroid_x, centroid_y, size) per component in scan order.
    Marker blobs cover a few hundred pixels, so a plain BFS is plenty.
    """
    coords = np.argwhere(mask)
    remaining = set(map(tuple, coords.tolist()))
    components: list[tuple[float, float, int]] = []
    for seed in map(tuple, coords.tolist()):
        if seed not in remaining:
            continue
        remaining.discard(seed)
        stack = [seed]
        ys: list[int] = []
        xs: list[int] = []
        while stack:
            i, j = stack.pop()
            ys.append(i)
            xs.append(j)
            for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if (ni, nj) in remaining:
                    remaining.discard((ni, nj))
                    stack.append((ni, nj))
        components.append((sum(xs) / len(xs), sum(ys) / len(ys), len(xs)))
    return components


def detect_synthetic(image: np.ndarray) -> list[FaceLandmarks]:
    """Detect the red/blue eye markers of a synthetic image.

    Each exactly-pure-red component is paired with its nearest pure-blue
    component; the pair member with smaller x becomes the left eye.  The
    emitted landmark list per eye is the single component centroid.
    """
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] < 3:
        raise DecodeError(f"expected an RGB pixel grid, got shape {arr.shape}")
    r, g, b = arr[:, :, 0], arr[:, :, 1], arr[:, :, 2]
    red_mask = (r == 255) & (g == 0) & (b == 0)
    blue_mask = (r == 0) & (g == 0) & (b == 255)
    reds = _connected_components(red_mask)
    blues = _connected_components(blue_mask)
    if len(reds) != len(blues):
        raise DetectionError(
            f"unpaired eye markers: {len(reds)} red vs {len(blues)} blue components"
        )
    faces: list[FaceLandmarks] = []
    unused = list(range(len(blues)))
    for rx, ry, _ in reds:
        best = min(
            unused, key=lambda k: (blues[k][0] - rx) ** 2 + (blues[k][1] - ry) ** 2
        )
        unused.remove(best)
        bx, by, _ = blues[best]
        first, second = (rx, ry), (bx, by)
        if second[0] < first[0]:
            first, second = second, first
        faces.append(
            FaceLandmarks(
                left_eye_points=(PixelPoint(*first),),
                right_eye_points=(PixelPoint(*second),),
            )
        )
    return faces


def scan_marker_image(path: str | Path, image_id: str | None = None) -> LandmarkRecord:
    """Decode an image file and run the marker detector over it."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            arr = np.asarray(rgb)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"cannot decode image {path}: {exc}") from exc
    faces = detect_synthetic(arr)
    height, width = arr.shape[:2]
    return LandmarkRecord(
        image_id=image_id if image_id is not None else path.name,
        width=width,
        height=height,
        faces=tuple(faces),
        detector="synthetic-marker",
    )


# --- external detector adapter -------------------------------------------------


def _probe_dimensions(path: str) -> tuple[int, int]:
    try:
        with Image.open(path) as img:
            return int(img.width), int(img.height)
    except (UnidentifiedImageError, OSError):
        # Placeholder dims; with zero faces the score is pinned to 1 anyway.
        return 1, 1


class _LineReader:
    """Background reader so per-image timeouts cannot block the adapter."""

    def __init__(self, stream) -> None:
        self._queue: queue.Queue[str | None] = queue.Queue()
        self._thread = threading.Thread(target=self._pump, args=(stream,), daemon=True)
        self._thread.start()

    def _pump(self, stream) -> None:
        for line in stream:
            self._queue.put(line)
        self._queue.put(None)

    def readline(self, timeout: float) -> str | None:
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            raise TimeoutError


def _spawn(command: Sequence[str]) -> subprocess.Popen:
    try:
        return subprocess.Popen(
            list(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            bufsize=1,
        )
    except OSError as exc:
        raise DetectorError(f"cannot spawn detector {command!r}: {exc}") from exc


def run_external_detector(
    command: Sequence[str] | str,
    image_paths: Sequence[str | Path],
    timeout: float = 30.0,
) -> list[LandmarkRecord]:
    """Drive an external landmark detector over a batch of images.

    Protocol: one absolute image path per line on the detector's stdin; the
    detector answers with exactly one landmark-record line per input, in
    order, and exits 0 when its input closes.  A per-image timeout degrades
    that image to a zero-face record tagged "timeout" (the detector is
    restarted for the remainder); malformed output or a nonzero exit is a
    hard error.
    """
    if isinstance(command, str):
        command = shlex.split(command)
    paths = [os.path.abspath(os.fspath(p)) for p in image_paths]
    records: list[LandmarkRecord] = []
    index = 0
    while index < len(paths):
        proc = _spawn(command)
        assert proc.stdin is not None and proc.stdout is not None
        reader = _LineReader(proc.stdout)
        restart = False
        failure: DetectorError | None = None
        while index < len(paths):
            path = paths[index]
            try:
                proc.stdin.write(path + "\n")
                proc.stdin.flush()
            except OSError as exc:
                failure = DetectorError(f"detector pipe failed on {path}: {exc}")
                break
            try:
                line = reader.readline(timeout=timeout)
            except TimeoutError:
                logger.warning(
                    "detector timed out after %.1fs on %s; recording zero faces",
                    timeout,
                    path,
                )
                width, height = _probe_dimensions(path)
                records.append(
                    LandmarkRecord(
                        image_id=path,
                        width=width,
                        height=height,
                        faces=(),
                        detector="timeout",
                    )
                )
                index += 1
                restart = True
                break
            if line is None:
                failure = DetectorError(f"detector closed its output before answering {path}")
                break
            try:
                record = parse_landmark_record(line)
            except ParseError as exc:
                failure = DetectorError(
                    f"detector emitted an unparseable line for {path}: {line!r} ({exc})"
                )
                failure.__cause__ = exc
                break
            records.append(record)
            index += 1
        if failure is not None:
            proc.kill()
            proc.wait()
            raise failure
        if restart:
            # A hung detector would stall the serialized protocol; start fresh
            # for the remaining inputs.
            proc.kill()
            proc.wait()
            continue
        try:
            proc.stdin.close()
        except OSError:
            pass
        returncode = proc.wait()
        if returncode != 0:
            raise DetectorError(f"detector exited with status {returncode}")
    return records
