"""Synthetic labeled profile-image corpora with controlled eye placement.

Real GAN corpora concentrate both eyes at fixed locations while organic
profile pictures scatter them; this generator reproduces that contrast with
pure-color disk markers (red = left eye, blue = right eye) so the whole
pipeline can be exercised end to end without any neural face detector.

Four classes:

* ``gan_like``   one marker pair at the canonical locations plus Gaussian jitter
* ``human_like`` one pair at a random location with random inter-eye spacing
* ``no_face``    background only
* ``multi_face`` two pairs in disjoint (top/bottom) halves

Generation is deterministic: every image draws from an rng seeded by
(corpus seed, class, index), so corpora are reproducible pixel-exact and
images may be produced in any order or in parallel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np
from PIL import Image

from .geometry import NormPoint
from .landmarks import MARKER_BLUE, MARKER_RED

CLASSES = ("gan_like", "human_like", "no_face", "multi_face")

DEFAULT_CANONICAL_LEFT = NormPoint(0.38, 0.45)
DEFAULT_CANONICAL_RIGHT = NormPoint(0.62, 0.45)

#: Attempts to place markers before giving up on an image.
MAX_PLACEMENT_ATTEMPTS = 100

MANIFEST_NAME = "manifest.jsonl"


class GenerationError(ValueError):
    """Marker placement failed (markers would overlap or leave the frame)."""


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one corpus; see the module docstring for class semantics."""

    image_size: int = 256
    canonical_left: NormPoint = DEFAULT_CANONICAL_LEFT
    canonical_right: NormPoint = DEFAULT_CANONICAL_RIGHT
    jitter_sigma: float = 0.002
    counts: Mapping[str, int] = field(default_factory=dict)
    seed: int = 0
    eye_radius: int = 5

    def __post_init__(self) -> None:
        if self.image_size < 32:
            raise ValueError("image_size must be at least 32 pixels")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be non-negative")
        if self.eye_radius < 3:
            raise ValueError("eye_radius must be at least 3 pixels")
        counts = dict(self.counts)
        for cls, count in counts.items():
            if cls not in CLASSES:
                raise ValueError(f"unknown corpus class {cls!r}")
            if int(count) < 0:
                raise ValueError(f"count for {cls!r} must be non-negative")
            counts[cls] = int(count)
        object.__setattr__(self, "counts", counts)

    def to_json(self) -> str:
        return json.dumps(
            {
                "image_size": self.image_size,
                "canonical_left": [self.canonical_left.x, self.canonical_left.y],
                "canonical_right": [self.canonical_right.x, self.canonical_right.y],
                "jitter_sigma": self.jitter_sigma,
                "counts": dict(self.counts),
                "seed": self.seed,
                "eye_radius": self.eye_radius,
            },
            indent=2,
        )


def spec_from_json(text: str) -> SyntheticSpec:
    payload = json.loads(text)
    kwargs: dict = {}
    if "image_size" in payload:
        kwargs["image_size"] = int(payload["image_size"])
    if "canonical_left" in payload:
        kwargs["canonical_left"] = NormPoint(*map(float, payload["canonical_left"]))
    if "canonical_right" in payload:
        kwargs["canonical_right"] = NormPoint(*map(float, payload["canonical_right"]))
    if "jitter_sigma" in payload:
        kwargs["jitter_sigma"] = float(payload["jitter_sigma"])
    if "counts" in payload:
        kwargs["counts"] = {str(k): int(v) for k, v in payload["counts"].items()}
    if "seed" in payload:
        kwargs["seed"] = int(payload["seed"])
    if "eye_radius" in payload:
        kwargs["eye_radius"] = int(payload["eye_radius"])
    return SyntheticSpec(**kwargs)


def read_spec(path: str | Path) -> SyntheticSpec:
    return spec_from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class CorpusManifestEntry:
    """Ground truth for one generated image."""

    image_id: str
    class_label: str
    path: str
    eyes: tuple[tuple[float, float], ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "image_id": self.image_id,
                "class": self.class_label,
                "path": self.path,
                "eyes": [[x, y] for x, y in self.eyes],
            },
            separators=(",", ":"),
        )


def _entry_from_json(line: str) -> CorpusManifestEntry:
    payload = json.loads(line)
    return CorpusManifestEntry(
        image_id=str(payload["image_id"]),
        class_label=str(payload["class"]),
        path=str(payload["path"]),
        eyes=tuple((float(x), float(y)) for x, y in payload["eyes"]),
    )


def read_corpus_manifest(path: str | Path) -> list[CorpusManifestEntry]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                entries.append(_entry_from_json(line))
    return entries


def _draw_disk(arr: np.ndarray, cx: float, cy: float, radius: int, color) -> None:
    size = arr.shape[0]
    x0 = max(0, int(math.floor(cx - radius)))
    x1 = min(size - 1, int(math.ceil(cx + radius)))
    y0 = max(0, int(math.floor(cy - radius)))
    y1 = min(size - 1, int(math.ceil(cy + radius)))
    yy, xx = np.ogrid[y0 : y1 + 1, x0 : x1 + 1]
    mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius**2
    arr[y0 : y1 + 1, x0 : x1 + 1][mask] = color


def _in_frame(cx: float, cy: float, radius: int, size: int) -> bool:
    return radius <= cx <= size - 1 - radius and radius <= cy <= size - 1 - radius


def _placement_ok(centers: list[tuple[float, float]], radius: int, size: int) -> bool:
    for cx, cy in centers:
        if not _in_frame(cx, cy, radius, size):
            return False
    # Two pixels of slack so distinct markers never touch after rasterization.
    min_gap = 2 * radius + 2
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            dx = centers[i][0] - centers[j][0]
            dy = centers[i][1] - centers[j][1]
            if dx * dx + dy * dy < min_gap * min_gap:
                return False
    return True


def _place(sample, radius: int, size: int, what: str) -> list[tuple[float, float]]:
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        centers = sample()
        if _placement_ok(centers, radius, size):
            return centers
    raise GenerationError(
        f"could not place {what} markers inside a {size}px frame "
        f"after {MAX_PLACEMENT_ATTEMPTS} attempts"
    )


def _background(rng: np.random.Generator, size: int) -> np.ndarray:
    # Channels stay clear of 0/255 so the flat color can never collide with
    # the exact marker colors.
    color = rng.integers(16, 240, size=3, dtype=np.uint8)
    arr = np.empty((size, size, 3), dtype=np.uint8)
    arr[:, :] = color
    return arr


def generate_image(
    class_label: str, spec: SyntheticSpec, rng: np.random.Generator
) -> tuple[np.ndarray, list[tuple[float, float]]]:
    """Render one image; returns the pixel grid and the planted eye centers.

    Centers are returned exactly as drawn (fractional pixel coordinates),
    face by face, left eye before right eye.
    """
    if class_label not in CLASSES:
        raise ValueError(f"unknown corpus class {class_label!r}")
    size = spec.image_size
    radius = spec.eye_radius
    arr = _background(rng, size)

    pairs: list[tuple[tuple[float, float], tuple[float, float]]] = []
    if class_label == "gan_like":

        def sample_gan() -> list[tuple[float, float]]:
            jitter = rng.normal(0.0, spec.jitter_sigma, size=4)
            lx = (spec.canonical_left.x + jitter[0]) * size
            ly = (spec.canonical_left.y + jitter[1]) * size
            rx = (spec.canonical_right.x + jitter[2]) * size
            ry = (spec.canonical_right.y + jitter[3]) * size
            return [(lx, ly), (rx, ry)]

        left, right = _place(sample_gan, radius, size, "gan_like")
        pairs.append((left, right))
    elif class_label == "human_like":

        def sample_human() -> list[tuple[float, float]]:
            mx = rng.uniform(0.1, 0.9) * size
            my = rng.uniform(0.1, 0.9) * size
            spacing = rng.uniform(0.15, 0.45) * size
            return [(mx - spacing / 2, my), (mx + spacing / 2, my)]

        left, right = _place(sample_human, radius, size, "human_like")
        pairs.append((left, right))
    elif class_label == "multi_face":
        for band_y in (0.25 * size, 0.75 * size):

            def sample_band(y: float = band_y) -> list[tuple[float, float]]:
                mx = rng.uniform(0.3, 0.7) * size
                spacing = rng.uniform(0.15, 0.45) * size
                return [(mx - spacing / 2, y), (mx + spacing / 2, y)]

            left, right = _place(sample_band, radius, size, "multi_face")
            pairs.append((left, right))

    centers: list[tuple[float, float]] = []
    for left, right in pairs:
        _draw_disk(arr, left[0], left[1], radius, MARKER_RED)
        _draw_disk(arr, right[0], right[1], radius, MARKER_BLUE)
        centers.extend([left, right])
    return arr, centers


def _image_rng(spec: SyntheticSpec, class_label: str, index: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, CLASSES.index(class_label), index])


def generate_corpus(spec: SyntheticSpec, out_dir: str | Path) -> list[CorpusManifestEntry]:
    """Write the corpus PNGs plus a manifest; fully deterministic per seed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries: list[CorpusManifestEntry] = []
    for class_label in CLASSES:
        count = spec.counts.get(class_label, 0)
        for index in range(count):
            rng = _image_rng(spec, class_label, index)
            try:
                arr, centers = generate_image(class_label, spec, rng)
            except GenerationError as exc:
                raise GenerationError(f"{class_label}_{index:05d}: {exc}") from exc
            image_id = f"{class_label}_{index:05d}"
            filename = f"{image_id}.png"
            # compress_level trades size for speed; PNG stays lossless either way.
            Image.fromarray(arr).save(out_dir / filename, compress_level=1)
            entries.append(
                CorpusManifestEntry(
                    image_id=image_id,
                    class_label=class_label,
                    path=filename,
                    eyes=tuple((x, y) for x, y in centers),
                )
            )
    with open(out_dir / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(entry.to_json() + "\n")
    return entries
