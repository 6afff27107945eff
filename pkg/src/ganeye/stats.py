"""Descriptive statistics, two-sample KS testing, histograms, and KDE.

Backs the corpus-level analytics: account-profile summaries, distribution
comparisons between account groups, and the density grids used to inspect
eye-location concentration and score distributions.  Outputs are plain grid
or count data for external plotting; nothing here renders images.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geometry import NormPoint

#: Series terms below this magnitude stop the asymptotic KS tail sum.
KS_SERIES_EPS = 1e-12


@dataclass(frozen=True)
class DescribeResult:
    """Sample size, mean, and sample standard deviation (None when n = 1)."""

    n: int
    mean: float
    sd: float | None


def describe(values: Sequence[float]) -> DescribeResult:
    vals = [float(v) for v in values]
    n = len(vals)
    if n == 0:
        raise ValueError("describe needs at least one value")
    mean = math.fsum(vals) / n
    if n == 1:
        return DescribeResult(n=1, mean=mean, sd=None)
    ss = math.fsum((v - mean) ** 2 for v in vals)
    return DescribeResult(n=n, mean=mean, sd=math.sqrt(ss / (n - 1)))


@dataclass(frozen=True)
class AccountStats:
    """Profile-level activity counters of one account."""

    followers: int
    friends: int
    tweets: int
    created_year: int

    def __post_init__(self) -> None:
        for name in ("followers", "friends", "tweets"):
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{name} must be non-negative")
        year = int(self.created_year)
        current = datetime.now(timezone.utc).year
        if not (2006 <= year <= current):
            raise ValueError(f"created_year {year} outside [2006, {current}]")


def read_account_stats(path: str | Path) -> list[AccountStats]:
    """Load account stats from a JSONL file with the AccountStats field names."""
    accounts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                accounts.append(
                    AccountStats(
                        followers=int(payload["followers"]),
                        friends=int(payload["friends"]),
                        tweets=int(payload["tweets"]),
                        created_year=int(payload["created_year"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"bad account record on line {line_no}: {exc}") from exc
    return accounts


# --- Kolmogorov-Smirnov ------------------------------------------------------


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """Exact two-sample KS statistic over the merged sorted support."""
    a_arr = np.sort(np.asarray(a, dtype=float).ravel())
    b_arr = np.sort(np.asarray(b, dtype=float).ravel())
    if a_arr.size == 0 or b_arr.size == 0:
        raise ValueError("both samples must be non-empty")
    support = np.concatenate([a_arr, b_arr])
    cdf_a = np.searchsorted(a_arr, support, side="right") / a_arr.size
    cdf_b = np.searchsorted(b_arr, support, side="right") / b_arr.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_pvalue(d: float, n: int, m: int) -> float:
    """Asymptotic two-sided KS p-value.

    p = 2 * sum_{k>=1} (-1)^(k-1) * exp(-2 k^2 lambda^2) with
    lambda = d * sqrt(n*m/(n+m)); the alternating series is truncated once a
    term drops below 1e-12, and the result is clamped into [0, 1].
    """
    if not (0.0 <= d <= 1.0):
        raise ValueError(f"KS statistic must be in [0, 1], got {d}")
    if n < 1 or m < 1:
        raise ValueError("sample sizes must be at least 1")
    lam = d * math.sqrt(n * m / (n + m))
    # Below this the tail sum is 1 to far beyond double precision, and the
    # term-size cutoff would need millions of iterations to trigger.
    if lam < 1e-3:
        return 1.0
    total = 0.0
    k = 1
    sign = 1.0
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        if term < KS_SERIES_EPS:
            break
        total += sign * term
        sign = -sign
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


# --- histograms ----------------------------------------------------------------


@dataclass(frozen=True)
class HistogramResult:
    """Counts per bin plus the tally of values outside every bin."""

    edges: tuple[float, ...]
    counts: tuple[int, ...]
    overflow: int


def histogram(values: Sequence[float], bin_edges: Sequence[float]) -> HistogramResult:
    """Half-open bins [e_i, e_{i+1}); the final bin also includes its right edge."""
    edges = np.asarray(bin_edges, dtype=float)
    if edges.size < 2 or not np.all(np.diff(edges) > 0):
        raise ValueError("bin edges must be at least two strictly increasing values")
    vals = np.asarray(values, dtype=float).ravel()
    counts, _ = np.histogram(vals, bins=edges)
    overflow = int(vals.size - counts.sum())
    return HistogramResult(
        edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        overflow=overflow,
    )


# --- kernel density estimation --------------------------------------------------


@dataclass(frozen=True)
class DensityGrid:
    """Gaussian-KDE densities evaluated on a 1-D grid or a 2-D lattice.

    For two axes, ``values[i, j]`` is the density at ``(axes[0][i], axes[1][j])``.
    """

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    bandwidths: tuple[float, ...]
    n: int

    def __post_init__(self) -> None:
        for axis in self.axes:
            if axis.size < 1 or (axis.size > 1 and not np.all(np.diff(axis) > 0)):
                raise ValueError("grid axes must be strictly increasing")
        expected = tuple(axis.size for axis in self.axes)
        if self.values.shape != expected:
            raise ValueError(f"value shape {self.values.shape} != grid shape {expected}")
        if np.any(self.values < 0):
            raise ValueError("densities must be non-negative")
        for h in self.bandwidths:
            if h <= 0:
                raise ValueError("bandwidths must be positive")


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * n^(-1/5); needs at least two spread-out values."""
    values = np.asarray(values, dtype=float).ravel()
    n = values.size
    if n < 2:
        raise ValueError("automatic bandwidth needs at least two values")
    sd = float(values.std(ddof=1))
    q75, q25 = np.percentile(values, [75, 25])
    scale = min(sd, (q75 - q25) / 1.34)
    h = 0.9 * scale * n ** (-0.2)
    if h <= 0:
        raise ValueError("data has zero spread; pass an explicit bandwidth")
    return h


def scott_bandwidths(points: np.ndarray) -> tuple[float, float]:
    """Per-axis sd * n^(-1/6); needs nonzero spread on both axes."""
    n = points.shape[0]
    if n < 2:
        raise ValueError("automatic bandwidths need at least two points")
    hs = []
    for axis in range(2):
        sd = float(points[:, axis].std(ddof=1))
        h = sd * n ** (-1.0 / 6.0)
        if h <= 0:
            raise ValueError(
                "points are degenerate along one axis; pass explicit bandwidths"
            )
        hs.append(h)
    return hs[0], hs[1]


def kde_1d(
    values: Sequence[float],
    grid: Sequence[float],
    bandwidth: float | None = None,
) -> DensityGrid:
    """Gaussian KDE on a grid: density(t) = (1/(n h)) * sum phi((t - x_i)/h)."""
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise ValueError("kde_1d needs at least one value")
    grid_arr = np.asarray(grid, dtype=float).ravel()
    h = silverman_bandwidth(vals) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    z = (grid_arr[:, None] - vals[None, :]) / h
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (vals.size * h * math.sqrt(2.0 * math.pi))
    return DensityGrid(axes=(grid_arr,), values=dens, bandwidths=(h,), n=int(vals.size))


def _as_point_array(points) -> np.ndarray:
    seq = list(points) if not isinstance(points, np.ndarray) else points
    if isinstance(seq, list) and seq and isinstance(seq[0], NormPoint):
        arr = np.array([[p.x, p.y] for p in seq], dtype=float)
    else:
        arr = np.asarray(seq, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array or a list of NormPoint")
    return arr


def kde_2d(
    points,
    grid_x: Sequence[float],
    grid_y: Sequence[float],
    bandwidths: tuple[float, float] | None = None,
) -> DensityGrid:
    """Product-Gaussian KDE over a 2-D lattice (values indexed [x, y])."""
    arr = _as_point_array(points)
    if arr.shape[0] == 0:
        raise ValueError("kde_2d needs at least one point")
    gx = np.asarray(grid_x, dtype=float).ravel()
    gy = np.asarray(grid_y, dtype=float).ravel()
    if bandwidths is None:
        hx, hy = scott_bandwidths(arr)
    else:
        hx, hy = float(bandwidths[0]), float(bandwidths[1])
    if hx <= 0 or hy <= 0:
        raise ValueError("bandwidths must be positive")
    ax = np.exp(-0.5 * ((gx[:, None] - arr[None, :, 0]) / hx) ** 2)
    ay = np.exp(-0.5 * ((gy[:, None] - arr[None, :, 1]) / hy) ** 2)
    values = (ax @ ay.T) / (arr.shape[0] * 2.0 * math.pi * hx * hy)
    return DensityGrid(
        axes=(gx, gy), values=values, bandwidths=(hx, hy), n=int(arr.shape[0])
    )


# --- grid/count data emission ----------------------------------------------------


def write_density_csv(
    grid: DensityGrid, csv_path: str | Path, sidecar_path: str | Path | None = None
) -> None:
    """CSV with coordinate column(s) then the density, plus a JSON sidecar."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if len(grid.axes) == 1:
            writer.writerow(["x", "density"])
            for x, v in zip(grid.axes[0], grid.values):
                writer.writerow([repr(float(x)), repr(float(v))])
        else:
            writer.writerow(["x", "y", "density"])
            gx, gy = grid.axes
            for i, x in enumerate(gx):
                for j, y in enumerate(gy):
                    writer.writerow(
                        [repr(float(x)), repr(float(y)), repr(float(grid.values[i, j]))]
                    )
    sidecar = {
        "bandwidth": grid.bandwidths[0] if len(grid.bandwidths) == 1 else list(grid.bandwidths),
        "n": grid.n,
    }
    if sidecar_path is None:
        sidecar_path = csv_path.with_suffix(".json")
    Path(sidecar_path).write_text(json.dumps(sidecar) + "\n", encoding="utf-8")


def write_histogram_csv(
    result: HistogramResult, csv_path: str | Path, sidecar_path: str | Path | None = None
) -> None:
    csv_path = Path(csv_path)
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "count"])
        for left, right, count in zip(result.edges, result.edges[1:], result.counts):
            writer.writerow([repr(left), repr(right), count])
    sidecar = {"n": sum(result.counts) + result.overflow, "overflow": result.overflow}
    if sidecar_path is None:
        sidecar_path = csv_path.with_suffix(".json")
    Path(sidecar_path).write_text(json.dumps(sidecar) + "\n", encoding="utf-8")
