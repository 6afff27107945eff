"""Command-line pipeline orchestrator.

Subcommands hand off through files so long runs can be resumed stage by
stage: synth -> detect -> calibrate -> score -> filter -> serve, plus
fetch/stats/report utilities.  Diagnostics go to stderr; data goes to the
declared output files (or stdout in the explicit streaming mode of
score/filter).

Exit codes: 0 success; 1 input or contract errors; 2 I/O or subprocess
failures.  Verbosity is controlled by the GPT_LOG_LEVEL environment
variable (error|warn|info|debug).
"""

from __future__ import annotations

import csv
import json
import logging
import os
import sys
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, Iterator

import click
import numpy as np

from . import annotation, fetch as fetch_mod, geometry, landmarks, stats as stats_mod, synthetic

logger = logging.getLogger(__name__)

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

IMAGE_GLOBS = ("*.png", "*.jpg", "*.jpeg")


def _configure_logging() -> None:
    level_name = os.environ.get("GPT_LOG_LEVEL", "warn").lower()
    level = _LOG_LEVELS.get(level_name, logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def _validate_threshold(ctx, param, value):
    if value is not None and not (0.0 < value <= 1.0):
        raise click.BadParameter("must be in (0, 1]")
    return value


def _image_paths(images_dir: Path) -> list[Path]:
    paths: list[Path] = []
    for pattern in IMAGE_GLOBS:
        paths.extend(images_dir.glob(pattern))
    return sorted(set(paths))


@click.group()
def cli() -> None:
    """Flag GAN-typical eye placement in profile pictures and triage the hits."""


# --- corpus generation ---------------------------------------------------------


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def synth(spec_path: str, out_dir: str) -> None:
    """Generate a synthetic marker corpus plus its ground-truth manifest."""
    spec = synthetic.read_spec(spec_path)
    entries = synthetic.generate_corpus(spec, out_dir)
    click.echo(f"wrote {len(entries)} images to {out_dir}", err=True)


# --- landmark ingestion ----------------------------------------------------------


@cli.command()
@click.option("--provider", required=True, type=click.Choice(["file", "exec", "synthetic"]))
@click.option("--command", "command", default=None, help="Detector command (exec provider).")
@click.option(
    "--landmarks-file",
    "landmarks_file",
    default=None,
    type=click.Path(exists=True, dir_okay=False),
    help="Precomputed landmark file (file provider).",
)
@click.option("--images", "images_dir", default=None, type=click.Path(file_okay=False, exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--timeout", default=30.0, show_default=True, help="Seconds per image (exec).")
def detect(provider, command, landmarks_file, images_dir, out_path, timeout) -> None:
    """Produce landmark records from one of the interchangeable providers."""
    if provider == "file":
        if landmarks_file is None:
            raise click.UsageError("--provider file requires --landmarks-file")
        records: Iterable[landmarks.LandmarkRecord] = landmarks.load_landmark_file(landmarks_file)
    elif provider == "exec":
        if command is None or images_dir is None:
            raise click.UsageError("--provider exec requires --command and --images")
        paths = _image_paths(Path(images_dir))
        records = landmarks.run_external_detector(command, paths, timeout=timeout)
    else:
        if images_dir is None:
            raise click.UsageError("--provider synthetic requires --images")
        records = _scan_marker_images(Path(images_dir))
    count = landmarks.write_landmark_file(records, out_path)
    click.echo(f"wrote {count} landmark records to {out_path}", err=True)


def _scan_marker_images(images_dir: Path) -> Iterator[landmarks.LandmarkRecord]:
    for path in _image_paths(images_dir):
        try:
            yield landmarks.scan_marker_image(path)
        except landmarks.DecodeError as exc:
            # Unprocessable images degrade to zero faces (scored as 1) instead
            # of aborting the batch.
            logger.warning("%s", exc)
            yield landmarks.LandmarkRecord(
                image_id=path.name,
                width=1,
                height=1,
                faces=(),
                detector="synthetic-marker:decode-error",
            )


# --- calibration and scoring ------------------------------------------------------


@cli.command()
@click.option("--landmarks", "landmarks_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--min-count", default=geometry.DEFAULT_MIN_CALIBRATION_COUNT, show_default=True)
@click.option("--source", default=None, help="Provenance label (defaults to the input filename).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def calibrate(landmarks_path, min_count, source, out_path) -> None:
    """Average single-face reference records into a calibration file."""
    records = landmarks.load_landmark_file(landmarks_path)
    summaries = (landmarks.normalized_eye_summary(r) for r in records)
    cal = geometry.calibrate(
        summaries,
        min_count=min_count,
        source=source if source is not None else Path(landmarks_path).name,
    )
    geometry.write_calibration(cal, out_path)
    click.echo(f"calibrated on {cal.n_images} reference images -> {out_path}", err=True)


def _parallel_map_ordered(fn, items: Iterable, jobs: int) -> Iterator:
    if jobs <= 1:
        for item in items:
            yield fn(item)
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= jobs * 4:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


@cli.command()
@click.option("--landmarks", "landmarks_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--calibration", "calibration_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--stdout", "to_stdout", is_flag=True, help="Stream score lines to stdout.")
@click.option("--filter", "fused_filter", is_flag=True, help="Emit only candidates below the threshold.")
@click.option("--threshold", default=geometry.DEFAULT_THRESHOLD, show_default=True, callback=_validate_threshold)
@click.option("--jobs", default=1, show_default=True, help="Worker threads for scoring.")
def score(landmarks_path, calibration_path, out_path, to_stdout, fused_filter, threshold, jobs) -> None:
    """Score landmark records against a calibration (one JSON line per record)."""
    if out_path is None and not to_stdout:
        raise click.UsageError("give --out or --stdout")
    cal = geometry.read_calibration(calibration_path)

    def score_one(record: landmarks.LandmarkRecord) -> geometry.ScoreRecord:
        n_faces, eyes = landmarks.normalized_eye_summary(record)
        return geometry.make_score_record(record.image_id, n_faces, eyes, cal)

    scored = _parallel_map_ordered(score_one, landmarks.iter_landmark_file(landmarks_path), jobs)
    if fused_filter:
        scored = iter(geometry.filter_candidates(scored, threshold))
    sink = sys.stdout if to_stdout else open(out_path, "w", encoding="utf-8")
    count = 0
    try:
        for record in scored:
            sink.write(geometry.score_record_to_json(record) + "\n")
            count += 1
    finally:
        if not to_stdout:
            sink.close()
    if not to_stdout:
        click.echo(f"wrote {count} score records to {out_path}", err=True)


@cli.command("filter")
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=geometry.DEFAULT_THRESHOLD, show_default=True, callback=_validate_threshold)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--stdout", "to_stdout", is_flag=True)
def filter_cmd(scores_path, threshold, out_path, to_stdout) -> None:
    """Keep score records strictly below the threshold, ascending by score."""
    if out_path is None and not to_stdout:
        raise click.UsageError("give --out or --stdout")
    candidates = geometry.filter_candidates(geometry.iter_score_file(scores_path), threshold)
    lines = (geometry.score_record_to_json(r) + "\n" for r in candidates)
    if to_stdout:
        for line in lines:
            sys.stdout.write(line)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.writelines(lines)
        click.echo(f"kept {len(candidates)} candidates -> {out_path}", err=True)


# --- fetching ------------------------------------------------------------------


@cli.command("fetch")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--rate", default=5.0, show_default=True, help="Max requests per second.")
@click.option("--retries", default=2, show_default=True)
@click.option("--timeout", default=10.0, show_default=True)
@click.option("--log", "log_path", default=None, type=click.Path(dir_okay=False))
def fetch_cmd(manifest_path, out_dir, rate, retries, timeout, log_path) -> None:
    """Download every manifest URL into the output directory with a fetch log."""
    manifest = fetch_mod.read_fetch_manifest(manifest_path)
    if log_path is None:
        log_path = str(Path(out_dir) / "fetch_log.jsonl")
    results = fetch_mod.fetch_images(
        manifest, out_dir, rate_limit=rate, retries=retries, timeout=timeout, log_path=log_path
    )
    ok = sum(1 for r in results if r["status"] == "ok")
    click.echo(f"fetched {ok}/{len(results)} images; log at {log_path}", err=True)


# --- statistics -------------------------------------------------------------------


@cli.group("stats")
def stats_group() -> None:
    """Descriptive statistics, KS tests, histograms, and density grids."""


def _read_values(path: str) -> list[float]:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise ValueError(f"{path} line {line_no}: not a number: {text!r}") from exc
    return values


def _load_field(values_path, accounts_path, field) -> list[float]:
    if values_path is not None:
        return _read_values(values_path)
    if accounts_path is None or field is None:
        raise click.UsageError("give --values, or --accounts with --field")
    accounts = stats_mod.read_account_stats(accounts_path)
    return [float(getattr(a, field)) for a in accounts]


_ACCOUNT_FIELDS = ["followers", "friends", "tweets", "created_year"]


@stats_group.command()
@click.option("--values", "values_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--accounts", "accounts_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--field", type=click.Choice(_ACCOUNT_FIELDS), default=None)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def describe(values_path, accounts_path, field, out_path) -> None:
    """Sample size, mean, and sample standard deviation."""
    result = stats_mod.describe(_load_field(values_path, accounts_path, field))
    payload = {"n": result.n, "mean": result.mean, "sd": result.sd}
    Path(out_path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


@stats_group.command()
@click.option("--a", "a_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "b_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def ks(a_path, b_path, out_path) -> None:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a = _read_values(a_path)
    b = _read_values(b_path)
    d = stats_mod.ks_two_sample(a, b)
    p = stats_mod.ks_pvalue(d, len(a), len(b))
    payload = {"d": d, "p_value": p, "n": len(a), "m": len(b)}
    Path(out_path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


@stats_group.command()
@click.option("--values", "values_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--edges", required=True, help="Comma-separated strictly increasing bin edges.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--sidecar", "sidecar_path", default=None, type=click.Path(dir_okay=False))
def hist(values_path, edges, out_path, sidecar_path) -> None:
    """Histogram counts (half-open bins, last bin closed) as CSV."""
    try:
        edge_values = [float(e) for e in edges.split(",")]
    except ValueError:
        raise click.BadParameter("edges must be comma-separated numbers", param_hint="--edges")
    result = stats_mod.histogram(_read_values(values_path), edge_values)
    stats_mod.write_histogram_csv(result, out_path, sidecar_path)


@stats_group.command()
@click.option("--values", "values_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bandwidth", default=None, type=float)
@click.option("--grid-min", default=None, type=float)
@click.option("--grid-max", default=None, type=float)
@click.option("--grid-size", default=512, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--sidecar", "sidecar_path", default=None, type=click.Path(dir_okay=False))
def kde1d(values_path, bandwidth, grid_min, grid_max, grid_size, out_path, sidecar_path) -> None:
    """1-D Gaussian KDE (Silverman bandwidth by default) on a grid, as CSV."""
    values = _read_values(values_path)
    h = bandwidth if bandwidth is not None else stats_mod.silverman_bandwidth(np.asarray(values))
    if grid_min is None:
        grid_min = min(values) - 6.0 * h
    if grid_max is None:
        grid_max = max(values) + 6.0 * h
    if grid_size < 2 or grid_max <= grid_min:
        raise click.UsageError("grid must span a positive range with at least 2 points")
    grid = np.linspace(grid_min, grid_max, grid_size)
    density = stats_mod.kde_1d(values, grid, bandwidth=h)
    stats_mod.write_density_csv(density, out_path, sidecar_path)


def _read_points_csv(path: str):
    points = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "y"} <= set(reader.fieldnames):
            raise ValueError(f"points file {path} must have an x,y header")
        for row in reader:
            points.append((float(row["x"]), float(row["y"])))
    return points


@stats_group.command()
@click.option("--points", "points_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", "scores_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--eye", type=click.Choice(["left", "right"]), default=None)
@click.option("--bandwidth-x", default=None, type=float)
@click.option("--bandwidth-y", default=None, type=float)
@click.option("--grid-min", default=0.0, show_default=True)
@click.option("--grid-max", default=1.0, show_default=True)
@click.option("--grid-size", default=64, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--sidecar", "sidecar_path", default=None, type=click.Path(dir_okay=False))
def kde2d(points_path, scores_path, eye, bandwidth_x, bandwidth_y,
          grid_min, grid_max, grid_size, out_path, sidecar_path) -> None:
    """2-D Gaussian KDE (Scott bandwidths by default) over a lattice, as CSV.

    Points come from an x,y CSV or from the chosen eye of a score file,
    which is how the eye-location concentration grids are produced.
    """
    if points_path is not None:
        points = _read_points_csv(points_path)
    elif scores_path is not None and eye is not None:
        points = []
        for record in geometry.iter_score_file(scores_path):
            if record.eyes is None:
                continue
            point = record.eyes.left if eye == "left" else record.eyes.right
            points.append((point.x, point.y))
    else:
        raise click.UsageError("give --points, or --scores with --eye")
    if grid_size < 2 or grid_max <= grid_min:
        raise click.UsageError("grid must span a positive range with at least 2 points")
    bandwidths = None
    if bandwidth_x is not None or bandwidth_y is not None:
        if bandwidth_x is None or bandwidth_y is None:
            raise click.UsageError("give both --bandwidth-x and --bandwidth-y or neither")
        bandwidths = (bandwidth_x, bandwidth_y)
    grid = np.linspace(grid_min, grid_max, grid_size)
    density = stats_mod.kde_2d(points, grid, grid, bandwidths=bandwidths)
    stats_mod.write_density_csv(density, out_path, sidecar_path)


# --- reporting and serving ----------------------------------------------------------


@cli.command()
@click.option("--counts", required=True, help="Consensus counts as STRICT,LOOSE (e.g. 54,113).")
@click.option("--n-sample", required=True, type=int, help="Size of the random sample.")
@click.option("--base", default=None, type=int, help="Population base for extrapolation.")
@click.option("--kappa", default=None, type=float)
@click.option("--tweet-strict", default=None, type=int)
@click.option("--tweet-loose", default=None, type=int)
@click.option("--tweet-total", default=None, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def report(counts, n_sample, base, kappa, tweet_strict, tweet_loose, tweet_total, out_path) -> None:
    """Prevalence bounds (and optional extrapolation) from consensus counts."""
    try:
        strict_text, loose_text = counts.split(",")
        strict, loose = int(strict_text), int(loose_text)
    except ValueError:
        raise click.BadParameter("expected STRICT,LOOSE integers", param_hint="--counts")
    consensus = annotation.ConsensusCounts(
        n_candidates=loose, n_doubly_labeled=loose, strict=strict, loose=loose
    )
    result = annotation.prevalence_report(
        consensus,
        n_sample=n_sample,
        kappa=kappa,
        extrapolation_base=base,
        strict_tweets=tweet_strict,
        loose_tweets=tweet_loose,
        total_tweets=tweet_total,
    )
    Path(out_path).write_text(json.dumps(result.to_json_dict(), indent=2) + "\n", encoding="utf-8")
    click.echo(
        f"prevalence {result.lower_percent} - {result.upper_percent} -> {out_path}", err=True
    )


@cli.command()
@click.option("--candidates", "candidates_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--images", "images_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path(dir_okay=False))
@click.option("--ui-dir", "ui_dir", default=None, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--n-sample", default=None, type=int, help="Random-sample size behind the candidates.")
@click.option("--base", default=None, type=int, help="Population base for live extrapolation.")
@click.option("--shuffle-seed", default=None, type=int, help="Shuffle queue order deterministically.")
def serve(candidates_path, images_dir, store_path, ui_dir, host, port, n_sample, base, shuffle_seed) -> None:
    """Serve the annotation API (and UI assets, if built) over the candidates."""
    from .service import serve as run_service

    records = geometry.read_score_file(candidates_path)
    store = annotation.LabelStore(
        records,
        log_path=store_path,
        n_sample=n_sample,
        extrapolation_base=base,
        shuffle_seed=shuffle_seed,
    )
    click.echo(
        f"serving {store.n_candidates} candidates on http://{host}:{port} "
        f"(labels -> {store_path})",
        err=True,
    )
    run_service(store, images_dir, ui_dir=ui_dir, host=host, port=port)


def main(argv=None) -> int:
    _configure_logging()
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ValueError, annotation.UnknownImageError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (landmarks.DetectorError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
