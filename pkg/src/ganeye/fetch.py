"""Rate-limited batch download of profile images from a URL manifest.

Stands in for platform-API collection: a CSV manifest (columns
``image_id,url``) drives concurrent HTTP fetches under a global sliding
one-second rate window.  Failures are per-entry log events, never fatal to
the batch; the log is JSONL with one line per manifest entry.
"""

from __future__ import annotations

import csv
import json
import logging
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

import requests

from .landmarks import FetchManifestEntry

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 10.0
RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


def read_fetch_manifest(path: str | Path) -> list[FetchManifestEntry]:
    """Parse a manifest CSV; image ids must be unique."""
    entries: list[FetchManifestEntry] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"image_id", "url"} <= set(reader.fieldnames):
            raise ValueError(f"manifest {path} must have an image_id,url header")
        for row in reader:
            image_id = (row.get("image_id") or "").strip()
            url = (row.get("url") or "").strip()
            if not image_id or not url:
                raise ValueError(f"manifest {path} has a row with empty image_id or url")
            if image_id in seen:
                raise ValueError(f"manifest {path} repeats image_id {image_id!r}")
            seen.add(image_id)
            entries.append(FetchManifestEntry(image_id=image_id, url=url))
    return entries


class RateLimiter:
    """Allow at most `rate` acquisitions in any sliding one-second window."""

    def __init__(self, rate: float, clock=time.monotonic, sleep=time.sleep) -> None:
        if rate <= 0:
            raise ValueError("rate must be positive")
        self._capacity = max(1, int(rate))
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()
        self._clock = clock
        self._sleep = sleep

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= 1.0:
                    self._stamps.popleft()
                if len(self._stamps) < self._capacity:
                    self._stamps.append(now)
                    return
                wait = 1.0 - (now - self._stamps[0])
            self._sleep(max(wait, 0.001))


def _fetch_one(
    entry: FetchManifestEntry,
    out_dir: Path,
    limiter: RateLimiter,
    retries: int,
    timeout: float,
    session: requests.Session,
    backoff_base: float,
) -> dict:
    last_error: dict | None = None
    for attempt in range(1 + retries):
        if attempt:
            time.sleep(backoff_base * (2 ** (attempt - 1)))
        limiter.acquire()
        try:
            response = session.get(entry.url, timeout=timeout)
        except requests.Timeout:
            last_error = {"image_id": entry.image_id, "status": "timeout"}
            continue
        except requests.RequestException as exc:
            logger.warning("fetch of %s failed: %s", entry.image_id, exc)
            last_error = {"image_id": entry.image_id, "status": "http-error"}
            continue
        if response.status_code != 200:
            last_error = {
                "image_id": entry.image_id,
                "status": "http-error",
                "http_status": response.status_code,
            }
            if response.status_code in RETRYABLE_STATUS:
                continue
            return last_error
        media_type = (response.headers.get("Content-Type") or "").split(";")[0].strip()
        if not media_type.startswith("image/"):
            return {
                "image_id": entry.image_id,
                "status": "non-image",
                "http_status": response.status_code,
                "media_type": media_type,
            }
        path = out_dir / entry.image_id
        path.write_bytes(response.content)
        return {
            "image_id": entry.image_id,
            "status": "ok",
            "http_status": response.status_code,
            "path": str(path),
            "media_type": media_type,
        }
    assert last_error is not None
    return last_error


def fetch_images(
    manifest: Sequence[FetchManifestEntry],
    out_dir: str | Path,
    rate_limit: float = 5.0,
    retries: int = 2,
    timeout: float = DEFAULT_TIMEOUT,
    log_path: str | Path | None = None,
    session: requests.Session | None = None,
    max_workers: int = 8,
    backoff_base: float = 0.5,
) -> list[dict]:
    """Fetch every manifest entry, returning (and optionally writing) the log.

    Each URL is tried at most 1 + retries times with exponential backoff;
    the response body lands at out_dir/<image_id> when the server reports an
    image media type.  Log entries come back in manifest order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    probe = out_dir / ".write-probe"
    try:
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from exc
    limiter = RateLimiter(rate_limit)
    own_session = session is None
    session = session or requests.Session()
    try:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(
                pool.map(
                    lambda entry: _fetch_one(
                        entry, out_dir, limiter, retries, timeout, session, backoff_base
                    ),
                    manifest,
                )
            )
    finally:
        if own_session:
            session.close()
    if log_path is not None:
        with open(log_path, "w", encoding="utf-8") as fh:
            for result in results:
                fh.write(json.dumps(result, separators=(",", ":")) + "\n")
    return results
