"""HTTP API for the annotation workflow.

Endpoints (JSON bodies, candid status codes: 200 ok, 400 invalid category,
404 unknown image):

* ``GET  /api/health``            liveness probe
* ``GET  /api/queue``             next unlabeled candidates for an annotator
* ``POST /api/labels``            submit one label, returns the store revision
* ``GET  /api/stats``             live progress / kappa / consensus / prevalence
* ``GET  /api/image/{image_id}``  raw image bytes
* static UI assets mounted at ``/`` when a UI directory is configured
"""

from __future__ import annotations

import logging
from pathlib import Path
from urllib.parse import quote

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from .annotation import LabelStore, UnknownImageError

logger = logging.getLogger(__name__)

_MAGIC_TYPES = (
    (b"\x89PNG\r\n\x1a\n", "image/png"),
    (b"\xff\xd8\xff", "image/jpeg"),
    (b"GIF87a", "image/gif"),
    (b"GIF89a", "image/gif"),
)

_SUFFIX_TYPES = {
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".gif": "image/gif",
    ".webp": "image/webp",
}


def _media_type(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix in _SUFFIX_TYPES:
        return _SUFFIX_TYPES[suffix]
    try:
        head = path.open("rb").read(12)
    except OSError:
        return "application/octet-stream"
    for magic, media in _MAGIC_TYPES:
        if head.startswith(magic):
            return media
    if len(head) >= 12 and head[:4] == b"RIFF" and head[8:12] == b"WEBP":
        return "image/webp"
    return "application/octet-stream"


def _resolve_image(images_dir: Path, image_id: str) -> Path | None:
    base = images_dir.resolve()
    direct = (images_dir / image_id).resolve()
    # Direct join only when it cannot escape the image directory.
    if base in direct.parents and direct.is_file():
        return direct
    fallback = images_dir / Path(image_id).name
    if fallback.is_file():
        return fallback
    return None


def create_app(
    store: LabelStore, images_dir: str | Path, ui_dir: str | Path | None = None
) -> FastAPI:
    images_dir = Path(images_dir)
    app = FastAPI(title="ganeye annotation service")

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/queue")
    def queue(annotator: str = Query(...), k: int = Query(10, ge=0)) -> dict:
        records = store.next_candidates(annotator, k)
        return {
            "candidates": [
                {
                    "image_id": r.image_id,
                    "g": r.g,
                    "image_url": "/api/image/" + quote(r.image_id, safe=""),
                }
                for r in records
            ]
        }

    @app.post("/api/labels")
    async def submit_label(request: Request) -> dict:
        try:
            payload = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body must be a JSON object")
        if not isinstance(payload, dict):
            raise HTTPException(status_code=400, detail="body must be a JSON object")
        annotator = payload.get("annotator")
        image_id = payload.get("image_id")
        category = payload.get("category")
        if not annotator or not image_id:
            raise HTTPException(status_code=400, detail="annotator and image_id are required")
        try:
            category = int(category)
        except (TypeError, ValueError):
            raise HTTPException(status_code=400, detail=f"invalid category {category!r}")
        try:
            revision = store.submit(str(annotator), str(image_id), category)
        except UnknownImageError:
            raise HTTPException(status_code=404, detail=f"unknown image {image_id!r}")
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"revision": revision}

    @app.get("/api/stats")
    def stats() -> dict:
        return store.stats()

    @app.get("/api/image/{image_id:path}")
    def image(image_id: str) -> FileResponse:
        path = _resolve_image(images_dir, image_id)
        if path is None:
            raise HTTPException(status_code=404, detail=f"unknown image {image_id!r}")
        return FileResponse(path, media_type=_media_type(path))

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(
    store: LabelStore,
    images_dir: str | Path,
    ui_dir: str | Path | None = None,
    host: str = "127.0.0.1",
    port: int = 8000,
) -> None:
    """Run the annotation service until interrupted."""
    import uvicorn

    app = create_app(store, images_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
