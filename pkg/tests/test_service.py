import io

import pytest
from fastapi.testclient import TestClient
from PIL import Image

from ganeye.annotation import LabelStore
from ganeye.service import create_app

from conftest import make_score


@pytest.fixture
def images_dir(tmp_path):
    directory = tmp_path / "images"
    directory.mkdir()
    for k in range(4):
        Image.new("RGB", (16, 16), (k, k, k)).save(directory / f"img{k}.png")
    return directory


@pytest.fixture
def store(tmp_path):
    candidates = [make_score(f"img{k}.png", 0.001 * (k + 1)) for k in range(4)]
    return LabelStore(candidates, tmp_path / "labels.log", n_sample=1000)


@pytest.fixture
def client(store, images_dir):
    return TestClient(create_app(store, images_dir))


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_queue_returns_lowest_scores_first(client):
    response = client.get("/api/queue", params={"annotator": "ann1", "k": 2})
    assert response.status_code == 200
    payload = response.json()
    assert [c["image_id"] for c in payload["candidates"]] == ["img0.png", "img1.png"]
    assert payload["candidates"][0]["image_url"] == "/api/image/img0.png"
    assert payload["candidates"][0]["g"] == 0.001


def test_queue_skips_already_labeled(client):
    client.post("/api/labels", json={"annotator": "ann1", "image_id": "img0.png", "category": 1})
    response = client.get("/api/queue", params={"annotator": "ann1", "k": 1})
    assert response.json()["candidates"][0]["image_id"] == "img1.png"


def test_submit_label_returns_revision(client):
    first = client.post(
        "/api/labels", json={"annotator": "a", "image_id": "img1.png", "category": 2}
    )
    assert first.status_code == 200
    assert first.json() == {"revision": 1}
    second = client.post(
        "/api/labels", json={"annotator": "a", "image_id": "img1.png", "category": 1}
    )
    assert second.json() == {"revision": 2}


@pytest.mark.parametrize("category", [0, 4, "nope", None])
def test_submit_invalid_category_is_400(client, category):
    response = client.post(
        "/api/labels", json={"annotator": "a", "image_id": "img1.png", "category": category}
    )
    assert response.status_code == 400


def test_submit_unknown_image_is_404(client):
    response = client.post(
        "/api/labels", json={"annotator": "a", "image_id": "ghost.png", "category": 1}
    )
    assert response.status_code == 404


def test_submit_malformed_body_is_400(client):
    response = client.post("/api/labels", content=b"{not json")
    assert response.status_code == 400
    response = client.post("/api/labels", json={"annotator": "a"})
    assert response.status_code == 400


def test_stats_matches_store(client, store):
    client.post("/api/labels", json={"annotator": "a", "image_id": "img0.png", "category": 1})
    client.post("/api/labels", json={"annotator": "b", "image_id": "img0.png", "category": 1})
    response = client.get("/api/stats")
    assert response.status_code == 200
    assert response.json() == store.stats()


def test_image_bytes_served(client, images_dir):
    response = client.get("/api/image/img2.png")
    assert response.status_code == 200
    assert response.headers["content-type"] == "image/png"
    assert response.content == (images_dir / "img2.png").read_bytes()


def test_image_unknown_is_404(client):
    assert client.get("/api/image/ghost.png").status_code == 404


def test_image_traversal_blocked(client, tmp_path):
    (tmp_path / "secret.txt").write_text("nope")
    response = client.get("/api/image/..%2Fsecret.txt")
    assert response.status_code == 404


def test_image_basename_fallback(store, images_dir):
    """Absolute-path image ids (exec provider) resolve by basename."""
    client = TestClient(create_app(store, images_dir))
    response = client.get("/api/image/%2Fsome%2Fabs%2Fpath%2Fimg1.png")
    assert response.status_code == 200


def test_static_ui_mount(store, images_dir, tmp_path):
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_text("<html><body>annotate</body></html>")
    client = TestClient(create_app(store, images_dir, ui_dir=ui_dir))
    response = client.get("/")
    assert response.status_code == 200
    assert "annotate" in response.text
    # API routes take precedence over the static mount.
    assert client.get("/api/health").status_code == 200


def test_service_without_ui_dir_still_serves_api(client):
    assert client.get("/api/health").status_code == 200
    assert client.get("/").status_code == 404
