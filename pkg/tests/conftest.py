import pytest

from ganeye.geometry import EyeCalibration, EyePair, NormPoint, ScoreRecord


@pytest.fixture
def calibration() -> EyeCalibration:
    return EyeCalibration(
        left=NormPoint(0.38, 0.45),
        right=NormPoint(0.62, 0.45),
        n_images=10,
        source="fixture",
    )


def make_pair(lx, ly, rx, ry) -> EyePair:
    return EyePair(left=NormPoint(lx, ly), right=NormPoint(rx, ry))


def make_score(image_id: str, g: float, n_faces: int = 1) -> ScoreRecord:
    eyes = make_pair(0.3, 0.4, 0.7, 0.4) if n_faces == 1 else None
    if n_faces != 1:
        g = 1.0
    return ScoreRecord(image_id=image_id, n_faces=n_faces, eyes=eyes, g=g)
