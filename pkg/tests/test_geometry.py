import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ganeye.geometry import (
    CalibrationError,
    ContractViolation,
    EyeCalibration,
    EyePair,
    NormPoint,
    PixelPoint,
    ScoreRecord,
    calibrate,
    calibration_to_json,
    eye_center,
    filter_candidates,
    gan_eye_distance,
    make_score_record,
    normalize_point,
    parse_score_record,
    read_calibration,
    recall_at,
    score_record_to_json,
    write_calibration,
)

from conftest import make_pair, make_score

MAX_SUMMED = 2.0 * math.sqrt(2.0)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
norm_points = st.builds(NormPoint, unit, unit)
eye_pairs = st.builds(EyePair, norm_points, norm_points)


# --- eye_center ---------------------------------------------------------------


def test_eye_center_single_point():
    assert eye_center([PixelPoint(10, 20)]) == PixelPoint(10, 20)


def test_eye_center_two_points():
    assert eye_center([PixelPoint(0, 0), PixelPoint(2, 4)]) == PixelPoint(1, 2)


def test_eye_center_six_points_hand_summed():
    # sum x = 690, sum y = 1200 over six points
    points = [
        PixelPoint(100, 200),
        PixelPoint(110, 210),
        PixelPoint(120, 190),
        PixelPoint(130, 200),
        PixelPoint(120, 210),
        PixelPoint(110, 190),
    ]
    assert eye_center(points) == PixelPoint(115, 200)


def test_eye_center_empty_rejected():
    with pytest.raises(ValueError):
        eye_center([])


def test_pixel_point_rejects_non_finite():
    with pytest.raises(ValueError):
        PixelPoint(float("nan"), 0)
    with pytest.raises(ValueError):
        PixelPoint(0, float("inf"))


# --- normalize_point -------------------------------------------------------------


def test_normalize_direct_division():
    p = normalize_point(PixelPoint(152, 180), 400, 400)
    assert p == NormPoint(0.38, 0.45)


def test_normalize_origin():
    assert normalize_point(PixelPoint(0, 0), 123, 456) == NormPoint(0, 0)


def test_normalize_midpoint():
    assert normalize_point(PixelPoint(256, 128), 512, 256) == NormPoint(0.5, 0.5)


def test_normalize_clamps_out_of_frame():
    p = normalize_point(PixelPoint(-3, 500), 400, 400)
    assert p == NormPoint(0.0, 1.0)


@pytest.mark.parametrize("width,height", [(0, 10), (10, 0), (-5, 10)])
def test_normalize_rejects_bad_dimensions(width, height):
    with pytest.raises(ValueError):
        normalize_point(PixelPoint(1, 1), width, height)


@given(
    x=st.floats(-1e6, 1e6, allow_nan=False),
    y=st.floats(-1e6, 1e6, allow_nan=False),
    w=st.floats(1e-3, 1e6, allow_nan=False),
    h=st.floats(1e-3, 1e6, allow_nan=False),
)
def test_normalize_always_in_unit_square(x, y, w, h):
    p = normalize_point(PixelPoint(x, y), w, h)
    assert 0.0 <= p.x <= 1.0 and 0.0 <= p.y <= 1.0


# --- gan_eye_distance --------------------------------------------------------------


def test_distance_zero_for_exact_match(calibration):
    eyes = EyePair(left=calibration.left, right=calibration.right)
    assert gan_eye_distance(1, eyes, calibration) == 0.0


@pytest.mark.parametrize("n_faces", [0, 2, 5])
def test_distance_one_without_single_face(calibration, n_faces):
    assert gan_eye_distance(n_faces, None, calibration) == 1.0


def test_distance_known_displacement(calibration):
    # One eye displaced by 0.07 along y: g = 0.07 / (2*sqrt(2))
    eyes = make_pair(0.38, 0.45, 0.62, 0.52)
    assert gan_eye_distance(1, eyes, calibration) == pytest.approx(
        0.0247487373415291, abs=1e-12
    )


def test_distance_contract_violations(calibration):
    eyes = make_pair(0.1, 0.1, 0.9, 0.9)
    with pytest.raises(ContractViolation):
        gan_eye_distance(0, eyes, calibration)
    with pytest.raises(ContractViolation):
        gan_eye_distance(1, None, calibration)


@given(eyes=eye_pairs, cal_eyes=eye_pairs)
def test_distance_always_in_unit_interval(eyes, cal_eyes):
    cal = EyeCalibration(left=cal_eyes.left, right=cal_eyes.right, n_images=1)
    g = gan_eye_distance(1, eyes, cal)
    assert 0.0 <= g <= 1.0
    assert (g == 0.0) == (eyes.left == cal.left and eyes.right == cal.right)


@given(
    cal_eyes=eye_pairs,
    dx=st.floats(-1, 1, allow_nan=False),
    dy=st.floats(-1, 1, allow_nan=False),
    t1=unit,
    t2=unit,
)
def test_distance_radial_monotonicity(cal_eyes, dx, dy, t1, t2):
    """Moving one eye outward along a ray from its reference never lowers g."""
    cal = EyeCalibration(left=cal_eyes.left, right=cal_eyes.right, n_images=1)
    norm = math.hypot(dx, dy)
    if norm == 0:
        return
    dx, dy = dx / norm, dy / norm
    # Largest step keeping the moved eye inside the unit square.
    t_max = 1.0
    for origin, d in ((cal.left.x, dx), (cal.left.y, dy)):
        if d > 0:
            t_max = min(t_max, (1.0 - origin) / d)
        elif d < 0:
            t_max = min(t_max, origin / -d)
    lo, hi = sorted((t1 * t_max, t2 * t_max))
    eyes_near = EyePair(
        left=NormPoint(cal.left.x + lo * dx, cal.left.y + lo * dy), right=cal.right
    )
    eyes_far = EyePair(
        left=NormPoint(cal.left.x + hi * dx, cal.left.y + hi * dy), right=cal.right
    )
    assert gan_eye_distance(1, eyes_near, cal) <= gan_eye_distance(1, eyes_far, cal) + 1e-15


def test_distance_symmetric_between_eyes():
    """A displacement of magnitude d scores the same on either eye."""
    cal = EyeCalibration(left=NormPoint(0.3, 0.5), right=NormPoint(0.7, 0.5), n_images=1)
    on_left = make_pair(0.3 + 0.05, 0.5, 0.7, 0.5)
    on_right = make_pair(0.3, 0.5, 0.7 + 0.05, 0.5)
    g_left = gan_eye_distance(1, on_left, cal)
    g_right = gan_eye_distance(1, on_right, cal)
    assert g_left == pytest.approx(g_right, abs=1e-15)


@given(
    points=st.lists(
        st.tuples(st.floats(0, 1000, allow_nan=False), st.floats(0, 1000, allow_nan=False)),
        min_size=1,
        max_size=8,
    ),
    scale=st.sampled_from([2.0, 3.0, 0.5, 10.0]),
)
def test_scale_invariance_of_normalized_center(points, scale):
    """Scaling the image and its landmarks together leaves normalization alone."""
    width, height = 1024.0, 768.0
    base = normalize_point(eye_center([PixelPoint(x, y) for x, y in points]), width, height)
    scaled = normalize_point(
        eye_center([PixelPoint(x * scale, y * scale) for x, y in points]),
        width * scale,
        height * scale,
    )
    assert scaled.x == pytest.approx(base.x, abs=1e-12)
    assert scaled.y == pytest.approx(base.y, abs=1e-12)


# --- calibrate -----------------------------------------------------------------


def test_calibrate_identity_mean():
    pair = make_pair(0.3, 0.4, 0.7, 0.4)
    cal = calibrate([(1, pair)], min_count=1, source="s")
    assert cal.left == pair.left and cal.right == pair.right
    assert cal.n_images == 1 and cal.source == "s"


def test_calibrate_two_point_mean():
    cal = calibrate(
        [(1, make_pair(0.3, 0.4, 0.7, 0.4)), (1, make_pair(0.5, 0.4, 0.7, 0.4))],
        min_count=2,
    )
    assert cal.left == NormPoint(0.4, 0.4)
    assert cal.right == NormPoint(0.7, 0.4)
    assert cal.n_images == 2


def test_calibrate_skips_non_single_face():
    # Mean over the two usable records only: left x = (0.3 + 0.5) / 2
    summaries = [
        (1, make_pair(0.3, 0.4, 0.7, 0.4)),
        (0, None),
        (1, make_pair(0.5, 0.4, 0.7, 0.4)),
    ]
    cal = calibrate(summaries, min_count=2)
    assert cal.n_images == 2
    assert cal.left == NormPoint(0.4, 0.4)


def test_calibrate_shortfall_names_counts():
    with pytest.raises(CalibrationError, match="at least 10.*got 1"):
        calibrate([(1, make_pair(0.3, 0.4, 0.7, 0.4))])


def test_calibrate_rejects_inconsistent_summary():
    with pytest.raises(ContractViolation):
        calibrate([(1, None)], min_count=1)
    with pytest.raises(ContractViolation):
        calibrate([(2, make_pair(0.3, 0.4, 0.7, 0.4))], min_count=1)


# --- filter_candidates / recall_at --------------------------------------------------


def test_filter_keeps_below_threshold():
    scores = [make_score("a", 0.01), make_score("b", 0.5)]
    assert [r.image_id for r in filter_candidates(scores, 0.02)] == ["a"]


def test_filter_threshold_is_strict():
    assert filter_candidates([make_score("c", 0.02)], 0.02) == []


def test_filter_empty_input():
    assert filter_candidates([], 0.02) == []


def test_filter_sorts_ascending_with_id_ties():
    scores = [
        make_score("z", 0.010),
        make_score("a", 0.015),
        make_score("m", 0.010),
    ]
    assert [r.image_id for r in filter_candidates(scores, 0.02)] == ["m", "z", "a"]


@pytest.mark.parametrize("threshold", [0.0, -0.1, 1.5])
def test_filter_rejects_out_of_range_threshold(threshold):
    with pytest.raises(ValueError):
        filter_candidates([], threshold)


def test_recall_all_zero_scores():
    scores = [make_score(f"i{k}", 0.0) for k in range(5)]
    assert recall_at(scores, 0.01) == 1.0


def test_recall_half():
    assert recall_at([make_score("a", 0.01), make_score("b", 0.03)], 0.02) == 0.5


def test_recall_empty_rejected():
    with pytest.raises(ValueError):
        recall_at([], 0.02)


@given(
    gs=st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=40),
    threshold=st.floats(0.01, 1.0, allow_nan=False),
)
def test_recall_consistent_with_filter(gs, threshold):
    scores = [make_score(f"i{k}", g if g < 1 else 0.999) for k, g in enumerate(gs)]
    kept = filter_candidates(scores, threshold)
    assert set(r.image_id for r in kept) <= set(r.image_id for r in scores)
    assert recall_at(scores, threshold) == len(kept) / len(scores)
    assert all(a.g <= b.g for a, b in zip(kept, kept[1:]))


# --- score record invariants -----------------------------------------------------


def test_score_record_invariants(calibration):
    with pytest.raises(ValueError):
        ScoreRecord(image_id="x", n_faces=0, eyes=None, g=0.5)
    with pytest.raises(ContractViolation):
        ScoreRecord(image_id="x", n_faces=2, eyes=make_pair(0.1, 0.1, 0.9, 0.9), g=1.0)
    with pytest.raises(ContractViolation):
        ScoreRecord(image_id="x", n_faces=1, eyes=None, g=0.0)
    record = make_score_record("x", 0, None, calibration)
    assert record.g == 1.0 and record.eyes is None


# --- serialization -----------------------------------------------------------------


def test_calibration_round_trip(tmp_path, calibration):
    path = tmp_path / "cal.json"
    write_calibration(calibration, path)
    loaded = read_calibration(path)
    assert loaded == calibration
    payload = json.loads(calibration_to_json(calibration))
    assert set(payload) == {"left", "right", "n_images", "source"}


def test_calibration_read_rejects_garbage(tmp_path):
    path = tmp_path / "cal.json"
    path.write_text("not json")
    with pytest.raises(ValueError):
        read_calibration(path)
    path.write_text(json.dumps({"left": [0.1, 0.2]}))
    with pytest.raises(ValueError):
        read_calibration(path)


@given(eyes=eye_pairs, n_faces=st.sampled_from([0, 1, 2, 3]))
def test_score_record_json_round_trip(eyes, n_faces):
    if n_faces == 1:
        record = ScoreRecord(image_id="img", n_faces=1, eyes=eyes, g=0.123456789123)
    else:
        record = ScoreRecord(image_id="img", n_faces=n_faces, eyes=None, g=1.0)
    parsed = parse_score_record(score_record_to_json(record))
    assert parsed == record


def test_score_record_json_preserves_full_precision(calibration):
    eyes = make_pair(0.38, 0.45, 0.62, 0.52)
    record = make_score_record("img", 1, eyes, calibration)
    parsed = parse_score_record(score_record_to_json(record))
    assert parsed.g == record.g  # bit-exact round trip
