"""Detect GAN-typical eye placement in profile pictures and triage the hits.

The core scoring lives in :mod:`ganeye.geometry`; `GanEyeScorer` wraps it in
an estimator API; the remaining modules cover ingestion, synthetic corpora,
statistics, annotation, fetching, and the HTTP service.  `ganeye.cli` is the
command-line entry point.
"""

from .annotation import (
    AnnotationLabel,
    Category,
    ConsensusCounts,
    LabelStore,
    PrevalenceReport,
    cohen_kappa,
    consensus_counts,
    consensus_sets,
    format_percent,
    prevalence_report,
)
from .estimator import GanEyeScorer
from .geometry import (
    DEFAULT_MIN_CALIBRATION_COUNT,
    DEFAULT_THRESHOLD,
    CalibrationError,
    ContractViolation,
    EyeCalibration,
    EyePair,
    NormPoint,
    PixelPoint,
    ScoreRecord,
    calibrate,
    eye_center,
    filter_candidates,
    gan_eye_distance,
    normalize_point,
    recall_at,
)
from .landmarks import (
    DetectionSummary,
    FaceLandmarks,
    FetchManifestEntry,
    LandmarkRecord,
    detect_synthetic,
    detection_summary,
    load_landmark_file,
    normalized_eye_summary,
    parse_landmark_record,
    run_external_detector,
    serialize_landmark_record,
)
from .stats import (
    AccountStats,
    DensityGrid,
    DescribeResult,
    HistogramResult,
    describe,
    histogram,
    kde_1d,
    kde_2d,
    ks_pvalue,
    ks_two_sample,
)
from .synthetic import CorpusManifestEntry, SyntheticSpec, generate_corpus, generate_image

__version__ = "0.1.0"

__all__ = [
    "AnnotationLabel",
    "AccountStats",
    "CalibrationError",
    "Category",
    "ConsensusCounts",
    "ContractViolation",
    "CorpusManifestEntry",
    "DEFAULT_MIN_CALIBRATION_COUNT",
    "DEFAULT_THRESHOLD",
    "DensityGrid",
    "DescribeResult",
    "DetectionSummary",
    "EyeCalibration",
    "EyePair",
    "FaceLandmarks",
    "FetchManifestEntry",
    "GanEyeScorer",
    "HistogramResult",
    "LabelStore",
    "LandmarkRecord",
    "NormPoint",
    "PixelPoint",
    "PrevalenceReport",
    "ScoreRecord",
    "SyntheticSpec",
    "calibrate",
    "cohen_kappa",
    "consensus_counts",
    "consensus_sets",
    "describe",
    "detect_synthetic",
    "detection_summary",
    "eye_center",
    "filter_candidates",
    "format_percent",
    "gan_eye_distance",
    "generate_corpus",
    "generate_image",
    "histogram",
    "kde_1d",
    "kde_2d",
    "ks_pvalue",
    "ks_two_sample",
    "load_landmark_file",
    "normalize_point",
    "normalized_eye_summary",
    "parse_landmark_record",
    "prevalence_report",
    "recall_at",
    "run_external_detector",
    "serialize_landmark_record",
]
