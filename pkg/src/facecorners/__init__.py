"""Facial feature corner point extraction via cumulative-histogram thresholding.

Twelve corner/nostril points plus a computed nose tip are located on six
face sub-regions: each ROI is binarized by thresholding its normalized
cumulative histogram, then searched linearly (eyebrows, eyes, mouth) or by
connected-component contours (nostrils).  An evaluation harness reports
per-region single/both/overall detection rates and threshold sweeps.
"""

from .cumhist import (
    CumulativeHistogram,
    Histogram,
    ThresholdConfig,
    binarize_roi,
    cumulative,
    filter_image,
    histogram,
)
from .detect import (
    Contour,
    FeaturePoints,
    NostrilPair,
    SearchMode,
    corner_search,
    detect_features,
    find_components,
    nose_tip,
    select_nostrils,
)
from .evaluate import (
    EvalSample,
    GroundTruth,
    RateReport,
    RegionOutcome,
    SweepResult,
    detection_rates,
    discover_samples,
    evaluate_samples,
    load_points_file,
    match_points,
    threshold_sweep,
)
from .geometry import LayoutConfig, Rect, RoiLayout, roi_layout
from .raster import BinaryImage, GrayImage, Point, crop, draw_markers, load_pgm, save_pgm

__version__ = "0.1.0"

__all__ = [
    "BinaryImage",
    "Contour",
    "CumulativeHistogram",
    "EvalSample",
    "FeaturePoints",
    "GrayImage",
    "GroundTruth",
    "Histogram",
    "LayoutConfig",
    "NostrilPair",
    "Point",
    "RateReport",
    "Rect",
    "RegionOutcome",
    "RoiLayout",
    "SearchMode",
    "SweepResult",
    "ThresholdConfig",
    "binarize_roi",
    "corner_search",
    "crop",
    "cumulative",
    "detect_features",
    "detection_rates",
    "discover_samples",
    "draw_markers",
    "evaluate_samples",
    "filter_image",
    "find_components",
    "histogram",
    "load_pgm",
    "load_points_file",
    "match_points",
    "nose_tip",
    "roi_layout",
    "save_pgm",
    "select_nostrils",
    "threshold_sweep",
]
