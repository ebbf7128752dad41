"""Cumulative-histogram filtering: histogram, normalized CDF, binary threshold.

A pixel turns white when the cumulative fraction of pixels at or below its
gray level does not exceed the threshold, i.e. the white set is the darkest
slice of the image.  The comparison is evaluated in count space,
``prefix_count[v] <= th * N``, so bin-boundary decisions follow one
consistent rounding rule instead of per-bin division rounding; boundary
equality yields white.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, fields

import numpy as np

from .raster import BinaryImage, GrayImage

# Per-region threshold windows probed during evaluation.  Values outside a
# window are allowed (sweeps may probe past it) but draw a warning.
THRESHOLD_WINDOWS = {
    "eyebrow_right": (0.01, 0.25),
    "eyebrow_left": (0.01, 0.25),
    "eye_right": (0.01, 0.10),
    "eye_left": (0.01, 0.10),
    "nose": (0.001, 0.010),
    "mouth": (0.01, 0.10),
}


@dataclass(frozen=True)
class Histogram:
    """256 bin counts plus the pixel total they sum to."""

    counts: np.ndarray
    total: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.shape != (256,):
            raise ValueError(f"expected 256 bins, got shape {arr.shape}")
        if arr.min() < 0:
            raise ValueError("negative bin count")
        if int(arr.sum()) != self.total:
            raise ValueError(f"bin counts sum to {int(arr.sum())}, not total={self.total}")
        arr.flags.writeable = False
        object.__setattr__(self, "counts", arr)

    def probabilities(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("empty histogram has no probabilities")
        return self.counts / self.total


@dataclass(frozen=True)
class CumulativeHistogram:
    """Prefix counts and the normalized CDF over gray levels 0..255."""

    prefix_counts: np.ndarray
    total: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.prefix_counts, dtype=np.int64)
        if arr.shape != (256,):
            raise ValueError(f"expected 256 prefix bins, got shape {arr.shape}")
        if self.total <= 0:
            raise ValueError("empty image: cumulative histogram undefined for total == 0")
        if np.any(np.diff(arr) < 0) or arr[0] < 0:
            raise ValueError("prefix counts must be nondecreasing and nonnegative")
        if int(arr[-1]) != self.total:
            raise ValueError(f"prefix counts end at {int(arr[-1])}, not total={self.total}")
        arr.flags.writeable = False
        object.__setattr__(self, "prefix_counts", arr)

    @property
    def cdf(self) -> np.ndarray:
        return self.prefix_counts / self.total


@dataclass(frozen=True)
class ThresholdConfig:
    """Per-region cumulative-histogram thresholds.

    Defaults are the best-performing values from the reference evaluation:
    0.220 / 0.240 (eyebrows), 0.070 / 0.060 (eyes), 0.004 (nose),
    0.060 (mouth).
    """

    th_eyebrow_right: float = 0.220
    th_eyebrow_left: float = 0.240
    th_eye_right: float = 0.070
    th_eye_left: float = 0.060
    th_nose: float = 0.004
    th_mouth: float = 0.060

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{f.name}={value} outside (0, 1]")
            region = f.name[3:]
            lo, hi = THRESHOLD_WINDOWS[region]
            if not lo <= value <= hi:
                warnings.warn(
                    f"{f.name}={value} outside the usual window [{lo}, {hi}]",
                    stacklevel=2,
                )

    def for_region(self, region: str) -> float:
        return getattr(self, f"th_{region}")

    def replace_region(self, region: str, th: float) -> "ThresholdConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        key = f"th_{region}"
        if key not in values:
            raise ValueError(f"unknown region {region!r}")
        values[key] = th
        return ThresholdConfig(**values)


def histogram(img: GrayImage) -> Histogram:
    """Count pixels per gray level; total equals width * height."""
    counts = np.bincount(img.pixels.ravel(), minlength=256)
    return Histogram(counts=counts, total=int(img.pixels.size))


def cumulative(h: Histogram) -> CumulativeHistogram:
    """Prefix-sum the histogram; cdf[255] is exactly 1 for any nonempty image."""
    if h.total == 0:
        raise ValueError("empty image: cumulative histogram undefined for total == 0")
    return CumulativeHistogram(prefix_counts=np.cumsum(h.counts), total=h.total)


def filter_image(img: GrayImage, ch: CumulativeHistogram, th: float) -> BinaryImage:
    """Binarize: white (255) where the cumulative fraction at the pixel's
    gray level is <= th, black (0) elsewhere.

    ch must come from img's own histogram; th must lie in (0, 1].
    """
    if not 0.0 < th <= 1.0:
        raise ValueError(f"threshold {th} outside (0, 1]")
    if ch.total != img.pixels.size:
        raise ValueError(
            f"cumulative histogram total {ch.total} does not match image size {img.pixels.size}"
        )
    white = ch.prefix_counts[img.pixels] <= th * ch.total
    return BinaryImage(np.where(white, 255, 0).astype(np.uint8))


def binarize_roi(img: GrayImage, th: float) -> BinaryImage:
    """Histogram -> cumulative -> filter, end to end on one ROI."""
    return filter_image(img, cumulative(histogram(img)), th)
