"""Synthetic frontal-face test image with known dark features.

The generated face is uniform gray with one dark bar per eyebrow ROI, a
dark ellipse per eye ROI, two dark 2x2 dots in the nose ROI (the left one
sits one row higher, so component encounter order is deterministic), and a
dark bar in the mouth ROI.  Blob sizes scale with the ROIs and stay inside
the default threshold budgets; the 2x2 nostril dots need a face of roughly
150x150 or larger to fit the nose threshold budget (the 200x200 default is
comfortable).
"""

from __future__ import annotations

import numpy as np

from .geometry import LayoutConfig, Rect, roi_layout
from .raster import GrayImage

BACKGROUND = 180


def _bar(canvas: np.ndarray, x: int, y: int, w: int, h: int, value: int) -> Rect:
    canvas[y : y + h, x : x + w] = value
    return Rect(x, y, w, h)


def _ellipse(canvas: np.ndarray, cx: int, cy: int, rx: int, ry: int, value: int) -> Rect:
    ys, xs = np.ogrid[: canvas.shape[0], : canvas.shape[1]]
    inside = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
    canvas[inside] = value
    return Rect(cx - rx, cy - ry, 2 * rx + 1, 2 * ry + 1)


def make_face(
    width: int = 200, height: int = 200, cfg: LayoutConfig | None = None
) -> tuple[GrayImage, dict[str, Rect]]:
    """Build the synthetic face; returns (image, blob bounding boxes).

    The bounding boxes are keyed eyebrow_right, eyebrow_left, eye_right,
    eye_left, nostril_right, nostril_left, mouth; all in face coordinates.
    """
    layout = roi_layout(width, height, cfg)
    canvas = np.full((height, width), BACKGROUND, dtype=np.uint8)
    blobs: dict[str, Rect] = {}

    def frac_point(rect: Rect, fx: float, fy: float) -> tuple[int, int]:
        return rect.x + int(rect.w * fx), rect.y + int(rect.h * fy)

    for name in ("eyebrow_right", "eyebrow_left"):
        rect = layout.rect(name)
        x, y = frac_point(rect, 0.3, 0.25)
        bar_w = max(2, round(rect.w * 0.08))
        bar_h = max(1, round(rect.h * 0.125))
        blobs[name] = _bar(canvas, x, y, bar_w, bar_h, 20)

    for name in ("eye_right", "eye_left"):
        rect = layout.rect(name)
        cx, cy = frac_point(rect, 0.5, 0.56)
        rx = max(2, round(rect.w * 0.107))
        ry = max(1, round(rect.h * 0.1))
        blobs[name] = _ellipse(canvas, cx, cy, rx, ry, 30)

    nose = layout.rect("nose")
    lx, ly = frac_point(nose, 0.36, 0.52)
    blobs["nostril_left"] = _bar(canvas, lx, ly, 2, 2, 10)
    rx_, ry_ = frac_point(nose, 0.60, 0.52)
    blobs["nostril_right"] = _bar(canvas, rx_, ry_ + 1, 2, 2, 10)

    mouth = layout.rect("mouth")
    mx, my = frac_point(mouth, 0.30, 0.30)
    bar_w = round(mouth.w * 0.4)
    bar_h = max(1, round(mouth.h * 0.125))
    blobs["mouth"] = _bar(canvas, mx, my, bar_w, bar_h, 25)

    return GrayImage(canvas), blobs
