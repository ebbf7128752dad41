"""ROI layout: place the six face sub-regions inside a detected face box.

Region sizes are fixed fractions of the face dimensions (eyebrows
0.375W x 0.12H, eyes 0.375W x 0.25H, nose 0.50W x 0.19H, mouth
0.50W x 0.16H).  Anchor positions are configurable fractions; the
defaults put eyebrows/eyes mirrored in the upper halves, the nose
centered in the middle band and the mouth centered in the lower band.
All fractional arithmetic floors to integers so rects never exceed the
face bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

REGIONS = ("eyebrow_right", "eyebrow_left", "eye_right", "eye_left", "nose", "mouth")

# (width fraction, height fraction) per region.
SIZE_FRACTIONS = {
    "eyebrow_right": (0.375, 0.12),
    "eyebrow_left": (0.375, 0.12),
    "eye_right": (0.375, 0.25),
    "eye_left": (0.375, 0.25),
    "nose": (0.50, 0.19),
    "mouth": (0.50, 0.16),
}

MIN_FACE_SIZE = 40


class LayoutError(ValueError):
    """Raised when a face box is too small to carry the six ROIs."""


class Rect(NamedTuple):
    """Axis-aligned rectangle: (x, y) top-left corner, w x h extent."""

    x: int
    y: int
    w: int
    h: int

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    def contains(self, px: int, py: int) -> bool:
        return self.x <= px < self.x2 and self.y <= py < self.y2


@dataclass(frozen=True)
class LayoutConfig:
    """Anchor fractions (of face width/height) for each region's top-left corner."""

    eyebrow_right_x: float = 0.0875
    eyebrow_right_y: float = 0.18
    eyebrow_left_x: float = 0.5375
    eyebrow_left_y: float = 0.18
    eye_right_x: float = 0.0875
    eye_right_y: float = 0.26
    eye_left_x: float = 0.5375
    eye_left_y: float = 0.26
    nose_x: float = 0.25
    nose_y: float = 0.45
    mouth_x: float = 0.25
    mouth_y: float = 0.70

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"anchor fraction {f.name}={value} outside [0, 1]")
        for region in REGIONS:
            ax = getattr(self, f"{region}_x")
            ay = getattr(self, f"{region}_y")
            wf, hf = SIZE_FRACTIONS[region]
            if ax + wf > 1.0 + 1e-12 or ay + hf > 1.0 + 1e-12:
                raise ValueError(f"{region} anchor ({ax}, {ay}) pushes the ROI outside the face")

    def anchor(self, region: str) -> tuple[float, float]:
        return getattr(self, f"{region}_x"), getattr(self, f"{region}_y")


@dataclass(frozen=True)
class RoiLayout:
    """The six ROI rectangles, in face-image coordinates."""

    eyebrow_right: Rect
    eyebrow_left: Rect
    eye_right: Rect
    eye_left: Rect
    nose: Rect
    mouth: Rect

    def rect(self, region: str) -> Rect:
        return getattr(self, region)

    def rects(self) -> dict[str, Rect]:
        return {region: getattr(self, region) for region in REGIONS}


def roi_layout(face_w: int, face_h: int, cfg: LayoutConfig | None = None) -> RoiLayout:
    """Compute the six ROI rects for a face of face_w x face_h pixels.

    Sizes are floor(fraction * dimension); positions floor(anchor * dimension).
    Raises LayoutError for faces smaller than 40 px on either side, where
    flooring degenerates the smallest ROIs.
    """
    if cfg is None:
        cfg = LayoutConfig()
    if face_w < MIN_FACE_SIZE or face_h < MIN_FACE_SIZE:
        raise LayoutError(
            f"face {face_w}x{face_h} below the minimum {MIN_FACE_SIZE}x{MIN_FACE_SIZE}"
        )
    rects = {}
    for region in REGIONS:
        ax, ay = cfg.anchor(region)
        wf, hf = SIZE_FRACTIONS[region]
        rects[region] = Rect(
            x=math.floor(ax * face_w),
            y=math.floor(ay * face_h),
            w=math.floor(wf * face_w),
            h=math.floor(hf * face_h),
        )
    for region, r in rects.items():
        if r.x2 > face_w or r.y2 > face_h:
            raise LayoutError(f"{region} ROI {r} exceeds face bounds {face_w}x{face_h}")
    return RoiLayout(**rects)
