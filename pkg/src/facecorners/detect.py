"""Feature point detection on the six face ROIs.

Eyebrow, eye and mouth corners come from a directional linear search for
the first white pixel of the region's filtering image; nostrils come from
connected-component contours of the nose filtering image (right nostril =
max-x element of the last contour, left nostril = min-x element of the
previous-last contour); the nose tip is computed from the nostrils, never
detected directly.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .cumhist import ThresholdConfig, binarize_roi
from .geometry import Rect, RoiLayout
from .raster import BinaryImage, GrayImage, Point, crop

COLUMN_MAJOR = "column_major"
ROW_MAJOR = "row_major"

DEFAULT_NOSE_TIP_Y_OFFSET = 8

_EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


class SearchMode(NamedTuple):
    """Traversal direction for the first-white-pixel search."""

    vertical: str  # "top_down" | "bottom_up"
    horizontal_start: str  # "from_left" | "from_right"


# Eyebrows search downward, eyes and mouth upward; the from_left scan finds
# the image-left extremity of the blob, from_right the image-right one.
SEARCH_MODES = {
    "eyebrow": {
        "from_left": SearchMode("top_down", "from_left"),
        "from_right": SearchMode("top_down", "from_right"),
    },
    "eye": {
        "from_left": SearchMode("bottom_up", "from_left"),
        "from_right": SearchMode("bottom_up", "from_right"),
    },
    "mouth": {
        "from_left": SearchMode("bottom_up", "from_left"),
        "from_right": SearchMode("bottom_up", "from_right"),
    },
}

# The six evaluated regions and the pair of point names each contributes.
# "nostrils" shares the nose ROI and threshold.
REGIONS = ("eyebrow_right", "eyebrow_left", "eye_right", "eye_left", "nostrils", "mouth")
REGION_POINT_NAMES = {
    "eyebrow_right": ("eyebrow_right_outer", "eyebrow_right_inner"),
    "eyebrow_left": ("eyebrow_left_inner", "eyebrow_left_outer"),
    "eye_right": ("eye_right_outer", "eye_right_inner"),
    "eye_left": ("eye_left_inner", "eye_left_outer"),
    "nostrils": ("nostril_right", "nostril_left"),
    "mouth": ("mouth_right", "mouth_left"),
}
POINT_NAMES = tuple(n for region in REGIONS for n in REGION_POINT_NAMES[region])

# ROI rect / threshold slot backing each region.
REGION_ROI = {
    "eyebrow_right": "eyebrow_right",
    "eyebrow_left": "eyebrow_left",
    "eye_right": "eye_right",
    "eye_left": "eye_left",
    "nostrils": "nose",
    "mouth": "mouth",
}

# region -> point name keyed by which side the linear search starts from.
# Anatomical naming: for right-side regions the from_left hit is the outer
# corner, for left-side regions it is the inner one.
_SEARCH_POINT_NAMES = {
    "eyebrow_right": {"from_left": "eyebrow_right_outer", "from_right": "eyebrow_right_inner"},
    "eyebrow_left": {"from_left": "eyebrow_left_inner", "from_right": "eyebrow_left_outer"},
    "eye_right": {"from_left": "eye_right_outer", "from_right": "eye_right_inner"},
    "eye_left": {"from_left": "eye_left_inner", "from_right": "eye_left_outer"},
    "mouth": {"from_left": "mouth_right", "from_right": "mouth_left"},
}


@dataclass(frozen=True)
class Contour:
    """Boundary points of one white 8-connected component, sorted by (x, y)."""

    component_id: int
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("contour must contain at least one point")


class NostrilPair(NamedTuple):
    right: Point
    left: Point


@dataclass(frozen=True)
class FeaturePoints:
    """Detected points in face-image coordinates; absent fields are None.

    The nose tip is present exactly when both nostrils are.
    """

    eyebrow_right_outer: Point | None = None
    eyebrow_right_inner: Point | None = None
    eyebrow_left_inner: Point | None = None
    eyebrow_left_outer: Point | None = None
    eye_right_outer: Point | None = None
    eye_right_inner: Point | None = None
    eye_left_inner: Point | None = None
    eye_left_outer: Point | None = None
    nostril_right: Point | None = None
    nostril_left: Point | None = None
    mouth_right: Point | None = None
    mouth_left: Point | None = None
    nose_tip: Point | None = None

    def __post_init__(self) -> None:
        has_pair = self.nostril_right is not None and self.nostril_left is not None
        if (self.nose_tip is not None) != has_pair:
            raise ValueError("nose_tip must be present exactly when both nostrils are")

    def as_dict(self) -> dict[str, Point]:
        """Present points keyed by name, in canonical field order."""
        return {
            f.name: pt for f in fields(self) if (pt := getattr(self, f.name)) is not None
        }

    def region_points(self, region: str) -> tuple[Point | None, Point | None]:
        a, b = REGION_POINT_NAMES[region]
        return getattr(self, a), getattr(self, b)

    def detected_regions(self) -> list[str]:
        return [
            region
            for region in REGIONS
            if any(pt is not None for pt in self.region_points(region))
        ]

    def nostrils(self) -> NostrilPair | None:
        if self.nostril_right is None or self.nostril_left is None:
            return None
        return NostrilPair(self.nostril_right, self.nostril_left)

    def translate(self, dx: int, dy: int) -> "FeaturePoints":
        moved = {
            f.name: (None if (pt := getattr(self, f.name)) is None else Point(pt.x + dx, pt.y + dy))
            for f in fields(self)
        }
        return FeaturePoints(**moved)


def corner_search(
    bin_img: BinaryImage, mode: SearchMode, scan_order: str = COLUMN_MAJOR
) -> Point | None:
    """First white pixel under a directional traversal, or None if all black.

    Column-major (default): columns advance from the horizontal_start side,
    rows within a column advance in the vertical direction.  Row-major swaps
    the two keys (first-white-pixel per row sweep) and exists for comparison.
    """
    ys, xs = np.nonzero(bin_img.white_mask())
    if ys.size == 0:
        return None
    h, w = bin_img.pixels.shape
    col_key = xs if mode.horizontal_start == "from_left" else (w - 1) - xs
    row_key = ys if mode.vertical == "top_down" else (h - 1) - ys
    if scan_order == COLUMN_MAJOR:
        rank = col_key.astype(np.int64) * h + row_key
    elif scan_order == ROW_MAJOR:
        rank = row_key.astype(np.int64) * w + col_key
    else:
        raise ValueError(f"unknown scan order {scan_order!r}")
    i = int(np.argmin(rank))
    return Point(int(xs[i]), int(ys[i]))


def find_components(bin_img: BinaryImage, min_area: int = 0) -> list[Contour]:
    """Contours of the white 8-connected components, in first-encounter
    raster order (rows top to bottom, columns left to right).

    A component pixel is a contour point when any 4-neighbor is background
    or outside the image.  Components smaller than min_area pixels are
    dropped (min_area=0 keeps everything).
    """
    mask = bin_img.white_mask()
    labels, count = ndimage.label(mask, structure=_EIGHT_CONNECTED)
    if count == 0:
        return []

    padded = np.pad(mask, 1, constant_values=False)
    surrounded = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    boundary = mask & ~surrounded

    flat = labels.ravel()
    label_ids, first_index = np.unique(flat, return_index=True)
    order = [
        int(lbl)
        for lbl, _ in sorted(
            ((lbl, idx) for lbl, idx in zip(label_ids, first_index) if lbl != 0),
            key=lambda pair: pair[1],
        )
    ]

    contours = []
    for seq, lbl in enumerate(order, start=1):
        component = labels == lbl
        if min_area > 0 and int(component.sum()) < min_area:
            continue
        ys, xs = np.nonzero(component & boundary)
        sorted_idx = np.lexsort((ys, xs))
        points = tuple(Point(int(xs[i]), int(ys[i])) for i in sorted_idx)
        contours.append(Contour(component_id=seq, points=points))
    return contours


def select_nostrils(contours: list[Contour]) -> NostrilPair | None:
    """Pick nostril candidates from the nose filtering image's contours.

    Needs at least two contours: the last one (in the given order) supplies
    the right nostril as its max-x element, the previous-last supplies the
    left nostril as its min-x element; x-ties break by ascending y.
    """
    if len(contours) < 2:
        return None
    last = sorted(contours[-1].points)
    previous = sorted(contours[-2].points)
    return NostrilPair(right=last[-1], left=previous[0])


def nose_tip(pair: NostrilPair, y_offset: int = DEFAULT_NOSE_TIP_Y_OFFSET) -> Point:
    """Nose tip: x midway between the nostrils (floored), y the higher
    nostril minus y_offset, clamped at the top edge."""
    x = (pair.right.x + pair.left.x) // 2
    y = max(0, min(pair.right.y, pair.left.y) - y_offset)
    return Point(x, y)


def _search_region_points(
    bin_img: BinaryImage, region: str, scan_order: str
) -> dict[str, Point]:
    kind = "eyebrow" if region.startswith("eyebrow") else ("eye" if region.startswith("eye") else "mouth")
    found = {}
    for side in ("from_left", "from_right"):
        pt = corner_search(bin_img, SEARCH_MODES[kind][side], scan_order)
        if pt is not None:
            found[_SEARCH_POINT_NAMES[region][side]] = pt
    return found


def detect_region(
    face: GrayImage,
    region: str,
    rect: Rect,
    th: float,
    *,
    scan_order: str = COLUMN_MAJOR,
    nose_tip_y_offset: int = DEFAULT_NOSE_TIP_Y_OFFSET,
    min_component_area: int = 0,
) -> dict[str, Point]:
    """Run one region's sub-pipeline; returns present points (face coords).

    For "nostrils" the dict may also carry "nose_tip".
    """
    if rect.x < 0 or rect.y < 0 or rect.x2 > face.width or rect.y2 > face.height:
        raise ValueError(f"{region} ROI {rect} outside face bounds {face.width}x{face.height}")
    binary = binarize_roi(crop(face, rect), th)
    if region == "nostrils":
        pair = select_nostrils(find_components(binary, min_area=min_component_area))
        if pair is None:
            return {}
        moved = NostrilPair(
            right=Point(pair.right.x + rect.x, pair.right.y + rect.y),
            left=Point(pair.left.x + rect.x, pair.left.y + rect.y),
        )
        return {
            "nostril_right": moved.right,
            "nostril_left": moved.left,
            "nose_tip": nose_tip(moved, y_offset=nose_tip_y_offset),
        }
    found = _search_region_points(binary, region, scan_order)
    return {name: Point(pt.x + rect.x, pt.y + rect.y) for name, pt in found.items()}


def detect_features(
    face: GrayImage,
    layout: RoiLayout,
    th: ThresholdConfig,
    *,
    scan_order: str = COLUMN_MAJOR,
    nose_tip_y_offset: int = DEFAULT_NOSE_TIP_Y_OFFSET,
    min_component_area: int = 0,
) -> FeaturePoints:
    """Full detection pass over the six ROIs of one face image.

    Each ROI is cropped, filtered at its region threshold, and searched;
    results come back in face-image coordinates.  Regions whose filtering
    image is empty simply leave their fields absent.
    """
    found: dict[str, Point] = {}
    for region in REGIONS:
        roi_name = REGION_ROI[region]
        found.update(
            detect_region(
                face,
                region,
                layout.rect(roi_name),
                th.for_region(roi_name),
                scan_order=scan_order,
                nose_tip_y_offset=nose_tip_y_offset,
                min_component_area=min_component_area,
            )
        )
    return FeaturePoints(**found)


def shift_layout(layout: RoiLayout, dx: int, dy: int) -> RoiLayout:
    """Translate every ROI rect; used when the face sits inside a larger canvas."""
    moved = {
        name: Rect(r.x + dx, r.y + dy, r.w, r.h) for name, r in layout.rects().items()
    }
    return replace(layout, **moved)
