"""Grayscale/binary raster types, bit-exact PGM I/O, cropping, and marker overlays.

Images are immutable: the backing numpy arrays are marked read-only at
construction, so values can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

if TYPE_CHECKING:
    from .detect import FeaturePoints
    from .geometry import Rect

# Marker geometry for overlays: plus arms of 4 px for detected points,
# a filled disc of radius 3 px for the computed nose tip, drawn in black.
PLUS_ARM = 4
DISC_RADIUS = 3
MARKER_INK = 0


class PgmParseError(ValueError):
    """Raised when a PGM byte stream cannot be decoded."""


class Point(NamedTuple):
    """Pixel coordinate: x = column (rightward), y = row (downward)."""

    x: int
    y: int


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel raster, shape (height, width), row-major."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D pixel array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"image dimensions must be >= 1, got {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", _freeze(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True)
class BinaryImage:
    """Raster whose pixels are exactly 0 or 255 (the filtering image)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D pixel array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"image dimensions must be >= 1, got {arr.shape}")
        if not np.all((arr == 0) | (arr == 255)):
            raise ValueError("binary image pixels must be exactly 0 or 255")
        object.__setattr__(self, "pixels", _freeze(arr.astype(np.uint8)))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def white_mask(self) -> np.ndarray:
        return self.pixels == 255

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


_WHITESPACE = b" \t\r\n\v\f"


class _HeaderScanner:
    """Tokenizer for netpbm headers; '#' comments run to end of line."""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def _skip_filler(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = self.data[self.pos : self.pos + 1]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == b"#":
                nl = data.find(b"\n", self.pos)
                self.pos = n if nl < 0 else nl + 1
            else:
                return

    def next_token(self) -> bytes:
        self._skip_filler()
        start = self.pos
        n = len(self.data)
        while self.pos < n and self.data[self.pos : self.pos + 1] not in _WHITESPACE:
            if self.data[self.pos : self.pos + 1] == b"#":
                break
            self.pos += 1
        if self.pos == start:
            raise PgmParseError("unexpected end of header")
        return self.data[start : self.pos]

    def next_int(self, what: str) -> int:
        tok = self.next_token()
        try:
            return int(tok)
        except ValueError:
            raise PgmParseError(f"non-numeric {what} field: {tok!r}") from None


def load_pgm(data: bytes) -> GrayImage:
    """Decode a PGM byte stream (binary P5 or plain P2, maxval <= 255).

    Pixel order is preserved row-major, top row first.  Raises
    PgmParseError on malformed magic, non-positive dimensions,
    maxval > 255, or a truncated pixel payload.
    """
    if len(data) < 2 or data[:2] not in (b"P5", b"P2"):
        raise PgmParseError(f"malformed magic number: {data[:2]!r} (expected P5 or P2)")
    magic = data[:2]
    scan = _HeaderScanner(data)
    scan.pos = 2
    width = scan.next_int("width")
    height = scan.next_int("height")
    if width <= 0 or height <= 0:
        raise PgmParseError(f"non-positive dimensions: {width}x{height}")
    maxval = scan.next_int("maxval")
    if maxval > 255:
        raise PgmParseError(f"maxval {maxval} unsupported (only 8-bit, maxval <= 255)")
    if maxval <= 0:
        raise PgmParseError(f"non-positive maxval: {maxval}")

    n = width * height
    if magic == b"P5":
        # Exactly one whitespace byte separates the header from raw pixels.
        if scan.pos >= len(data) or data[scan.pos : scan.pos + 1] not in _WHITESPACE:
            raise PgmParseError("missing whitespace after maxval")
        start = scan.pos + 1
        payload = data[start : start + n]
        if len(payload) < n:
            raise PgmParseError(
                f"truncated pixel payload: expected {n} bytes, got {len(payload)}"
            )
        flat = np.frombuffer(payload, dtype=np.uint8)
    else:
        values = []
        try:
            for _ in range(n):
                values.append(scan.next_int("pixel"))
        except PgmParseError as exc:
            raise PgmParseError(f"truncated pixel payload: {exc}") from None
        flat = np.asarray(values, dtype=np.int64)
    if flat.max(initial=0) > maxval:
        raise PgmParseError(f"pixel value exceeds maxval {maxval}")
    return GrayImage(flat.astype(np.uint8).reshape(height, width))


def save_pgm(img: GrayImage) -> bytes:
    """Encode as canonical binary PGM: ``P5\\n<w> <h>\\n255\\n`` + raw pixels."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def crop(img: GrayImage, rect: "Rect") -> GrayImage:
    """Copy the sub-image covered by rect; rect must lie fully inside img."""
    if rect.w < 1 or rect.h < 1:
        raise ValueError(f"degenerate crop rectangle: {rect}")
    if rect.x < 0 or rect.y < 0 or rect.x + rect.w > img.width or rect.y + rect.h > img.height:
        raise ValueError(
            f"crop rectangle {rect} exceeds image bounds {img.width}x{img.height}"
        )
    return GrayImage(img.pixels[rect.y : rect.y + rect.h, rect.x : rect.x + rect.w].copy())


def _check_inside(name: str, pt: Point, width: int, height: int) -> None:
    if not (0 <= pt.x < width and 0 <= pt.y < height):
        raise ValueError(
            f"{name} point ({pt.x}, {pt.y}) outside image bounds {width}x{height}"
        )


def draw_markers(img: GrayImage, pts: "FeaturePoints") -> GrayImage:
    """Render detected points onto a copy of img.

    Corner and nostril points get a plus symbol (arm length 4 px); the
    computed nose tip gets a filled disc (radius 3 px).  Strokes are
    clipped at the image borders; the source image is left unmodified.
    """
    named = pts.as_dict()
    for name, pt in named.items():
        _check_inside(name, pt, img.width, img.height)

    out = img.pixels.copy()
    h, w = out.shape
    for name, pt in named.items():
        if name == "nose_tip":
            for dy in range(-DISC_RADIUS, DISC_RADIUS + 1):
                yy = pt.y + dy
                if not 0 <= yy < h:
                    continue
                for dx in range(-DISC_RADIUS, DISC_RADIUS + 1):
                    xx = pt.x + dx
                    if 0 <= xx < w and dx * dx + dy * dy <= DISC_RADIUS * DISC_RADIUS:
                        out[yy, xx] = MARKER_INK
        else:
            x0 = max(pt.x - PLUS_ARM, 0)
            x1 = min(pt.x + PLUS_ARM, w - 1)
            y0 = max(pt.y - PLUS_ARM, 0)
            y1 = min(pt.y + PLUS_ARM, h - 1)
            out[pt.y, x0 : x1 + 1] = MARKER_INK
            out[y0 : y1 + 1, pt.x] = MARKER_INK
    return GrayImage(out)
