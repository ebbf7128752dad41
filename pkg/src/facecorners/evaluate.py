"""Dataset evaluation: ground-truth loading, hit matching, detection rates,
and threshold sweeps.

A detected point counts as a hit when its Euclidean distance to the
reference point is at most radius_frac times the inter-ocular distance
(default radius_frac 0.15).  Every report carries that criterion in its
header so the numbers are self-describing.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

from .cumhist import ThresholdConfig
from .detect import (
    COLUMN_MAJOR,
    DEFAULT_NOSE_TIP_Y_OFFSET,
    REGION_POINT_NAMES,
    REGION_ROI,
    REGIONS,
    FeaturePoints,
    detect_features,
    detect_region,
)
from .geometry import LayoutConfig, LayoutError, Rect, roi_layout
from .raster import GrayImage, PgmParseError, Point, crop, load_pgm

STATUS_BOTH = "both"
STATUS_SINGLE = "single"
STATUS_NONE = "none"

# Reference-point indices in the 20-point FGnet annotation scheme used by
# the BioID markup files.
DEFAULT_POINT_INDEX_MAP = {
    "eyebrow_right_outer": 4,
    "eyebrow_right_inner": 5,
    "eyebrow_left_inner": 6,
    "eyebrow_left_outer": 7,
    "eye_right_outer": 9,
    "eye_right_inner": 10,
    "eye_left_inner": 11,
    "eye_left_outer": 12,
    "nostril_right": 15,
    "nostril_left": 16,
    "mouth_right": 2,
    "mouth_left": 3,
}

DEFAULT_RADIUS_FRAC = 0.15

# Sweep grids matching the per-region threshold windows.
DEFAULT_SWEEP_RANGES = {
    "eyebrow_right": (0.01, 0.25, 0.01),
    "eyebrow_left": (0.01, 0.25, 0.01),
    "eye_right": (0.01, 0.10, 0.01),
    "eye_left": (0.01, 0.10, 0.01),
    "nostrils": (0.001, 0.010, 0.001),
    "mouth": (0.01, 0.10, 0.01),
}


class PointsFileError(ValueError):
    """Raised when a ground-truth annotation file cannot be parsed."""


@dataclass(frozen=True)
class GroundTruth:
    """Reference points (source-image coordinates) plus inter-ocular distance."""

    points: dict[str, tuple[float, float]]
    inter_ocular: float

    def __post_init__(self) -> None:
        if self.inter_ocular <= 0:
            raise ValueError(f"inter-ocular distance must be positive, got {self.inter_ocular}")


class RegionOutcome(NamedTuple):
    region: str
    status: str  # both | single | none


@dataclass(frozen=True)
class RegionRates:
    region: str
    both_rate: float
    single_rate: float
    overall_rate: float
    threshold: float | None


@dataclass(frozen=True)
class RateReport:
    rows: tuple[RegionRates, ...]
    average: RegionRates
    n_images: int
    radius_frac: float


@dataclass(frozen=True)
class SweepRow:
    th: float
    single_rate: float
    both_rate: float
    overall_rate: float


@dataclass(frozen=True)
class SweepResult:
    region: str
    rows: tuple[SweepRow, ...]
    best_th: float  # argmax of overall rate; ties go to the smallest threshold
    radius_frac: float
    decimals: int  # grid printing precision, derived from the step


@dataclass(frozen=True)
class EvalSample:
    """One evaluable image: cropped face, its origin in the source image,
    and the reference annotation (source-image coordinates)."""

    name: str
    face: GrayImage
    face_origin: Point
    truth: GroundTruth


@dataclass(frozen=True)
class SkippedImage:
    name: str
    reason: str


def _parse_coordinate_pair(line: str, index: int) -> tuple[float, float]:
    parts = line.split()
    if len(parts) != 2:
        raise PointsFileError(f"point {index}: expected 'x y', got {line!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise PointsFileError(f"point {index}: non-numeric coordinates {line!r}") from None


def _points_from_pts_text(text: str) -> list[tuple[float, float]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].lower().startswith("version:"):
        raise PointsFileError("missing 'version:' header")
    if len(lines) < 2 or not lines[1].lower().startswith("n_points:"):
        raise PointsFileError("missing 'n_points:' header")
    try:
        n_points = int(lines[1].split(":", 1)[1])
    except ValueError:
        raise PointsFileError(f"non-numeric n_points: {lines[1]!r}") from None
    if n_points <= 0:
        raise PointsFileError(f"n_points must be positive, got {n_points}")
    if len(lines) < 3 or lines[2] != "{":
        raise PointsFileError("missing '{' opening the point list")
    body = lines[3:]
    if "}" not in body:
        raise PointsFileError("missing '}' closing the point list")
    close = body.index("}")
    coord_lines = body[:close]
    if len(coord_lines) != n_points:
        raise PointsFileError(
            f"point count mismatch: header says {n_points}, file lists {len(coord_lines)}"
        )
    return [_parse_coordinate_pair(ln, i) for i, ln in enumerate(coord_lines)]


def _points_from_json(text: str) -> list[tuple[float, float]]:
    import json

    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PointsFileError(f"invalid JSON annotation: {exc}") from None
    if not isinstance(obj, dict) or "points" not in obj:
        raise PointsFileError("JSON annotation must be an object with a 'points' list")
    raw = obj["points"]
    if not isinstance(raw, list) or not raw:
        raise PointsFileError("'points' must be a nonempty list")
    declared = obj.get("n_points")
    if declared is not None and declared != len(raw):
        raise PointsFileError(
            f"point count mismatch: n_points says {declared}, list holds {len(raw)}"
        )
    points = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise PointsFileError(f"point {i}: expected [x, y], got {entry!r}")
        try:
            points.append((float(entry[0]), float(entry[1])))
        except (TypeError, ValueError):
            raise PointsFileError(f"point {i}: non-numeric coordinates {entry!r}") from None
    return points


def load_points_file(
    data: bytes,
    index_map: dict[str, int] | None = None,
    bounds: tuple[int, int] | None = None,
) -> GroundTruth:
    """Parse an annotation file into ground truth.

    Accepts the text format (``version:`` / ``n_points:`` headers and a
    brace-delimited ``x y`` list) or an equivalent JSON object with a
    ``points`` list.  index_map names which list index feeds each of the
    twelve reference points; bounds, when given as (width, height), makes
    out-of-bounds coordinates an error naming the point index.
    """
    if index_map is None:
        index_map = DEFAULT_POINT_INDEX_MAP
    text = data.decode("ascii", errors="replace")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        points = _points_from_json(text)
    else:
        points = _points_from_pts_text(text)

    if bounds is not None:
        width, height = bounds
        for i, (x, y) in enumerate(points):
            if not (0 <= x < width and 0 <= y < height):
                raise PointsFileError(
                    f"point {i} at ({x}, {y}) outside image bounds {width}x{height}"
                )

    mapped: dict[str, tuple[float, float]] = {}
    for name, idx in index_map.items():
        if not 0 <= idx < len(points):
            raise PointsFileError(
                f"index map entry {name}={idx} outside the {len(points)}-point list"
            )
        mapped[name] = points[idx]

    right_center = _midpoint(mapped["eye_right_outer"], mapped["eye_right_inner"])
    left_center = _midpoint(mapped["eye_left_inner"], mapped["eye_left_outer"])
    iod = math.dist(right_center, left_center)
    if iod <= 0:
        raise PointsFileError("eye centers coincide; inter-ocular distance is zero")
    return GroundTruth(points=mapped, inter_ocular=iod)


def _midpoint(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


def _status_from_count(matched: int) -> str:
    return (STATUS_NONE, STATUS_SINGLE, STATUS_BOTH)[matched]


def _match_region(
    detected: dict[str, Point], truth: GroundTruth, region: str, radius: float
) -> str:
    matched = 0
    for name in REGION_POINT_NAMES[region]:
        pt = detected.get(name)
        ref = truth.points.get(name)
        if pt is None or ref is None:
            continue
        if math.dist((pt.x, pt.y), ref) <= radius:
            matched += 1
    return _status_from_count(matched)


def match_points(
    detected: FeaturePoints, truth: GroundTruth, radius_frac: float
) -> list[RegionOutcome]:
    """Per-region hit status for one image; absent detections never match."""
    if radius_frac <= 0:
        raise ValueError(f"radius_frac must be positive, got {radius_frac}")
    radius = radius_frac * truth.inter_ocular
    named = detected.as_dict()
    return [
        RegionOutcome(region, _match_region(named, truth, region, radius))
        for region in REGIONS
    ]


def detection_rates(
    outcomes: Sequence[Sequence[RegionOutcome]],
    thresholds: ThresholdConfig | None = None,
    radius_frac: float = DEFAULT_RADIUS_FRAC,
) -> RateReport:
    """Aggregate per-image outcomes into per-region both/single/overall rates.

    overall is exactly both + single; the averages row is the arithmetic
    mean across the six regions.
    """
    n = len(outcomes)
    if n == 0:
        raise ValueError("empty evaluation: no images to aggregate")
    counts = {region: {STATUS_BOTH: 0, STATUS_SINGLE: 0, STATUS_NONE: 0} for region in REGIONS}
    for image_outcomes in outcomes:
        seen = set()
        for outcome in image_outcomes:
            if outcome.region not in counts:
                raise ValueError(f"unknown region {outcome.region!r}")
            if outcome.region in seen:
                raise ValueError(f"duplicate outcome for region {outcome.region!r}")
            seen.add(outcome.region)
            counts[outcome.region][outcome.status] += 1

    rows = []
    for region in REGIONS:
        both = 100.0 * counts[region][STATUS_BOTH] / n
        single = 100.0 * counts[region][STATUS_SINGLE] / n
        th = thresholds.for_region(REGION_ROI[region]) if thresholds else None
        rows.append(
            RegionRates(
                region=region,
                both_rate=both,
                single_rate=single,
                overall_rate=both + single,
                threshold=th,
            )
        )
    k = len(rows)
    average = RegionRates(
        region="average",
        both_rate=sum(r.both_rate for r in rows) / k,
        single_rate=sum(r.single_rate for r in rows) / k,
        overall_rate=sum(r.overall_rate for r in rows) / k,
        threshold=None,
    )
    return RateReport(rows=tuple(rows), average=average, n_images=n, radius_frac=radius_frac)


def evaluate_sample(
    sample: EvalSample,
    thresholds: ThresholdConfig,
    radius_frac: float = DEFAULT_RADIUS_FRAC,
    layout_cfg: LayoutConfig | None = None,
    *,
    scan_order: str = COLUMN_MAJOR,
    nose_tip_y_offset: int = DEFAULT_NOSE_TIP_Y_OFFSET,
    min_component_area: int = 0,
) -> list[RegionOutcome]:
    """Detect on one sample's face and match against its ground truth."""
    layout = roi_layout(sample.face.width, sample.face.height, layout_cfg)
    points = detect_features(
        sample.face,
        layout,
        thresholds,
        scan_order=scan_order,
        nose_tip_y_offset=nose_tip_y_offset,
        min_component_area=min_component_area,
    ).translate(sample.face_origin.x, sample.face_origin.y)
    return match_points(points, sample.truth, radius_frac)


def _map_samples(
    samples: Sequence[EvalSample], worker: Callable, jobs: int
) -> list:
    if jobs <= 1 or len(samples) <= 1:
        return [worker(s) for s in samples]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, samples))


def evaluate_samples(
    samples: Sequence[EvalSample],
    thresholds: ThresholdConfig | None = None,
    radius_frac: float = DEFAULT_RADIUS_FRAC,
    layout_cfg: LayoutConfig | None = None,
    *,
    scan_order: str = COLUMN_MAJOR,
    nose_tip_y_offset: int = DEFAULT_NOSE_TIP_Y_OFFSET,
    min_component_area: int = 0,
    jobs: int = 1,
) -> RateReport:
    """Evaluate a whole dataset; per-image work may run in parallel, the
    aggregation is order-independent."""
    if thresholds is None:
        thresholds = ThresholdConfig()

    def worker(sample: EvalSample) -> list[RegionOutcome]:
        return evaluate_sample(
            sample,
            thresholds,
            radius_frac,
            layout_cfg,
            scan_order=scan_order,
            nose_tip_y_offset=nose_tip_y_offset,
            min_component_area=min_component_area,
        )

    per_image = _map_samples(samples, worker, jobs)
    return detection_rates(per_image, thresholds=thresholds, radius_frac=radius_frac)


def _step_decimals(step: float) -> int:
    exponent = Decimal(repr(step)).normalize().as_tuple().exponent
    return max(0, -int(exponent))


def sweep_grid(th_min: float, th_max: float, step: float) -> tuple[list[float], int]:
    """Thresholds k*step inside [th_min, th_max], snapped to step multiples;
    returns the grid and its printing precision."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if not th_min < th_max:
        raise ValueError(f"inverted sweep range: [{th_min}, {th_max}]")
    decimals = _step_decimals(step)
    eps = step * 1e-9
    k_lo = math.ceil((th_min - eps) / step)
    k_hi = math.floor((th_max + eps) / step)
    grid = [round(k * step, decimals + 2) for k in range(k_lo, k_hi + 1)]
    grid = [th for th in grid if th > 0]
    if not grid:
        raise ValueError(f"no step multiples of {step} inside [{th_min}, {th_max}]")
    return grid, decimals


def threshold_sweep(
    samples: Sequence[EvalSample],
    region: str,
    th_min: float,
    th_max: float,
    step: float,
    radius_frac: float = DEFAULT_RADIUS_FRAC,
    layout_cfg: LayoutConfig | None = None,
    *,
    scan_order: str = COLUMN_MAJOR,
    nose_tip_y_offset: int = DEFAULT_NOSE_TIP_Y_OFFSET,
    min_component_area: int = 0,
    jobs: int = 1,
) -> SweepResult:
    """Detection rates for one region across a threshold grid.

    Only the chosen region is re-detected per grid value.  best_th is the
    threshold with the highest overall rate (ties break to the smallest).
    """
    if region not in REGIONS:
        raise ValueError(f"unknown region {region!r}; expected one of {REGIONS}")
    if not samples:
        raise ValueError("empty dataset: nothing to sweep")
    if radius_frac <= 0:
        raise ValueError(f"radius_frac must be positive, got {radius_frac}")
    grid, decimals = sweep_grid(th_min, th_max, step)
    roi_name = REGION_ROI[region]

    def status_at(sample: EvalSample, th: float) -> str:
        layout = roi_layout(sample.face.width, sample.face.height, layout_cfg)
        points = detect_region(
            sample.face,
            region,
            layout.rect(roi_name),
            th,
            scan_order=scan_order,
            nose_tip_y_offset=nose_tip_y_offset,
            min_component_area=min_component_area,
        )
        origin = sample.face_origin
        moved = {name: Point(p.x + origin.x, p.y + origin.y) for name, p in points.items()}
        return _match_region(moved, sample.truth, region, radius_frac * sample.truth.inter_ocular)

    n = len(samples)
    rows = []
    for th in grid:
        statuses = _map_samples(samples, lambda s, t=th: status_at(s, t), jobs)
        both = 100.0 * sum(1 for s in statuses if s == STATUS_BOTH) / n
        single = 100.0 * sum(1 for s in statuses if s == STATUS_SINGLE) / n
        rows.append(SweepRow(th=th, single_rate=single, both_rate=both, overall_rate=both + single))

    best = rows[0]
    for row in rows[1:]:
        if row.overall_rate > best.overall_rate:
            best = row
    return SweepResult(
        region=region,
        rows=tuple(rows),
        best_th=best.th,
        radius_frac=radius_frac,
        decimals=decimals,
    )


# ---------------------------------------------------------------------------
# Dataset discovery
# ---------------------------------------------------------------------------

def parse_face_rect(text: str) -> Rect:
    """Parse 'x y w h' (whitespace- or comma-separated) into a Rect."""
    parts = text.replace(",", " ").split()
    if len(parts) != 4:
        raise ValueError(f"face rect needs four integers 'x y w h', got {text!r}")
    try:
        x, y, w, h = (int(p) for p in parts)
    except ValueError:
        raise ValueError(f"face rect fields must be integers, got {text!r}") from None
    if w < 1 or h < 1:
        raise ValueError(f"face rect has degenerate size {w}x{h}")
    if x < 0 or y < 0:
        raise ValueError(f"face rect origin ({x}, {y}) is negative")
    return Rect(x, y, w, h)


def _find_sidecar(stem: str, suffixes: Sequence[str], dirs: Sequence[Path]) -> Path | None:
    for d in dirs:
        for s in suffixes:
            for candidate_stem in (stem, stem.lower()):
                p = d / f"{candidate_stem}{s}"
                if p.is_file():
                    return p
    return None


def discover_samples(
    image_dir: Path | str,
    annotations_dir: Path | str | None = None,
    *,
    index_map: dict[str, int] | None = None,
    layout_cfg: LayoutConfig | None = None,
) -> tuple[list[EvalSample], list[SkippedImage]]:
    """Pair up images with face-rect and ground-truth sidecars by basename.

    img.pgm pairs with img.face (face box 'x y w h') and img.pts (or .json).
    Images missing a sidecar, unreadable, or with an out-of-bounds or
    undersized face box are skipped with a reason, not fatal.
    """
    image_dir = Path(image_dir)
    ann_dir = Path(annotations_dir) if annotations_dir is not None else image_dir
    samples: list[EvalSample] = []
    skipped: list[SkippedImage] = []

    for img_path in sorted(image_dir.glob("*.pgm")):
        stem = img_path.stem
        face_path = _find_sidecar(stem, [".face"], [image_dir, ann_dir])
        if face_path is None:
            skipped.append(SkippedImage(stem, "missing .face sidecar"))
            continue
        pts_path = _find_sidecar(stem, [".pts", ".json"], [ann_dir, image_dir])
        if pts_path is None:
            skipped.append(SkippedImage(stem, "missing ground-truth annotation"))
            continue
        try:
            image = load_pgm(img_path.read_bytes())
        except PgmParseError as exc:
            skipped.append(SkippedImage(stem, f"unreadable image: {exc}"))
            continue
        try:
            rect = parse_face_rect(face_path.read_text())
            if rect.x2 > image.width or rect.y2 > image.height:
                raise ValueError(
                    f"face rect {tuple(rect)} exceeds image bounds {image.width}x{image.height}"
                )
        except ValueError as exc:
            skipped.append(SkippedImage(stem, f"bad face rect: {exc}"))
            continue
        try:
            face = crop(image, rect)
            roi_layout(face.width, face.height, layout_cfg)
        except (LayoutError, ValueError) as exc:
            skipped.append(SkippedImage(stem, f"unusable face box: {exc}"))
            continue
        try:
            truth = load_points_file(
                pts_path.read_bytes(),
                index_map=index_map,
                bounds=(image.width, image.height),
            )
        except PointsFileError as exc:
            skipped.append(SkippedImage(stem, f"bad annotation: {exc}"))
            continue
        samples.append(
            EvalSample(name=stem, face=face, face_origin=Point(rect.x, rect.y), truth=truth)
        )
    return samples, skipped


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def _criterion_line(radius_frac: float) -> str:
    return f"# hit criterion: distance <= {radius_frac:.4f} * inter-ocular distance"


def render_rates_csv(report: RateReport) -> str:
    """Table-style CSV: region,both,single,overall,threshold plus averages row."""
    lines = [_criterion_line(report.radius_frac), "region,both,single,overall,threshold"]
    for row in (*report.rows, report.average):
        th = "-" if row.threshold is None else f"{row.threshold:.3f}"
        lines.append(
            f"{row.region},{row.both_rate:.2f},{row.single_rate:.2f},{row.overall_rate:.2f},{th}"
        )
    return "\n".join(lines) + "\n"


def render_rates_table(report: RateReport) -> str:
    """Human-readable version of the rate report."""
    header = (
        f"Detection rates over {report.n_images} image(s); "
        f"hit: distance <= {report.radius_frac:.4f} * inter-ocular\n"
    )
    lines = [header, f"{'region':<16}{'both %':>10}{'single %':>10}{'overall %':>11}{'threshold':>11}"]
    for row in (*report.rows, report.average):
        th = "-" if row.threshold is None else f"{row.threshold:.3f}"
        lines.append(
            f"{row.region:<16}{row.both_rate:>10.2f}{row.single_rate:>10.2f}"
            f"{row.overall_rate:>11.2f}{th:>11}"
        )
    return "\n".join(lines) + "\n"


def render_sweep_csv(result: SweepResult) -> str:
    """Sweep CSV: th,single,both,overall rows at 4-decimal rates."""
    fmt = f"{{:.{result.decimals}f}}"
    lines = [
        _criterion_line(result.radius_frac)
        + f"; region={result.region}; argmax_th={fmt.format(result.best_th)}",
        "th,single,both,overall",
    ]
    for row in result.rows:
        lines.append(
            f"{fmt.format(row.th)},{row.single_rate:.4f},{row.both_rate:.4f},{row.overall_rate:.4f}"
        )
    return "\n".join(lines) + "\n"
