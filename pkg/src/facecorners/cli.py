"""Command-line front end: detect | evaluate | sweep.

facecorners detect IMAGE [--face-rect X,Y,W,H | --whole-image] [--overlay OUT]
facecorners evaluate DATASET_DIR [--annotations DIR] [--out-dir DIR]
facecorners sweep DATASET_DIR --region R [--th-min A --th-max B --step S]

All commands honor --config FILE (JSON); explicit flags override file
values.  Reports are CSV plus a rendered PNG figure next to each CSV.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .cumhist import ThresholdConfig
from .detect import (
    COLUMN_MAJOR,
    POINT_NAMES,
    REGIONS,
    ROW_MAJOR,
    FeaturePoints,
    detect_features,
)
from .evaluate import (
    DEFAULT_RADIUS_FRAC,
    DEFAULT_SWEEP_RANGES,
    discover_samples,
    evaluate_samples,
    parse_face_rect,
    render_rates_csv,
    render_rates_table,
    render_sweep_csv,
    threshold_sweep,
)
from .geometry import LayoutConfig, LayoutError, Rect, roi_layout
from .raster import PgmParseError, crop, draw_markers, load_pgm, save_pgm

THRESHOLD_KEYS = ("eyebrow_right", "eyebrow_left", "eye_right", "eye_left", "nose", "mouth")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOTHING_DETECTED = 2


@dataclasses.dataclass
class RunConfig:
    """Aggregated runtime configuration for all subcommands."""

    thresholds: ThresholdConfig = dataclasses.field(default_factory=ThresholdConfig)
    layout: LayoutConfig = dataclasses.field(default_factory=LayoutConfig)
    radius_frac: float = DEFAULT_RADIUS_FRAC
    nose_tip_y_offset: int = 8
    scan_order: str = COLUMN_MAJOR
    min_component_area: int = 0
    point_index_map: dict[str, int] | None = None


class ConfigError(ValueError):
    """Raised for unreadable or malformed configuration files."""


def load_config(path: Path | str) -> RunConfig:
    """Load a JSON config file; unknown keys are an error."""
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError("config file must hold a JSON object")

    known = {
        "thresholds",
        "layout",
        "radius_frac",
        "nose_tip_y_offset",
        "scan_order",
        "min_component_area",
        "point_index_map",
    }
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    cfg = RunConfig()
    try:
        if "thresholds" in obj:
            bad = set(obj["thresholds"]) - set(THRESHOLD_KEYS)
            if bad:
                raise ConfigError(f"unknown threshold regions: {sorted(bad)}")
            cfg.thresholds = ThresholdConfig(
                **{f"th_{k}": float(v) for k, v in obj["thresholds"].items()}
            )
        if "layout" in obj:
            cfg.layout = LayoutConfig(**{k: float(v) for k, v in obj["layout"].items()})
        if "radius_frac" in obj:
            cfg.radius_frac = float(obj["radius_frac"])
        if "nose_tip_y_offset" in obj:
            cfg.nose_tip_y_offset = int(obj["nose_tip_y_offset"])
        if "scan_order" in obj:
            if obj["scan_order"] not in (COLUMN_MAJOR, ROW_MAJOR):
                raise ConfigError(f"scan_order must be {COLUMN_MAJOR!r} or {ROW_MAJOR!r}")
            cfg.scan_order = obj["scan_order"]
        if "min_component_area" in obj:
            cfg.min_component_area = int(obj["min_component_area"])
        if "point_index_map" in obj:
            cfg.point_index_map = {str(k): int(v) for k, v in obj["point_index_map"].items()}
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from None
    return cfg


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    th_overrides = {}
    for key in THRESHOLD_KEYS:
        value = getattr(args, f"th_{key}", None)
        if value is not None:
            th_overrides[f"th_{key}"] = value
    if th_overrides:
        cfg.thresholds = dataclasses.replace(cfg.thresholds, **th_overrides)
    if getattr(args, "radius_frac", None) is not None:
        cfg.radius_frac = args.radius_frac
    if getattr(args, "nose_tip_y_offset", None) is not None:
        cfg.nose_tip_y_offset = args.nose_tip_y_offset
    if getattr(args, "scan_order", None) is not None:
        cfg.scan_order = args.scan_order
    if getattr(args, "min_area", None) is not None:
        cfg.min_component_area = args.min_area
    return cfg


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return _apply_overrides(cfg, args)


def _detect_kwargs(cfg: RunConfig) -> dict:
    return {
        "scan_order": cfg.scan_order,
        "nose_tip_y_offset": cfg.nose_tip_y_offset,
        "min_component_area": cfg.min_component_area,
    }


def points_to_json(image_name: str, face_rect: Rect, pts: FeaturePoints) -> str:
    named = pts.as_dict()
    payload: dict = {
        "image": image_name,
        "face_rect": [face_rect.x, face_rect.y, face_rect.w, face_rect.h],
        "points": {
            name: [named[name].x, named[name].y] for name in POINT_NAMES if name in named
        },
    }
    if pts.nose_tip is not None:
        payload["nose_tip"] = [pts.nose_tip.x, pts.nose_tip.y]
    return json.dumps(payload, indent=2) + "\n"


def points_to_pts(pts: FeaturePoints) -> str:
    """FGnet-style text listing the present points in canonical order."""
    named = pts.as_dict()
    ordered = [named[n] for n in (*POINT_NAMES, "nose_tip") if n in named]
    lines = ["version: 1", f"n_points: {len(ordered)}", "{"]
    lines += [f"{p.x} {p.y}" for p in ordered]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _resolve_face_rect(args: argparse.Namespace, image) -> Rect:
    if args.face_rect:
        return parse_face_rect(args.face_rect)
    if args.whole_image:
        return Rect(0, 0, image.width, image.height)
    sidecar = Path(args.image).with_suffix(".face")
    if sidecar.is_file():
        return parse_face_rect(sidecar.read_text())
    raise ValueError(
        "no face rectangle: pass --face-rect x,y,w,h, --whole-image, "
        f"or provide a sidecar {sidecar.name}"
    )


def cmd_detect(args: argparse.Namespace) -> int:
    try:
        cfg = _resolve_config(args)
    except (ConfigError, ValueError) as exc:
        return _fail(str(exc))
    image_path = Path(args.image)
    try:
        image = load_pgm(image_path.read_bytes())
    except (OSError, PgmParseError) as exc:
        return _fail(f"cannot load image {image_path}: {exc}")
    try:
        rect = _resolve_face_rect(args, image)
        if rect.x2 > image.width or rect.y2 > image.height:
            raise ValueError(
                f"face rect {tuple(rect)} exceeds image bounds {image.width}x{image.height}"
            )
        face = crop(image, rect)
        layout = roi_layout(face.width, face.height, cfg.layout)
    except (LayoutError, ValueError) as exc:
        return _fail(str(exc))

    pts = detect_features(face, layout, cfg.thresholds, **_detect_kwargs(cfg)).translate(
        rect.x, rect.y
    )

    suffix = ".points.json" if args.format == "json" else ".pts"
    out_path = Path(args.out) if args.out else Path(image_path.stem + suffix)
    if args.format == "json":
        out_path.write_text(points_to_json(image_path.name, rect, pts))
    else:
        out_path.write_text(points_to_pts(pts))
    print(f"wrote {out_path}")

    if args.overlay:
        overlay = draw_markers(image, pts)
        Path(args.overlay).write_bytes(save_pgm(overlay))
        print(f"wrote {args.overlay}")

    detected = pts.detected_regions()
    if not detected:
        print("no feature regions detected")
        return EXIT_NOTHING_DETECTED
    print(f"detected regions: {', '.join(detected)}")
    return EXIT_OK


def _print_skips(skipped) -> None:
    print(f"skipped {len(skipped)} image(s)")
    for item in skipped:
        print(f"  {item.name}: {item.reason}")


def cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        cfg = _resolve_config(args)
    except (ConfigError, ValueError) as exc:
        return _fail(str(exc))
    samples, skipped = discover_samples(
        args.dataset,
        args.annotations,
        index_map=cfg.point_index_map,
        layout_cfg=cfg.layout,
    )
    _print_skips(skipped)
    if not samples:
        return _fail("no (image, face rect, annotation) triples found")

    report = evaluate_samples(
        samples,
        thresholds=cfg.thresholds,
        radius_frac=cfg.radius_frac,
        layout_cfg=cfg.layout,
        jobs=args.jobs,
        **_detect_kwargs(cfg),
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "rates.csv"
    csv_path.write_text(render_rates_csv(report))
    print(f"wrote {csv_path}")
    if not args.no_figures:
        from .plots import save_rates_figure

        fig_path = out_dir / "rates.png"
        save_rates_figure(report, fig_path)
        print(f"wrote {fig_path}")
    print()
    print(render_rates_table(report))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        cfg = _resolve_config(args)
    except (ConfigError, ValueError) as exc:
        return _fail(str(exc))
    region = "nostrils" if args.region == "nose" else args.region
    lo, hi, step = DEFAULT_SWEEP_RANGES[region]
    th_min = args.th_min if args.th_min is not None else lo
    th_max = args.th_max if args.th_max is not None else hi
    th_step = args.step if args.step is not None else step

    samples, skipped = discover_samples(
        args.dataset,
        args.annotations,
        index_map=cfg.point_index_map,
        layout_cfg=cfg.layout,
    )
    _print_skips(skipped)
    if not samples:
        return _fail("no (image, face rect, annotation) triples found")

    try:
        result = threshold_sweep(
            samples,
            region,
            th_min,
            th_max,
            th_step,
            radius_frac=cfg.radius_frac,
            layout_cfg=cfg.layout,
            jobs=args.jobs,
            **_detect_kwargs(cfg),
        )
    except ValueError as exc:
        return _fail(str(exc))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"sweep_{region}.csv"
    csv_path.write_text(render_sweep_csv(result))
    print(f"wrote {csv_path}")
    if not args.no_figures:
        from .plots import save_sweep_figure

        fig_path = out_dir / f"sweep_{region}.png"
        save_sweep_figure(result, fig_path)
        print(f"wrote {fig_path}")
    print(f"best threshold for {region}: {result.best_th:.{result.decimals}f}")
    return EXIT_OK


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--radius-frac", type=float, help="hit radius as a fraction of inter-ocular distance")
    parser.add_argument("--nose-tip-y-offset", type=int, help="pixels above the higher nostril for the nose tip")
    parser.add_argument("--scan-order", choices=[COLUMN_MAJOR, ROW_MAJOR], help="linear search traversal order")
    parser.add_argument("--min-area", type=int, help="drop white components smaller than this many pixels")
    for key in THRESHOLD_KEYS:
        parser.add_argument(
            f"--th-{key.replace('_', '-')}",
            dest=f"th_{key}",
            type=float,
            help=f"cumulative-histogram threshold for the {key} region",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facecorners",
        description="Facial feature corner point extraction and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="detect feature points on one image")
    p_detect.add_argument("image", help="input PGM image")
    p_detect.add_argument("--face-rect", help="face box as x,y,w,h (original-image coordinates)")
    p_detect.add_argument("--whole-image", action="store_true", help="treat the full image as the face")
    p_detect.add_argument("--overlay", help="write a marker-rendered PGM copy here")
    p_detect.add_argument("--out", help="points file path (default: <image stem> + suffix)")
    p_detect.add_argument("--format", choices=["json", "pts"], default="json", help="points file format")
    _add_common_flags(p_detect)
    p_detect.set_defaults(func=cmd_detect)

    p_eval = sub.add_parser("evaluate", help="detection-rate report over a dataset")
    p_eval.add_argument("dataset", help="directory of .pgm images with .face sidecars")
    p_eval.add_argument("--annotations", help="directory of .pts/.json ground truth (default: dataset dir)")
    p_eval.add_argument("--out-dir", default=".", help="where to write rates.csv and rates.png")
    p_eval.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_eval.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    _add_common_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="threshold sweep for one region")
    p_sweep.add_argument("dataset", help="directory of .pgm images with .face sidecars")
    p_sweep.add_argument("--annotations", help="directory of .pts/.json ground truth (default: dataset dir)")
    p_sweep.add_argument(
        "--region",
        required=True,
        choices=[*REGIONS, "nose"],
        help="region to sweep ('nose' is an alias for nostrils)",
    )
    p_sweep.add_argument("--th-min", type=float, help="sweep start (default: the region's window)")
    p_sweep.add_argument("--th-max", type=float, help="sweep end (default: the region's window)")
    p_sweep.add_argument("--step", type=float, help="grid step (default: the region's window step)")
    p_sweep.add_argument("--out-dir", default=".", help="where to write the sweep CSV and PNG")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    _add_common_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
