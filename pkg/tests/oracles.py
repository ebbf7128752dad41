"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately written with plain Python loops over
lists/sets, so it shares no code path with the package implementation.
"""

from __future__ import annotations

import math


def canonical_pgm(width: int, height: int, flat_pixels) -> bytes:
    return f"P5\n{width} {height}\n255\n".encode("ascii") + bytes(flat_pixels)


def histogram_counts(rows) -> list[int]:
    counts = [0] * 256
    for row in rows:
        for v in row:
            counts[int(v)] += 1
    return counts


def prefix_cdf(counts: list[int], total: int) -> list[float]:
    cdf = []
    running = 0
    for c in counts:
        running += c
        cdf.append(running / total)
    return cdf


def filter_pixelwise(rows, th: float) -> list[list[int]]:
    """Pixel-by-pixel threshold rule: white iff prefix_count(value) <= th * N."""
    counts = histogram_counts(rows)
    prefix = []
    running = 0
    for c in counts:
        running += c
        prefix.append(running)
    total = sum(counts)
    out = []
    for row in rows:
        out.append([255 if prefix[int(v)] <= th * total else 0 for v in row])
    return out


def first_white(mask, vertical: str, horizontal_start: str, scan_order: str = "column_major"):
    """Exhaustive scan in the traversal order; returns (x, y) or None."""
    h = len(mask)
    w = len(mask[0])
    cols = range(w) if horizontal_start == "from_left" else range(w - 1, -1, -1)
    rows = range(h) if vertical == "top_down" else range(h - 1, -1, -1)
    if scan_order == "column_major":
        for x in cols:
            for y in rows:
                if mask[y][x]:
                    return (x, y)
    else:
        for y in rows:
            for x in cols:
                if mask[y][x]:
                    return (x, y)
    return None


def flood_components(mask) -> list[set[tuple[int, int]]]:
    """8-connected white components in first-encounter raster order."""
    h = len(mask)
    w = len(mask[0])
    seen = [[False] * w for _ in range(h)]
    components = []
    for y in range(h):
        for x in range(w):
            if not mask[y][x] or seen[y][x]:
                continue
            comp = set()
            stack = [(x, y)]
            seen[y][x] = True
            while stack:
                cx, cy = stack.pop()
                comp.add((cx, cy))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        nx, ny = cx + dx, cy + dy
                        if 0 <= nx < w and 0 <= ny < h and mask[ny][nx] and not seen[ny][nx]:
                            seen[ny][nx] = True
                            stack.append((nx, ny))
            components.append(comp)
    return components


def boundary_of(component: set[tuple[int, int]], width: int, height: int) -> set[tuple[int, int]]:
    """Component pixels with a 4-neighbor outside the component or the image."""
    result = set()
    for (x, y) in component:
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if not (0 <= nx < width and 0 <= ny < height) or (nx, ny) not in component:
                result.add((x, y))
                break
    return result


def nostril_rule(mask):
    """Label, order by raster encounter, take boundary sets, sort by (x, y),
    pick max of the last and min of the previous-last; None if < 2 blobs."""
    h = len(mask)
    w = len(mask[0])
    components = flood_components(mask)
    if len(components) < 2:
        return None
    last = sorted(boundary_of(components[-1], w, h))
    prev = sorted(boundary_of(components[-2], w, h))
    return (last[-1], prev[0])


def disc_pixel_count(radius: int) -> int:
    count = 0
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= radius * radius:
                count += 1
    return count


def plus_pixels(cx: int, cy: int, arm: int, width: int, height: int) -> set[tuple[int, int]]:
    pts = set()
    for d in range(-arm, arm + 1):
        if 0 <= cx + d < width:
            pts.add((cx + d, cy))
        if 0 <= cy + d < height:
            pts.add((cx, cy + d))
    return pts


def disc_pixels(cx: int, cy: int, radius: int, width: int, height: int) -> set[tuple[int, int]]:
    pts = set()
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= radius * radius:
                x, y = cx + dx, cy + dy
                if 0 <= x < width and 0 <= y < height:
                    pts.add((x, y))
    return pts


def match_status(detected_pair, truth_pair, limit: float) -> str:
    """Count pairwise hits; detected/truth entries may be None."""
    matched = 0
    for det, ref in zip(detected_pair, truth_pair):
        if det is None or ref is None:
            continue
        if math.hypot(det[0] - ref[0], det[1] - ref[1]) <= limit:
            matched += 1
    return ("none", "single", "both")[matched]


def rate_counts(statuses: list[str]) -> tuple[float, float, float]:
    n = len(statuses)
    both = 100.0 * sum(1 for s in statuses if s == "both") / n
    single = 100.0 * sum(1 for s in statuses if s == "single") / n
    return both, single, both + single
