"""Themed SVG figures: node-only workgroup maps and 2x2 quadrant charts.

Output is deterministic: elements are emitted sorted by id and floats are
formatted with fixed precision, so files are byte-stable for snapshot
comparison. Every fill comes from the supplied theme, never ad hoc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import CollabGraph, Partition
from .layout import LayoutResult
from .theming import Theme


class RenderError(ValueError):
    pass


WIDTH, HEIGHT = 840.0, 640.0
PAD = 40.0


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


@dataclass
class MapSpec:
    """What to draw on a workgroup map and how to color it."""

    layout: LayoutResult
    coloring: str = "nominal"  # "nominal" or "sequential"
    communities: Optional[Partition] = None
    metrics: Dict[str, Dict[str, float]] = field(default_factory=dict)
    metric_name: Optional[str] = None
    highlight: Optional[int] = None
    show_links: bool = False
    graph: Optional[CollabGraph] = None


@dataclass
class QuadrantSpec:
    """Workgroup scatter in freedom/fluidity space with quadrant captions."""

    points: List[Tuple[int, float, float, int]]  # (workgroup id, x, y, size)
    thresholds: Tuple[float, float]
    labels: Tuple[str, str, str, str] = (
        "localized, established",
        "cross-org, established",
        "localized, fluid",
        "cross-org, fluid",
    )

    def __post_init__(self):
        if not self.points:
            raise RenderError("need at least one point")
        xs = [p[1] for p in self.points]
        ys = [p[2] for p in self.points]
        tx, ty = self.thresholds
        if not (min(xs) <= tx <= max(xs)) or not (min(ys) <= ty <= max(ys)):
            raise RenderError("thresholds must lie within the observed value range")


def default_thresholds(
    points: Sequence[Tuple[int, float, float, int]]
) -> Tuple[float, float]:
    """Per-axis medians."""
    xs = sorted(p[1] for p in points)
    ys = sorted(p[2] for p in points)

    def median(v: List[float]) -> float:
        n = len(v)
        mid = n // 2
        return v[mid] if n % 2 else 0.5 * (v[mid - 1] + v[mid])

    return median(xs), median(ys)


# ---------------------------------------------------------------------------
# workgroup map
# ---------------------------------------------------------------------------


def _map_transform(layout: LayoutResult) -> Tuple[float, float, float]:
    xs = [p[0] for p in layout.positions.values()]
    ys = [p[1] for p in layout.positions.values()]
    span_x = max(xs) - min(xs) or 1.0
    span_y = max(ys) - min(ys) or 1.0
    scale = min((WIDTH - 2 * PAD) / span_x, (HEIGHT - 2 * PAD) / span_y)
    off_x = (WIDTH - scale * (max(xs) + min(xs))) / 2.0
    off_y = (HEIGHT - scale * (max(ys) + min(ys))) / 2.0
    return scale, off_x, off_y


def _node_fill(node: str, spec: MapSpec, theme: Theme) -> str:
    if spec.coloring == "sequential":
        if spec.metric_name is None or spec.metric_name not in spec.metrics:
            raise RenderError(f"unknown metric name {spec.metric_name!r}")
        values = spec.metrics[spec.metric_name]
        ramp = theme.sequential
        lo = min(values.values())
        hi = max(values.values())
        if hi <= lo:
            return ramp[round(0.5 * (len(ramp) - 1))]
        t = (values[node] - lo) / (hi - lo)
        return ramp[round(t * (len(ramp) - 1))]
    if spec.coloring != "nominal":
        raise RenderError(f"unknown coloring mode {spec.coloring!r}")
    if spec.communities is None:
        raise RenderError("nominal coloring requires a community partition")
    cid = spec.communities.assignment[node]
    if spec.highlight is not None:
        palette = theme.nominal_bold if cid == spec.highlight else theme.nominal_muted
    else:
        palette = theme.nominal
    return palette[cid % len(palette)]


def render_map(spec: MapSpec, theme: Theme) -> str:
    """Node-only workgroup map (links optional) on the theme background."""
    layout = spec.layout
    if not layout.positions:
        raise RenderError("empty layout")
    if spec.coloring == "sequential" and spec.metric_name:
        values = spec.metrics.get(spec.metric_name)
        if values is None:
            raise RenderError(f"unknown metric name {spec.metric_name!r}")
        missing = [n for n in layout.positions if n not in values]
        if missing:
            raise RenderError(f"metric {spec.metric_name!r} missing nodes {missing[:3]}")
    scale, off_x, off_y = _map_transform(layout)
    max_r = max(layout.node_radii.values()) or 1.0
    r_scale = min(scale, 18.0 / max_r)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" '
        f'height="{HEIGHT:.0f}" viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">',
        f'<rect width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="{theme.background}"/>',
    ]
    if spec.show_links:
        if spec.graph is None:
            raise RenderError("show_links requires the graph")
        for a, b, _ in sorted(spec.graph.edges()):
            xa, ya = layout.positions[a]
            xb, yb = layout.positions[b]
            parts.append(
                f'<line x1="{_fmt(xa * scale + off_x)}" y1="{_fmt(ya * scale + off_y)}" '
                f'x2="{_fmt(xb * scale + off_x)}" y2="{_fmt(yb * scale + off_y)}" '
                f'stroke="{theme.foreground}" stroke-opacity="0.15" stroke-width="0.5"/>'
            )
    for node in sorted(layout.positions):
        x, y = layout.positions[node]
        r = max(2.0, layout.node_radii[node] * r_scale)
        fill = _node_fill(node, spec, theme)
        parts.append(
            f'<circle id="{_esc(node)}" cx="{_fmt(x * scale + off_x)}" '
            f'cy="{_fmt(y * scale + off_y)}" r="{_fmt(r)}" fill="{fill}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# quadrant chart
# ---------------------------------------------------------------------------


def quadrant_of(
    x: float, y: float, thresholds: Tuple[float, float]
) -> Tuple[bool, bool]:
    """(high-x, high-y); points exactly on a threshold go to the high side."""
    return x >= thresholds[0], y >= thresholds[1]


def pick_quadrant_callouts(
    points: Sequence[Tuple[int, float, float, int]],
    thresholds: Tuple[float, float],
    per_quadrant: int = 1,
) -> List[int]:
    """Most prominent workgroups per quadrant: maximum Chebyshev distance
    from the threshold point, ties to larger size then smaller id."""
    buckets: Dict[Tuple[bool, bool], List[Tuple[float, int, int]]] = {}
    tx, ty = thresholds
    for wid, x, y, size in points:
        quadrant = quadrant_of(x, y, thresholds)
        cheb = max(abs(x - tx), abs(y - ty))
        buckets.setdefault(quadrant, []).append((-cheb, -size, wid))
    out: List[int] = []
    for quadrant in sorted(buckets):
        chosen = sorted(buckets[quadrant])[:per_quadrant]
        out.extend(wid for _, _, wid in chosen)
    return out


def render_quadrant(spec: QuadrantSpec, theme: Theme) -> str:
    """Scatter of workgroups in the unit square with threshold lines and one
    caption per quadrant; marker area tracks workgroup size."""
    tx, ty = spec.thresholds
    x0, y0 = PAD * 2, HEIGHT - PAD * 1.5
    x1, y1 = WIDTH - PAD, PAD

    def sx(v: float) -> float:
        return x0 + v * (x1 - x0)

    def sy(v: float) -> float:
        return y0 + v * (y1 - y0)

    max_size = max(p[3] for p in spec.points) or 1
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" '
        f'height="{HEIGHT:.0f}" viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">',
        f'<rect width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="{theme.background}"/>',
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" '
        f'stroke="{theme.foreground}" stroke-width="1"/>',
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" '
        f'stroke="{theme.foreground}" stroke-width="1"/>',
        f'<line x1="{_fmt(sx(tx))}" y1="{_fmt(y0)}" x2="{_fmt(sx(tx))}" y2="{_fmt(y1)}" '
        f'stroke="{theme.foreground}" stroke-opacity="0.4" stroke-dasharray="4 3"/>',
        f'<line x1="{_fmt(x0)}" y1="{_fmt(sy(ty))}" x2="{_fmt(x1)}" y2="{_fmt(sy(ty))}" '
        f'stroke="{theme.foreground}" stroke-opacity="0.4" stroke-dasharray="4 3"/>',
        f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(HEIGHT - 8)}" text-anchor="middle" '
        f'fill="{theme.foreground}" font-size="14">freedom</text>',
        f'<text x="14" y="{_fmt((y0 + y1) / 2)}" text-anchor="middle" '
        f'fill="{theme.foreground}" font-size="14" '
        f'transform="rotate(-90 14 {_fmt((y0 + y1) / 2)})">fluidity</text>',
    ]
    captions = {
        (False, False): (sx(tx / 2), sy(ty / 2), spec.labels[0]),
        (True, False): (sx((tx + 1) / 2), sy(ty / 2), spec.labels[1]),
        (False, True): (sx(tx / 2), sy((ty + 1) / 2), spec.labels[2]),
        (True, True): (sx((tx + 1) / 2), sy((ty + 1) / 2), spec.labels[3]),
    }
    for key in sorted(captions):
        cx, cy, label = captions[key]
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
            f'fill="{theme.foreground}" fill-opacity="0.55" font-size="13">'
            f"{_esc(label)}</text>"
        )
    for wid, x, y, size in sorted(spec.points):
        hx, hy = quadrant_of(x, y, spec.thresholds)
        color = theme.nominal[((2 if hy else 0) + (1 if hx else 0)) % len(theme.nominal)]
        r = 4.0 + 14.0 * math.sqrt(size / max_size)
        parts.append(
            f'<circle id="wg-{wid}" cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" '
            f'r="{_fmt(r)}" fill="{color}" fill-opacity="0.85"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
