"""Self-contained SVG rendering for heatmaps and training curves.

Charts are derived artifacts: every plotted number also lands in a CSV next to
the image, so nothing here is a source of truth.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import Geometry
from .heatmap import HeatmapGrid

# Five-stop blue -> red ramp applied to log(1 + count).
RAMP = (
    (0.03, 0.19, 0.42),
    (0.19, 0.51, 0.74),
    (0.99, 0.86, 0.54),
    (0.94, 0.43, 0.26),
    (0.65, 0.04, 0.08),
)


def ramp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    scaled = t * (len(RAMP) - 1)
    low = int(scaled)
    high = min(low + 1, len(RAMP) - 1)
    frac = scaled - low
    rgb = tuple(
        RAMP[low][c] + (RAMP[high][c] - RAMP[low][c]) * frac for c in range(3)
    )
    return "#%02x%02x%02x" % tuple(int(round(255 * v)) for v in rgb)


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def render_heatmap_svg(
    grid: HeatmapGrid, geometry: Geometry, title: str = "", size: int = 640
) -> str:
    """Visit counts as colored cells under the cost-region outline."""
    margin = 40
    span_x = grid.x_max - grid.x_min
    span_y = grid.y_max - grid.y_min
    scale = (size - 2 * margin) / max(span_x, span_y)

    def px(x: float) -> float:
        return margin + (x - grid.x_min) * scale

    def py(y: float) -> float:
        return margin + (grid.y_max - y) * scale  # flip: SVG y grows downward

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{size / 2:.1f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_esc(title)}</text>'
        )

    max_count = int(grid.counts.max()) if grid.counts.size else 0
    if max_count > 0:
        log_max = math.log1p(max_count)
        cw = grid.cell_width * scale
        ch = grid.cell_height * scale
        for ix, iy in zip(*np.nonzero(grid.counts)):
            count = int(grid.counts[ix, iy])
            color = ramp_color(math.log1p(count) / log_max)
            x = px(grid.x_min + ix * grid.cell_width)
            y = py(grid.y_min + (iy + 1) * grid.cell_height)
            out.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                f'fill="{color}"/>'
            )

    # Geometry outline: disk, corridor, cutouts, and the two optima.
    cx, cy = geometry.disk_center
    out.append(
        f'<circle cx="{px(cx):.2f}" cy="{py(cy):.2f}" r="{geometry.disk_radius * scale:.2f}" '
        'fill="none" stroke="#333333" stroke-width="1.5"/>'
    )
    for rect in geometry.openings:
        out.append(
            f'<rect x="{px(rect.x_min):.2f}" y="{py(rect.y_max):.2f}" '
            f'width="{(rect.x_max - rect.x_min) * scale:.2f}" '
            f'height="{(rect.y_max - rect.y_min) * scale:.2f}" '
            'fill="none" stroke="#333333" stroke-width="1.2" stroke-dasharray="4 3"/>'
        )
    ox, oy = geometry.infeasible_optimum
    arm = 6
    out.append(
        f'<path d="M {px(ox) - arm:.1f} {py(oy) - arm:.1f} L {px(ox) + arm:.1f} {py(oy) + arm:.1f} '
        f'M {px(ox) - arm:.1f} {py(oy) + arm:.1f} L {px(ox) + arm:.1f} {py(oy) - arm:.1f}" '
        'stroke="#000000" stroke-width="2"/>'
    )
    fx, fy = geometry.feasible_optimum
    out.append(
        f'<circle cx="{px(fx):.2f}" cy="{py(fy):.2f}" r="5" fill="none" '
        'stroke="#007700" stroke-width="2"/>'
    )
    out.append("</svg>")
    return "\n".join(out)


def render_curves_svg(
    x_values,
    series,
    title: str = "",
    x_label: str = "rollout",
    cost_limit: float | None = None,
    width: int = 860,
    height: int = 520,
) -> str:
    """Line chart with optional shaded std bands and a horizontal limit line.

    ``series`` is a list of (label, means, stds-or-None, color).
    """
    margin_left, margin_right, margin_top, margin_bottom = 70, 180, 50, 60
    plot_w = width - margin_left - margin_right
    plot_h = height - margin_top - margin_bottom
    xs = list(x_values)
    if not xs:
        raise ValueError("no x values to plot")

    lo, hi = math.inf, -math.inf
    for _, means, stds, _ in series:
        stds = stds if stds is not None else [0.0] * len(means)
        for m, s in zip(means, stds):
            lo = min(lo, m - s)
            hi = max(hi, m + s)
    if cost_limit is not None:
        lo = min(lo, cost_limit)
        hi = max(hi, cost_limit)
    if not math.isfinite(lo) or not math.isfinite(hi):
        raise ValueError("no finite values to plot")
    if hi == lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    x_lo, x_hi = min(xs), max(xs)
    x_span = (x_hi - x_lo) or 1

    def px(x: float) -> float:
        return margin_left + (x - x_lo) / x_span * plot_w

    def py(v: float) -> float:
        return margin_top + (hi - v) / (hi - lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{width / 2:.1f}" y="26" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_esc(title)}</text>'
        )
    # Axes and y ticks.
    for i in range(6):
        v = lo + (hi - lo) * i / 5
        y = py(v)
        out.append(
            f'<line x1="{margin_left}" y1="{y:.1f}" x2="{margin_left + plot_w}" '
            f'y2="{y:.1f}" stroke="#dddddd"/>'
        )
        out.append(
            f'<text x="{margin_left - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.3g}</text>'
        )
    out.append(
        f'<line x1="{margin_left}" y1="{margin_top + plot_h}" '
        f'x2="{margin_left + plot_w}" y2="{margin_top + plot_h}" stroke="#000000"/>'
    )
    out.append(
        f'<line x1="{margin_left}" y1="{margin_top}" x2="{margin_left}" '
        f'y2="{margin_top + plot_h}" stroke="#000000"/>'
    )
    out.append(
        f'<text x="{margin_left + plot_w / 2:.1f}" y="{height - 18}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">{_esc(x_label)}</text>'
    )

    legend_y = margin_top + 10
    for label, means, stds, color in series:
        if stds is not None:
            upper = [(x, m + s) for x, m, s in zip(xs, means, stds)]
            lower = [(x, m - s) for x, m, s in zip(xs, means, stds)]
            pts = " ".join(
                f"{px(x):.2f},{py(v):.2f}" for x, v in upper + lower[::-1]
            )
            out.append(f'<polygon points="{pts}" fill="{color}" opacity="0.15"/>')
        pts = " ".join(f"{px(x):.2f},{py(m):.2f}" for x, m in zip(xs, means))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<line x1="{margin_left + plot_w + 14}" y1="{legend_y}" '
            f'x2="{margin_left + plot_w + 40}" y2="{legend_y}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{margin_left + plot_w + 46}" y="{legend_y + 4}" '
            f'font-family="sans-serif" font-size="12">{_esc(label)}</text>'
        )
        legend_y += 22

    if cost_limit is not None:
        y = py(cost_limit)
        out.append(
            f'<line x1="{margin_left}" y1="{y:.1f}" x2="{margin_left + plot_w}" '
            f'y2="{y:.1f}" stroke="#cc0000" stroke-width="1.5" stroke-dasharray="7 4"/>'
        )
        out.append(
            f'<text x="{margin_left + plot_w + 14}" y="{legend_y + 4}" '
            f'font-family="sans-serif" font-size="12" fill="#cc0000">cost limit</text>'
        )
    out.append("</svg>")
    return "\n".join(out)
