"""Minimal self-contained SVG scatter plot."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MAX_POINTS = 5000
COLORS = ("#1f4fd6", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")
_MARGIN = dict(left=70, right=20, top=40, bottom=60)


def _subsample(n: int, cap: int) -> np.ndarray:
    if n <= cap:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, cap).round().astype(int))


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def scatter_svg(
    series: dict[str, tuple[np.ndarray, np.ndarray]],
    fits: dict[str, tuple[float, float]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    """Render scatter series, one fit line per series, and the line ``y = x``.

    At most ``MAX_POINTS`` markers are drawn in total (evenly strided per
    series); fit lines are clipped to the plotted square.
    """
    cap = max(1, MAX_POINTS // max(1, len(series)))
    hi = 0.0
    for x, y in series.values():
        if len(x):
            hi = max(hi, float(np.max(x)), float(np.max(y)))
    hi = hi * 1.05 if hi > 0 else 1.0

    x0, x1 = _MARGIN["left"], WIDTH - _MARGIN["right"]
    y0, y1 = HEIGHT - _MARGIN["bottom"], _MARGIN["top"]

    def px(v):
        return x0 + (x1 - x0) * np.asarray(v) / hi

    def py(v):
        return y0 - (y0 - y1) * np.asarray(v) / hi

    def segment(slope, intercept):
        # portion of y = slope * x + intercept inside the square [0, hi]^2
        lo_x, hi_x = 0.0, hi
        if slope != 0:
            ends = sorted(((0.0 - intercept) / slope, (hi - intercept) / slope))
            lo_x, hi_x = max(lo_x, ends[0]), min(hi_x, ends[1])
        if lo_x >= hi_x:
            lo_x, hi_x = 0.0, hi
        return lo_x, slope * lo_x + intercept, hi_x, slope * hi_x + intercept

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>',
    ]
    ticks = []
    for t in np.linspace(0.0, hi, 6):
        ticks.append(
            f'<text x="{_fmt(px(t))}" y="{y0 + 18}" text-anchor="middle">{t:.3g}</text>'
            f'<text x="{x0 - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end">{t:.3g}</text>'
        )
    out.append(f'<g class="ticks" font-family="sans-serif" font-size="11">{"".join(ticks)}</g>')
    out.append(
        f'<g font-family="sans-serif" font-size="14">'
        f'<text x="{WIDTH / 2}" y="24" text-anchor="middle">{escape(title)}</text>'
        f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 16}" text-anchor="middle">{escape(xlabel)}</text>'
        f'<text x="18" y="{(y0 + y1) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2})">{escape(ylabel)}</text></g>'
    )

    for i, (tag, (x, y)) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        idx = _subsample(len(x), cap)
        pts = "".join(
            f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="1.5"/>'
            for a, b in zip(px(np.asarray(x)[idx]), py(np.asarray(y)[idx]))
        )
        out.append(
            f'<g class="points" data-tag="{escape(tag)}" fill="{color}" fill-opacity="0.35">{pts}</g>'
        )

    for i, (tag, (slope, intercept)) in enumerate(fits.items()):
        color = COLORS[i % len(COLORS)]
        xa, ya, xb, yb = segment(slope, intercept)
        out.append(
            f'<line class="fit" data-tag="{escape(tag)}" x1="{_fmt(px(xa))}" y1="{_fmt(py(ya))}" '
            f'x2="{_fmt(px(xb))}" y2="{_fmt(py(yb))}" stroke="{color}" stroke-width="3"/>'
        )

    out.append(
        f'<line class="reference" x1="{_fmt(px(0))}" y1="{_fmt(py(0))}" '
        f'x2="{_fmt(px(hi))}" y2="{_fmt(py(hi))}" stroke="black" stroke-width="1.5"/>'
    )

    legend = []
    for i, tag in enumerate(series):
        yy = _MARGIN["top"] + 10 + 18 * i
        legend.append(
            f'<rect x="{x0 + 12}" y="{yy - 9}" width="12" height="12" fill="{COLORS[i % len(COLORS)]}"/>'
            f'<text x="{x0 + 30}" y="{yy + 2}">{escape(tag)}</text>'
        )
    out.append(f'<g class="legend" font-family="sans-serif" font-size="12">{"".join(legend)}</g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
