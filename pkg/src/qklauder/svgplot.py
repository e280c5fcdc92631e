"""Minimal standalone SVG line charts (one series, axes, ticks, labels)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["nice_ticks", "line_plot_svg"]

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72, 24, 36, 56


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v / step) * step)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return "%.6g" % (v + 0.0)


def line_plot_svg(x, y, xlabel: str = "t", ylabel: str = "", title: str = "") -> str:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2 or x.shape != y.shape:
        raise ValueError("need at least two (x, y) points of equal length")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("data contain non-finite values")
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_T + ph - (v - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in nice_ticks(x0, x1):
        px = sx(v)
        parts.append(f'<line x1="{px:.2f}" y1="{MARGIN_T + ph}" x2="{px:.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{_fmt(v)}</text>')
    for v in nice_ticks(y0, y1):
        py = sy(v)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{py:.2f}" x2="{MARGIN_L}" y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{py + 4:.2f}" text-anchor="end">{_fmt(v)}</text>')
    points = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    parts.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{points}"/>')
    parts.append(
        f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 14}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    if title:
        parts.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle">{escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
