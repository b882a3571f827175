"""Minimal native SVG line plots.

Rendering stays deliberately small: polylines, circle markers, vertical
spread bars, linear axes with decimal ticks.  The CSV files next to each
figure are the authoritative artifact; these drawings only make them
glanceable without external plotting dependencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Series:
    """One curve: x/y data plus display attributes."""

    x: np.ndarray
    y: np.ndarray
    color: str = PALETTE[0]
    label: str = ""
    marker: bool = False
    dashed: bool = False
    line: bool = True
    bars: np.ndarray | None = None  # half-length of vertical spread bars


def _nice_ticks(lo: float, hi: float, target: int = 6) -> np.ndarray:
    if not np.isfinite(lo) or not np.isfinite(hi):
        return np.array([0.0, 1.0])
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = np.ceil(lo / step) * step
    ticks = np.arange(first, hi + 0.5 * step, step)
    return np.round(ticks, 12)


def _fmt(value: float) -> str:
    return f"{value:g}"


def line_plot(
    path,
    series,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    size: tuple = (720, 480),
) -> Path:
    """Write an SVG with the given series; returns the path."""
    width, height = size
    ml, mr, mt, mb = 64, 16, 34, 46
    pw, ph = width - ml - mr, height - mt - mb

    xs = np.concatenate([np.asarray(s.x, dtype=float) for s in series])
    ys = []
    for s in series:
        y = np.asarray(s.y, dtype=float)
        ys.append(y)
        if s.bars is not None:
            ys.extend([y - s.bars, y + s.bars])
    ys = np.concatenate(ys)
    xs = xs[np.isfinite(xs)]
    ys = ys[np.isfinite(ys)]
    if xs.size == 0 or ys.size == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    x_pad = 0.03 * (x_hi - x_lo)
    y_pad = 0.06 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return mt + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#444" stroke-width="1"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        if not x_lo <= t <= x_hi:
            continue
        x = px(t)
        out.append(
            f'<line x1="{x:.1f}" y1="{mt + ph}" x2="{x:.1f}" y2="{mt + ph + 4}" stroke="#444"/>'
        )
        out.append(
            f'<text x="{x:.1f}" y="{mt + ph + 17}" font-size="11" text-anchor="middle" '
            f'fill="#222">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        if not y_lo <= t <= y_hi:
            continue
        y = py(t)
        out.append(f'<line x1="{ml - 4}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" stroke="#444"/>')
        out.append(
            f'<text x="{ml - 7}" y="{y + 3.5:.1f}" font-size="11" text-anchor="end" '
            f'fill="#222">{_fmt(t)}</text>'
        )
    if title:
        out.append(
            f'<text x="{ml + pw / 2}" y="{mt - 12}" font-size="13" text-anchor="middle" '
            f'fill="#000">{escape(title)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{ml + pw / 2}" y="{height - 10}" font-size="12" text-anchor="middle" '
            f'fill="#000">{escape(xlabel)}</text>'
        )
    if ylabel:
        out.append(
            f'<text x="16" y="{mt + ph / 2}" font-size="12" text-anchor="middle" '
            f'fill="#000" transform="rotate(-90 16 {mt + ph / 2})">{escape(ylabel)}</text>'
        )

    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        if s.line:
            # split the polyline at non-finite points
            start = 0
            for stop in list(np.flatnonzero(~np.isfinite(y))) + [y.size]:
                seg = slice(start, stop)
                if stop - start >= 2:
                    points = " ".join(
                        f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[seg], y[seg])
                    )
                    out.append(
                        f'<polyline points="{points}" fill="none" stroke="{s.color}" '
                        f'stroke-width="1.5"{dash}/>'
                    )
                start = stop + 1
        if s.bars is not None:
            for a, b, h in zip(x, y, np.asarray(s.bars, dtype=float)):
                if np.isfinite(b) and np.isfinite(h):
                    out.append(
                        f'<line x1="{px(a):.2f}" y1="{py(b - h):.2f}" x2="{px(a):.2f}" '
                        f'y2="{py(b + h):.2f}" stroke="{s.color}" stroke-width="1"/>'
                    )
        if s.marker:
            for a, b in zip(x, y):
                if np.isfinite(b):
                    out.append(
                        f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.6" '
                        f'fill="{s.color}"/>'
                    )

    labelled = [s for s in series if s.label]
    for i, s in enumerate(labelled):
        y = mt + 14 + 15 * i
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(
            f'<line x1="{ml + pw - 120}" y1="{y - 4}" x2="{ml + pw - 96}" y2="{y - 4}" '
            f'stroke="{s.color}" stroke-width="2"{dash}/>'
        )
        out.append(
            f'<text x="{ml + pw - 90}" y="{y}" font-size="11" fill="#222">{escape(s.label)}</text>'
        )

    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
