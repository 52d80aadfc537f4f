"""Tiny deterministic SVG line plots (no plotting dependency).

Good enough for trajectory and band figures: linear or log-10 x axis,
nan-aware polylines, fixed color cycle, optional legend. Output is plain
text SVG with stable float formatting, so identical inputs give identical
bytes.
"""
from __future__ import annotations

import math

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 16, 36, 46


def _fmt(value: float) -> str:
    return format(value, ".6g")


def _ticks(lo: float, hi: float, n: int = 6) -> np.ndarray:
    if not math.isfinite(lo) or not math.isfinite(hi) or lo == hi:
        return np.array([lo])
    raw = (hi - lo) / (n - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s for s in (1.0, 2.0, 2.5, 5.0, 10.0) if s * mag >= raw) * mag
    start = math.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def line_plot(path: str, curves, title: str = "", xlabel: str = "",
              ylabel: str = "", width: int = 760, height: int = 480,
              log_x: bool = False, hlines=()) -> str:
    """Write a line plot; curves is a sequence of (label, x, y) triples.

    Non-finite y values split a curve into segments. hlines draws labeled
    horizontal reference lines as (label, y) pairs.
    """
    prepared = []
    for label, x, y in curves:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if log_x:
            with np.errstate(divide="ignore", invalid="ignore"):
                x = np.where(x > 0, np.log10(x), np.nan)
        keep = np.isfinite(x)
        prepared.append((label, x, np.where(keep, y, np.nan)))

    finite_x = np.concatenate(
        [x[np.isfinite(x) & np.isfinite(y)] for _, x, y in prepared] or [np.zeros(1)])
    finite_y = np.concatenate(
        [y[np.isfinite(x) & np.isfinite(y)] for _, x, y in prepared] or [np.zeros(1)])
    for _, yv in hlines:
        finite_y = np.append(finite_y, yv)
    if finite_x.size == 0:
        finite_x = np.zeros(1)
    if finite_y.size == 0:
        finite_y = np.zeros(1)
    x_lo, x_hi = float(np.min(finite_x)), float(np.max(finite_x))
    y_lo, y_hi = float(np.min(finite_y)), float(np.max(finite_y))
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
           f'font-family="sans-serif" font-size="14">{title}</text>']

    axis_style = 'stroke="#333" stroke-width="1"'
    out.append(f'<line x1="{_fmt(px(x_lo))}" y1="{_fmt(py(y_lo))}" '
               f'x2="{_fmt(px(x_hi))}" y2="{_fmt(py(y_lo))}" {axis_style}/>')
    out.append(f'<line x1="{_fmt(px(x_lo))}" y1="{_fmt(py(y_lo))}" '
               f'x2="{_fmt(px(x_lo))}" y2="{_fmt(py(y_hi))}" {axis_style}/>')

    for tx in _ticks(x_lo, x_hi):
        label = f"1e{tx:g}" if log_x else f"{tx:g}"
        out.append(f'<line x1="{_fmt(px(tx))}" y1="{_fmt(py(y_lo))}" '
                   f'x2="{_fmt(px(tx))}" y2="{_fmt(py(y_lo) + 4)}" {axis_style}/>')
        out.append(f'<text x="{_fmt(px(tx))}" y="{_fmt(py(y_lo) + 18)}" '
                   f'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{label}</text>')
    for ty in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{_fmt(px(x_lo) - 4)}" y1="{_fmt(py(ty))}" '
                   f'x2="{_fmt(px(x_lo))}" y2="{_fmt(py(ty))}" {axis_style}/>')
        out.append(f'<text x="{_fmt(px(x_lo) - 8)}" y="{_fmt(py(ty) + 4)}" '
                   f'text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{ty:g}</text>')
    out.append(f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    out.append(f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 14 {height / 2:.0f})">{ylabel}</text>')

    for label, yv in hlines:
        out.append(f'<line x1="{_fmt(px(x_lo))}" y1="{_fmt(py(yv))}" '
                   f'x2="{_fmt(px(x_hi))}" y2="{_fmt(py(yv))}" stroke="#999" '
                   f'stroke-width="1" stroke-dasharray="6,3"/>')
        if label:
            out.append(f'<text x="{_fmt(px(x_hi) - 4)}" y="{_fmt(py(yv) - 4)}" '
                       f'text-anchor="end" font-family="sans-serif" '
                       f'font-size="11" fill="#666">{label}</text>')

    legend_y = _MARGIN_T + 6
    for i, (label, x, y) in enumerate(prepared):
        color = _COLORS[i % len(_COLORS)]
        ok = np.isfinite(y)
        start = None
        for j in range(len(x) + 1):
            inside = j < len(x) and ok[j]
            if inside and start is None:
                start = j
            elif not inside and start is not None:
                pts = " ".join(f"{_fmt(px(x[m]))},{_fmt(py(y[m]))}"
                               for m in range(start, j))
                out.append(f'<polyline points="{pts}" fill="none" '
                           f'stroke="{color}" stroke-width="1.5"/>')
                start = None
        if label:
            out.append(f'<line x1="{width - 150}" y1="{legend_y}" '
                       f'x2="{width - 126}" y2="{legend_y}" stroke="{color}" '
                       f'stroke-width="2"/>')
            out.append(f'<text x="{width - 120}" y="{legend_y + 4}" '
                       f'font-family="sans-serif" font-size="11">{label}</text>')
            legend_y += 16

    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
    return path
