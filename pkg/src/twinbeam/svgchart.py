"""Minimal hand-emitted SVG line charts (axes, error bars, legend).

No plotting dependency; output is deterministic for identical inputs.
"""

from __future__ import annotations

import math
from pathlib import Path

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]

WIDTH, HEIGHT = 800, 520
MARGIN = {"left": 70, "right": 170, "top": 50, "bottom": 60}


def _esc(text):
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _fmt(x):
    return f"{x:.6g}"


def _ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def line_chart(series, title="", x_label="", y_label="", y_reference=None):
    """Build an SVG line chart.

    ``series`` is a list of dicts with keys ``label``, ``x``, ``y`` and
    optionally ``yerr``; ``y_reference`` draws a dashed horizontal line.
    Returns the SVG document as a string.
    """
    xs = [float(v) for s in series for v in s["x"]]
    ys = [float(v) for s in series for v in s["y"]]
    for s in series:
        for v, e in zip(s["y"], s.get("yerr") or [0.0] * len(s["y"])):
            ys.extend([float(v) - float(e), float(v) + float(e)])
    if y_reference is not None:
        ys.append(float(y_reference))
    if not xs or not ys:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    pad = 0.05 * (y1 - y0) or 0.05 * abs(y1) or 0.5
    y0, y1 = y0 - pad, y1 + pad

    px0, px1 = MARGIN["left"], WIDTH - MARGIN["right"]
    py0, py1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def sx(x):
        return px0 + (float(x) - x0) / (x1 - x0) * (px1 - px0)

    def sy(y):
        return py0 + (float(y) - y0) / (y1 - y0) * (py1 - py0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{_esc(title)}</text>',
    ]
    # axes
    parts.append(
        f'<path d="M {px0} {py1} L {px0} {py0} L {px1} {py0}" stroke="black" fill="none"/>'
    )
    for t in _ticks(x0, x1):
        if not x0 <= t <= x1:
            continue
        x = sx(t)
        parts.append(f'<line x1="{_fmt(x)}" y1="{py0}" x2="{_fmt(x)}" y2="{py0 + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{_fmt(x)}" y="{py0 + 18}" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _ticks(y0, y1):
        if not y0 <= t <= y1:
            continue
        y = sy(t)
        parts.append(f'<line x1="{px0 - 5}" y1="{_fmt(y)}" x2="{px0}" y2="{_fmt(y)}" stroke="black"/>')
        parts.append(
            f'<text x="{px0 - 8}" y="{_fmt(y + 4)}" text-anchor="end">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{(px0 + px1) / 2}" y="{HEIGHT - 16}" text-anchor="middle">{_esc(x_label)}</text>'
    )
    parts.append(
        f'<text x="18" y="{(py0 + py1) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(py0 + py1) / 2})">{_esc(y_label)}</text>'
    )
    if y_reference is not None and y0 <= y_reference <= y1:
        y = sy(y_reference)
        parts.append(
            f'<line x1="{px0}" y1="{_fmt(y)}" x2="{px1}" y2="{_fmt(y)}" '
            f'stroke="#888" stroke-dasharray="6 4"/>'
        )
    # series
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(s["x"], s["y"]))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in zip(s["x"], s["y"]):
            parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" fill="{color}"/>')
        for x, y, e in zip(s["x"], s["y"], s.get("yerr") or []):
            if e > 0:
                parts.append(
                    f'<line x1="{_fmt(sx(x))}" y1="{_fmt(sy(y - e))}" '
                    f'x2="{_fmt(sx(x))}" y2="{_fmt(sy(y + e))}" stroke="{color}"/>'
                )
        lx, ly = px1 + 12, py1 + 18 * i + 6
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 26}" y="{ly + 4}">{_esc(s["label"])}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_chart(path, series, **kwargs):
    Path(path).write_text(line_chart(series, **kwargs), encoding="utf-8", newline="\n")


__all__ = ["line_chart", "write_chart", "PALETTE"]
