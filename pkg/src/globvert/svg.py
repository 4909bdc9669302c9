"""Minimal hand-written SVG: stacked line panels and contour overlays.

Coordinates are printed with a fixed number of decimals so files are
byte-stable across runs.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .vertices import CONVEX

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def _f(v):
    return f"{v:.3f}"


def _path(xs, ys):
    pieces, pen = [], "M"
    for x, y in zip(xs, ys):
        if not (np.isfinite(x) and np.isfinite(y)):
            pen = "M"
            continue
        pieces.append(f"{pen}{_f(x)},{_f(y)}")
        pen = "L"
    return " ".join(pieces)


def _doc(width, height, body):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def panels(series: dict, title: str = "", tick_every: int = 10, width: int = 720, panel_height: int = 110) -> str:
    """One panel per named series against the sample index, with ticks every
    ``tick_every`` samples and marks of optional vertex positions."""
    left, right, top, gap = 60, 15, 25, 22
    names = list(series)
    height = top + len(names) * (panel_height + gap) + 10
    body = [f'<text x="{left}" y="15" font-size="12">{escape(title)}</text>']
    plot_w = width - left - right
    for k, name in enumerate(names):
        y = np.asarray(series[name], dtype=float)
        n = len(y)
        y0 = top + k * (panel_height + gap)
        fin = y[np.isfinite(y)]
        lo, hi = (float(fin.min()), float(fin.max())) if len(fin) else (0.0, 1.0)
        if hi - lo < 1e-12 * max(1.0, abs(hi)):
            lo, hi = lo - 0.5, hi + 0.5
        xs = left + plot_w * np.arange(n) / max(n - 1, 1)
        ys = y0 + panel_height * (1 - (y - lo) / (hi - lo))
        body.append(f'<rect x="{left}" y="{y0}" width="{plot_w}" height="{panel_height}" fill="none" stroke="#999"/>')
        for t in range(0, n, tick_every):
            tx = left + plot_w * t / max(n - 1, 1)
            body.append(f'<line x1="{_f(tx)}" y1="{y0 + panel_height}" x2="{_f(tx)}" y2="{y0 + panel_height + 4}" stroke="#555"/>')
            if t % (10 * tick_every) == 0 or k == len(names) - 1:
                body.append(f'<text x="{_f(tx)}" y="{y0 + panel_height + 14}" text-anchor="middle" font-size="8">{t}</text>')
        if lo < 0 < hi:
            zy = y0 + panel_height * (1 - (0 - lo) / (hi - lo))
            body.append(f'<line x1="{left}" y1="{_f(zy)}" x2="{left + plot_w}" y2="{_f(zy)}" stroke="#ccc"/>')
        body.append(f'<path d="{_path(xs, ys)}" fill="none" stroke="{_PALETTE[k % len(_PALETTE)]}" stroke-width="1.2"/>')
        body.append(f'<text x="5" y="{y0 + 12}">{escape(name)}</text>')
        body.append(f'<text x="{left - 4}" y="{y0 + 9}" text-anchor="end" font-size="8">{hi:.4g}</text>')
        body.append(f'<text x="{left - 4}" y="{y0 + panel_height}" text-anchor="end" font-size="8">{lo:.4g}</text>')
    return _doc(width, height, body)


def overlay(points, vertex_sets: dict | None = None, title: str = "", size: int = 520, tick_every: int = 10) -> str:
    """Contour drawn with a tick every ``tick_every`` samples and vertices
    marked: convex as filled circles, concave as filled squares. The y axis
    points up."""
    p = np.asarray(points, dtype=float)
    pad = 30
    lo, hi = p.min(axis=0), p.max(axis=0)
    scale = (size - 2 * pad) / float(max(hi - lo))
    def tr(q):
        q = np.atleast_2d(q)
        return np.column_stack([pad + (q[:, 0] - lo[0]) * scale, size - pad - (q[:, 1] - lo[1]) * scale])
    xy = tr(p)
    closed = np.vstack([xy, xy[:1]])
    body = [f'<text x="{pad}" y="15" font-size="12">{escape(title)}</text>']
    body.append(f'<path d="{_path(closed[:, 0], closed[:, 1])}" fill="none" stroke="#333" stroke-width="1"/>')
    for t in range(0, len(p), tick_every):
        body.append(f'<circle cx="{_f(xy[t, 0])}" cy="{_f(xy[t, 1])}" r="1.5" fill="#999"/>')
        body.append(f'<text x="{_f(xy[t, 0] + 3)}" y="{_f(xy[t, 1] - 3)}" font-size="7" fill="#777">{t}</text>')
    n = len(p)
    for k, (name, vs) in enumerate((vertex_sets or {}).items()):
        color = _PALETTE[k % len(_PALETTE)]
        for v in vs:
            i0 = int(np.floor(v.position)) % n
            frac = v.position - np.floor(v.position)
            q = tr((1 - frac) * p[i0] + frac * p[(i0 + 1) % n])[0]
            r = 5 - 1.2 * k if k < 3 else 2
            if v.label == CONVEX:
                body.append(f'<circle cx="{_f(q[0])}" cy="{_f(q[1])}" r="{_f(r)}" fill="{color}"/>')
            else:
                body.append(f'<rect x="{_f(q[0] - r)}" y="{_f(q[1] - r)}" width="{_f(2 * r)}" height="{_f(2 * r)}" fill="{color}"/>')
        body.append(f'<text x="{pad}" y="{size - 8 - 12 * k}" fill="{color}">{escape(name)}</text>')
    return _doc(size, size, body)
