"""Minimal standalone SVG charts (scatter and histogram)."""
from __future__ import annotations

from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640
HEIGHT = 480
MARGIN = 56


def _fmt(v: float) -> str:
    return f"{v:.4g}"


class _Frame:
    """Maps data coordinates into the plotting rectangle."""

    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0

    def px(self, x):
        return MARGIN + (np.asarray(x) - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, y):
        return HEIGHT - MARGIN - (np.asarray(y) - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)


def _document(body: Sequence[str], frame: _Frame, title: str, xlabel: str, ylabel: str) -> str:
    left, right = MARGIN, WIDTH - MARGIN
    top, bottom = MARGIN, HEIGHT - MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
    ]
    parts.extend(body)
    parts.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                 'fill="none" stroke="black"/>')
    for x in np.linspace(frame.x0, frame.x1, 5):
        px = float(frame.px(x))
        parts.append(f'<line x1="{px:.2f}" y1="{bottom}" x2="{px:.2f}" y2="{bottom + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{bottom + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{_fmt(x)}</text>')
    for y in np.linspace(frame.y0, frame.y1, 5):
        py = float(frame.py(y))
        parts.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{_fmt(y)}</text>')
    parts.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{escape(xlabel)}</text>')
    parts.append(f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" font-family="sans-serif" '
                 f'font-size="13" transform="rotate(-90 16 {HEIGHT / 2})">{escape(ylabel)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def scatter(points, title: str = "", circle_radius: Optional[float] = None,
            max_points: int = 40000) -> str:
    """Complex points in the plane, optionally with a reference circle at the origin."""
    z = np.asarray(points, dtype=complex).ravel()
    if z.size > max_points:
        z = z[np.linspace(0, z.size - 1, max_points).astype(int)]
    extent = float(np.max(np.abs(np.concatenate([z.real, z.imag])))) if z.size else 1.0
    if circle_radius:
        extent = max(extent, circle_radius)
    extent = 1.05 * extent if extent > 0 else 1.0
    frame = _Frame((-extent, extent), (-extent, extent))
    xs, ys = frame.px(z.real), frame.py(z.imag)
    body = [f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.2" fill="#1f4e9c" fill-opacity="0.5"/>'
            for x, y in zip(xs, ys)]
    if circle_radius:
        cx, cy = float(frame.px(0.0)), float(frame.py(0.0))
        rad = float(frame.px(circle_radius)) - cx
        body.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{rad:.2f}" fill="none" '
                    'stroke="#c0392b" stroke-width="1.5"/>')
    return _document(body, frame, title, "Re", "Im")


def histogram(values, weights=None, bins: int = 60, title: str = "", xlabel: str = "",
              density: bool = True) -> str:
    x = np.asarray(values, dtype=float).ravel()
    w = None if weights is None else np.asarray(weights, dtype=float).ravel()
    counts, edges = np.histogram(x, bins=bins, weights=w, density=density)
    top = float(counts.max()) if counts.size and counts.max() > 0 else 1.0
    frame = _Frame((float(edges[0]), float(edges[-1])), (0.0, 1.05 * top))
    body = []
    for c, a, b in zip(counts, edges[:-1], edges[1:]):
        x0, x1 = float(frame.px(a)), float(frame.px(b))
        y0, y1 = float(frame.py(c)), float(frame.py(0.0))
        body.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{max(x1 - x0, 0.0):.2f}" '
                    f'height="{max(y1 - y0, 0.0):.2f}" fill="#1f4e9c" stroke="white" stroke-width="0.5"/>')
    return _document(body, frame, title, xlabel, "density" if density else "weight")
