"""Dependency-free SVG log-log convergence plots."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["loglog_svg"]

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
MARKERS = ("circle", "square", "diamond", "triangle")


def _marker(kind, x, y, color, r=4.0):
    if kind == "circle":
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>'
    if kind == "square":
        return f'<rect x="{x - r:.2f}" y="{y - r:.2f}" width="{2 * r}" height="{2 * r}" fill="{color}"/>'
    if kind == "diamond":
        pts = f"{x:.2f},{y - r:.2f} {x + r:.2f},{y:.2f} {x:.2f},{y + r:.2f} {x - r:.2f},{y:.2f}"
    else:
        pts = f"{x:.2f},{y - r:.2f} {x + r:.2f},{y + r:.2f} {x - r:.2f},{y + r:.2f}"
    return f'<polygon points="{pts}" fill="{color}"/>'


def loglog_svg(h, series: dict, slopes=(1, 2), title: str = "", width: int = 560,
               height: int = 420) -> str:
    """Render ``series`` (label -> errors aligned with ``h``) on log-log axes.

    A reference triangle is drawn for each entry of ``slopes``.
    """
    h = [float(v) for v in h]
    ys = [float(v) for vals in series.values() for v in vals if v > 0]
    if not h or not ys:
        raise ValueError("nothing to plot")
    # reference triangles sit below the smallest value of the last series
    last = [float(v) for v in list(series.values())[-1] if v > 0] or ys
    hmin, hspan = min(h), max(h) / min(h)
    tris = []
    for j, s in enumerate(slopes):
        ha = hmin * hspan**0.15
        hb = ha * min(hspan**0.35, 4.0)
        ea = min(last) * 0.4 / (3.0**j)
        tris.append((s, ha, hb, ea, ea * (hb / ha) ** s))
        ys.append(ea)
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = math.floor(math.log10(min(h))), math.ceil(math.log10(max(h)))
    y0, y1 = math.floor(math.log10(min(ys))), math.ceil(math.log10(max(ys)))
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(v):
        return left + (math.log10(v) - x0) / (x1 - x0) * pw

    def py(v):
        return top + (y1 - math.log10(v)) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for d in range(x0, x1 + 1):
        x = px(10.0**d)
        out.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">1e{d}</text>')
    for d in range(y0, y1 + 1):
        y = py(10.0**d)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{d}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">h</text>')
    out.append(f'<text x="16" y="{top + ph / 2}" transform="rotate(-90 16 {top + ph / 2})" '
               f'text-anchor="middle">error</text>')
    if title:
        out.append(f'<text x="{left + pw / 2}" y="22" text-anchor="middle" font-size="14">'
                   f'{escape(title)}</text>')

    for i, (label, vals) in enumerate(series.items()):
        color, mk = COLORS[i % len(COLORS)], MARKERS[i % len(MARKERS)]
        pts = [(px(a), py(b)) for a, b in zip(h, vals) if b > 0]
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.extend(_marker(mk, x, y, color) for x, y in pts)
        ly = top + 16 + 20 * i
        out.append(_marker(mk, left + pw + 16, ly - 4, color))
        out.append(f'<text x="{left + pw + 26}" y="{ly}">{escape(label)}</text>')

    for s, ha, hb, ea, eb in tris:
        xa, xb, ya, yb = px(ha), px(hb), py(ea), py(eb)
        out.append(f'<polygon points="{xa:.2f},{ya:.2f} {xb:.2f},{ya:.2f} {xb:.2f},{yb:.2f}" '
                   f'fill="none" stroke="#555" stroke-dasharray="4 2"/>')
        out.append(f'<text x="{xb + 4:.2f}" y="{(ya + yb) / 2:.2f}" fill="#555">slope {s}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
