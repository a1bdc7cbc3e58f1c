"""Minimal SVG scatter plots (points, lines, unit circle); no plotting dependency."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

LABEL_COLOURS = {1: "#1f77b4", -1: "#d62728"}


def scatter_svg(points, labels, *, title: str = "", wrong=None, lines=(), stars=(),
                unit_circle: bool = False, size: int = 400) -> str:
    """Scatter of 2-D points coloured by label.

    ``wrong`` marks misclassified points with a cross; ``lines`` are
    ``(p, q)`` segments; ``stars`` are highlighted training points.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    extra = [np.asarray(p, dtype=float) for seg in lines for p in seg] + [np.asarray(s, dtype=float) for s in stars]
    everything = np.vstack([pts, *extra]) if extra else pts
    if unit_circle:
        everything = np.vstack([everything, [[-1, -1], [1, 1]]])
    lo, hi = everything.min(axis=0), everything.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    lo, span = lo - 0.05 * span, span * 1.1
    pad = 30

    def xy(p):
        u = (np.asarray(p) - lo) / span
        return pad + u[0] * (size - 2 * pad), size - pad - u[1] * (size - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    if title:
        out.append(f'<text x="{size / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    # axes through the origin when it is in view
    x0, y0 = xy((0.0, 0.0))
    if pad <= x0 <= size - pad:
        out.append(f'<line x1="{x0:.2f}" y1="{pad}" x2="{x0:.2f}" y2="{size - pad}" stroke="#bbb"/>')
    if pad <= y0 <= size - pad:
        out.append(f'<line x1="{pad}" y1="{y0:.2f}" x2="{size - pad}" y2="{y0:.2f}" stroke="#bbb"/>')
    if unit_circle:
        cx, cy = xy((0.0, 0.0))
        rx = (size - 2 * pad) / span[0]
        ry = (size - 2 * pad) / span[1]
        out.append(f'<ellipse cx="{cx:.2f}" cy="{cy:.2f}" rx="{rx:.2f}" ry="{ry:.2f}" fill="none" stroke="#999"/>')
    for p, q in lines:
        (a, b), (c, d) = xy(p), xy(q)
        out.append(f'<line x1="{a:.2f}" y1="{b:.2f}" x2="{c:.2f}" y2="{d:.2f}" stroke="#2060c0" stroke-width="1.5"/>')
    wrong = np.zeros(len(pts), dtype=bool) if wrong is None else np.asarray(wrong, dtype=bool)
    for p, lab, bad in zip(pts, labels, wrong):
        a, b = xy(p)
        colour = LABEL_COLOURS.get(int(lab), "#555")
        if bad:
            out.append(f'<path d="M{a - 3:.2f},{b - 3:.2f}L{a + 3:.2f},{b + 3:.2f}'
                       f'M{a - 3:.2f},{b + 3:.2f}L{a + 3:.2f},{b - 3:.2f}" stroke="{colour}" stroke-width="1.5"/>')
        else:
            out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{colour}"/>')
    for s, colour in zip(stars, ("#2ca02c", "#ff7f0e")):
        a, b = xy(s)
        out.append(f'<rect x="{a - 4:.2f}" y="{b - 4:.2f}" width="8" height="8" fill="{colour}" '
                   f'transform="rotate(45 {a:.2f} {b:.2f})"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
