"""Standalone SVG rendering of airfoil sample sets."""
from xml.sax.saxutils import escape

import numpy as np

from .geometry import N_COORDS, station_x

WIDTH = 1000
HEIGHT = 800
X_RANGE = (0.0, 1.0)
Y_RANGE = (-0.4, 0.4)
_LOOP = np.r_[np.arange(N_COORDS), 0]


def _points(y):
    x = station_x()[_LOOP]
    px = (x - X_RANGE[0]) / (X_RANGE[1] - X_RANGE[0]) * WIDTH
    py = (Y_RANGE[1] - np.asarray(y)[_LOOP]) / (Y_RANGE[1] - Y_RANGE[0]) * HEIGHT
    return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))


def render_svg(samples, mean=True, title=None, opacity=None):
    """SVG text with one polyline per sample and an optional dashed mean shape.

    The view box maps x in [0, 1] and y in [-0.4, 0.4] onto a
    1000 x 800 canvas (equal scale on both axes).
    """
    s = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if opacity is None:
        opacity = max(0.02, min(0.6, 6.0 / len(s)))
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    zero = Y_RANGE[1] / (Y_RANGE[1] - Y_RANGE[0]) * HEIGHT
    out.append(f'<line x1="0" y1="{zero:.3f}" x2="{WIDTH}" y2="{zero:.3f}" stroke="#cccccc" stroke-width="1"/>')
    out.append(f'<g fill="none" stroke="#1f77b4" stroke-width="1.5" stroke-opacity="{opacity:.4f}">')
    for y in s:
        out.append(f'<polyline points="{_points(y)}"/>')
    out.append("</g>")
    if mean:
        out.append(
            f'<polyline fill="none" stroke="#d62728" stroke-width="3" stroke-dasharray="12,8" '
            f'points="{_points(s.mean(axis=0))}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, samples, **kwargs):
    with open(path, "w") as fh:
        fh.write(render_svg(samples, **kwargs))
