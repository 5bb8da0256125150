"""Plain SVG 1.1 pictures of covers and Whitney decompositions."""
from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import quoteattr

import numpy as np

from .covering import WhitneyDecomposition
from .dyadic import CoverResult
from .geometry import Disk, Polygon, ShapeUnion, classify_boxes
from .kernels import STRADDLE

INTERIOR = "#808080"
BOUNDARY = "#d62728"
OUTLINE = "#1f77b4"


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def _outline(shape, px, py, scale):
    if shape is None:
        return []
    if isinstance(shape, ShapeUnion):
        return [line for p in shape.parts for line in _outline(p, px, py, scale)]
    if isinstance(shape, Polygon):
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in shape.vertices)
        return [f'<polygon class="outline" points="{pts}" fill="none" stroke="{OUTLINE}" stroke-width="1.5"/>']
    if isinstance(shape, Disk):
        cx, cy = shape.center
        return [f'<circle class="outline" cx="{_fmt(px(cx))}" cy="{_fmt(py(cy))}" r="{_fmt(shape.radius * scale)}" '
                f'fill="none" stroke="{OUTLINE}" stroke-width="1.5"/>']
    return []


def render_cover(result, shape=None, size: int = 1024, title: Optional[str] = None) -> str:
    """SVG text with one stroke-only rectangle per cell.

    Cells meeting the boundary are drawn red and interior cells gray.
    ``shape`` overrides the shape stored on ``result`` for the outline.
    """
    shape = shape if shape is not None else getattr(result, "shape", None)
    root = result.root
    cells = result.cubes if isinstance(result, WhitneyDecomposition) else result.cells
    scale = size / root.side
    ox, oy = root.origin

    def px(x):
        return (x - ox) * scale

    def py(y):
        return size - (y - oy) * scale

    boundary = np.zeros(len(cells), dtype=bool)
    if isinstance(result, CoverResult) and cells:
        strad = result.straddling
        if strad is not None and len(strad) == len(cells):
            boundary = np.asarray(strad, dtype=bool)
        elif shape is not None:
            lo = np.array([c.box()[0] for c in cells])
            hi = np.array([c.box()[1] for c in cells])
            boundary = classify_boxes(shape, lo, hi) == STRADDLE

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if title:
        out.append(f"<title>{quoteattr(title)[1:-1]}</title>")
    for cell, edge in zip(cells, boundary):
        (x0, y0), (x1, y1) = cell.box()
        kind, colour = ("boundary", BOUNDARY) if edge else ("interior", INTERIOR)
        out.append(
            f'<rect class="cell {kind}" x="{_fmt(px(x0))}" y="{_fmt(py(y1))}" '
            f'width="{_fmt((x1 - x0) * scale)}" height="{_fmt((y1 - y0) * scale)}" '
            f'fill="none" stroke="{colour}" stroke-width="0.5"/>'
        )
    out.extend(_outline(shape, px, py, scale))
    out.append("</svg>")
    return "\n".join(out) + "\n"
