"""Covering machinery: Whitney decompositions, Vitali selection and a
certified lower bound on the boundary part of a cover's cost.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import shapely

from .dyadic import DyadicCell, RootFrame, default_root
from .errors import CoverageError, DomainError, PreconditionError, ResourceError, UnsupportedDimensionError
from .geometry import (
    Disk,
    Polygon,
    Shape,
    ShapeUnion,
    area,
    box_boundary_distance,
    classify_boxes,
    perimeter,
    shape_from_json,
    shape_to_json,
)
from .kernels import INSIDE, OUTSIDE, STRADDLE

__all__ = [
    "WHITNEY_LOW",
    "WHITNEY_HIGH",
    "WhitneyDecomposition",
    "whitney_decompose",
    "whitney_cost_sums",
    "Ball",
    "vitali_select",
    "BoundaryBound",
    "boundary_lower_bound",
]

# accepted cubes satisfy WHITNEY_LOW * diam <= dist(Q, boundary) <= WHITNEY_HIGH * diam
WHITNEY_LOW = 1.0
WHITNEY_HIGH = 4.0
# keeps accepted ratios strictly inside [1, 4] so independent distance
# computations never see a rounding-level violation
_GUARD = 1e-12


@dataclass
class WhitneyDecomposition:
    cubes: list
    shape: Shape = field(repr=False)
    root: RootFrame
    coverage_defect: float
    dist_ratio_min: float
    dist_ratio_max: float
    max_level: int
    distances: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> dict:
        out = {
            "n": 2,
            "max_level": self.max_level,
            "cells": [{"level": c.level, "index": list(c.index)} for c in self.cubes],
            "root": self.root.to_json(),
            "coverage_defect": self.coverage_defect,
            "dist_ratio_min": self.dist_ratio_min,
            "dist_ratio_max": self.dist_ratio_max,
        }
        try:
            out["shape"] = shape_to_json(self.shape)
        except Exception:
            pass
        return out

    @classmethod
    def from_json(cls, obj) -> "WhitneyDecomposition":
        root = RootFrame.from_json(obj["root"])
        cubes = [DyadicCell(int(c["level"]), tuple(c["index"]), root) for c in obj["cells"]]
        return cls(
            cubes=cubes,
            shape=shape_from_json(obj["shape"]) if "shape" in obj else None,
            root=root,
            coverage_defect=float(obj["coverage_defect"]),
            dist_ratio_min=float(obj["dist_ratio_min"]),
            dist_ratio_max=float(obj["dist_ratio_max"]),
            max_level=int(obj.get("max_level", 0)),
        )


def whitney_decompose(shape: Shape, min_level: int = 0, max_level: int = 12,
                      root: Optional[RootFrame] = None) -> WhitneyDecomposition:
    """Dyadic Whitney decomposition of the interior of a planar polygon or disk.

    Cells are refined breadth-first; an inside cell is accepted once
    ``diam <= dist(Q, boundary) <= 4 diam`` and its level is at least
    ``min_level``.  Cells still unresolved at ``max_level`` are dropped and
    show up in ``coverage_defect``.
    """
    if getattr(shape, "dim", None) != 2 or not isinstance(shape, (Polygon, Disk, ShapeUnion)):
        raise UnsupportedDimensionError("Whitney decomposition needs a bounded planar polygon or disk")
    if max_level > 24:
        raise ResourceError(f"max_level {max_level} exceeds 24")
    if not 0 <= min_level <= max_level:
        raise PreconditionError("need 0 <= min_level <= max_level")
    root = root or default_root(shape)
    origin = np.array(root.origin)
    offsets = np.array([(0, 0), (0, 1), (1, 0), (1, 1)], dtype=np.int64)
    cand = np.zeros((1, 2), dtype=np.int64)
    cubes, dists, ratios, cube_area = [], [], [], []
    for L in range(max_level + 1):
        if cand.size == 0:
            break
        s = root.cell_side(L)
        diam = s * math.sqrt(2)
        lo = origin + s * cand.astype(np.float64)
        hi = origin + s * (cand + 1).astype(np.float64)
        st = classify_boxes(shape, lo, hi)
        inside = np.flatnonzero(st == INSIDE)
        dist = box_boundary_distance(shape, lo[inside], hi[inside]) if inside.size else np.zeros(0)
        ok = (dist >= WHITNEY_LOW * diam * (1 + _GUARD)) & (dist <= WHITNEY_HIGH * diam * (1 - _GUARD))
        if L < min_level:
            ok[:] = False
        acc = inside[ok]
        for row, d in zip(cand[acc], dist[ok]):
            cubes.append(DyadicCell(L, (int(row[0]), int(row[1])), root))
            dists.append(d)
            ratios.append(d / diam)
        cube_area.append(acc.size * s * s)
        refine = np.ones(st.size, dtype=bool)
        refine[st == OUTSIDE] = False
        refine[acc] = False
        parents = cand[refine]
        cand = (2 * parents[:, None, :] + offsets[None, :, :]).reshape(-1, 2)
    defect = area(shape) - math.fsum(cube_area)
    ratios = np.array(ratios)
    return WhitneyDecomposition(
        cubes=cubes,
        shape=shape,
        root=root,
        coverage_defect=defect,
        dist_ratio_min=float(ratios.min()) if ratios.size else math.nan,
        dist_ratio_max=float(ratios.max()) if ratios.size else math.nan,
        max_level=max_level,
        distances=np.array(dists),
    )


def whitney_cost_sums(dec: WhitneyDecomposition, ell0: float):
    """Split side-length power sums at ``ell0``.

    Returns ``(interior_n, interior_n1, boundary_n, boundary_n1)``: sums of
    ``side**2`` and ``side`` over cubes with side ``>= ell0`` (interior)
    and ``< ell0`` (boundary).
    """
    if not ell0 > 0:
        raise DomainError("ell0 must be positive")
    sides = np.array([c.side for c in dec.cubes])
    big = sides >= ell0
    n = 2
    return (
        math.fsum(sides[big] ** n),
        math.fsum(sides[big] ** (n - 1)),
        math.fsum(sides[~big] ** n),
        math.fsum(sides[~big] ** (n - 1)),
    )


# -- Vitali ---------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0) or not all(math.isfinite(v) for v in c):
            raise DomainError(f"ball needs a finite center and positive radius, got {self.center!r}, {r!r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def intersects(self, other: "Ball") -> bool:
        return math.dist(self.center, other.center) <= self.radius + other.radius


def vitali_select(balls: Sequence[Ball]) -> list:
    """Greedy 5r selection.

    Balls are visited by decreasing radius (ties: lexicographic center) and
    kept when disjoint from everything kept so far.  Every input ball then
    meets a kept ball at least as large, so it lies in that ball's 5x dilate.
    """
    order = sorted(balls, key=lambda b: (-b.radius, b.center))
    chosen: list = []
    for b in order:
        if not any(b.intersects(c) for c in chosen):
            chosen.append(b)
    return chosen


# -- boundary lower bound ------------------------------------------------------

@dataclass
class BoundaryBound:
    """Certified lower bounds for a cover of a polygon.

    ``vol_lb``: the polygon area; any disjoint-interior cover has side-power
    sum at least this.  ``arc_lb``: total length of a disjoint (Vitali)
    subfamily of boundary arcs, certified ``>= perimeter / 5``.
    ``surf_lb``: sum over cells owning a selected arc of
    ``min(diam**(n-1), selected arc length)``; never exceeds the cover's
    surface cost, and is at least ``min_diam_factor * arc_lb``.
    """

    vol_lb: float
    surf_lb: float
    arc_lb: float
    min_diam_factor: float
    implied_lb: float
    perimeter: float
    boundary_cells: int

    def __iter__(self):
        yield self.vol_lb
        yield self.surf_lb


def _clip_params(ax, ay, bx, by, x0, y0, x1, y1):
    """Liang-Barsky clip of segments to closed boxes: ``(t_lo, t_hi, hit)``."""
    t_lo = np.zeros(np.broadcast_shapes(np.shape(ax), np.shape(x0)))
    t_hi = np.ones_like(t_lo)
    hit = np.ones(t_lo.shape, dtype=bool)
    for p, d, lo, hi in ((ax, bx - ax, x0, x1), (ay, by - ay, y0, y1)):
        p = np.broadcast_to(p, t_lo.shape)
        d = np.broadcast_to(d, t_lo.shape)
        lo = np.broadcast_to(lo, t_lo.shape)
        hi = np.broadcast_to(hi, t_lo.shape)
        flat = d == 0
        hit &= ~(flat & ((p < lo) | (p > hi)))
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (lo - p) / d
            tb = (hi - p) / d
        t_lo = np.where(flat, t_lo, np.maximum(t_lo, np.minimum(ta, tb)))
        t_hi = np.where(flat, t_hi, np.minimum(t_hi, np.maximum(ta, tb)))
    hit &= t_lo <= t_hi
    return t_lo, t_hi, hit


def _check_disjoint(cells):
    keys = {(c.level, c.index) for c in cells}
    if len(keys) != len(cells):
        raise CoverageError("cover lists a cell twice")
    for c in cells:
        ix = c.index
        for up in range(1, c.level + 1):
            if (c.level - up, tuple(i >> up for i in ix)) in keys:
                raise CoverageError(f"cell {c.level}:{c.index} overlaps an ancestor in the cover")


def _cell_arcs(shape: Polygon, lo, hi):
    """Arc-length intervals of the boundary inside each closed cell: (cell, start, length)."""
    ax, ay, bx, by = shape.edges()
    lengths = np.hypot(bx - ax, by - ay)
    offsets = np.concatenate([[0.0], np.cumsum(lengths)])
    P = offsets[-1]
    cell_ids, starts, ends = [], [], []
    rows = max(1, (1 << 19) // ax.size)
    for s in range(0, lo.shape[0], rows):
        sl = slice(s, s + rows)
        t0, t1, hit = _clip_params(ax, ay, bx, by, lo[sl, 0, None], lo[sl, 1, None], hi[sl, 0, None], hi[sl, 1, None])
        r, e = np.nonzero(hit)
        cell_ids.append(r + s)
        starts.append(offsets[e] + t0[r, e] * lengths[e])
        ends.append(offsets[e] + t1[r, e] * lengths[e])
    cell_ids = np.concatenate(cell_ids)
    starts = np.concatenate(starts)
    ends = np.concatenate(ends)
    arcs = []
    order = np.lexsort((starts, cell_ids))
    cur_cell, cur = None, []
    for k in order:
        c = int(cell_ids[k])
        if c != cur_cell:
            arcs.extend(_merge_cell_arcs(cur_cell, cur, P))
            cur_cell, cur = c, []
        cur.append((float(starts[k]), float(ends[k])))
    arcs.extend(_merge_cell_arcs(cur_cell, cur, P))
    return arcs, P


def _merge_cell_arcs(cell, intervals, P):
    if cell is None or not intervals:
        return []
    merged = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if len(merged) > 1 and merged[0][0] <= 0.0 and merged[-1][1] >= P:
        first = merged.pop(0)
        merged[-1][1] = P + first[1]
    return [(cell, a, b - a) for a, b in merged]


def _covers_circle(arcs, P, tol):
    pieces = []
    for _, a, length in arcs:
        b = a + length
        if length >= P:
            return True
        if b > P:
            pieces += [(a, P), (0.0, b - P)]
        else:
            pieces.append((a, b))
    pieces.sort()
    reach = 0.0
    for a, b in pieces:
        if a > reach + tol:
            return False
        reach = max(reach, b)
    return reach >= P - tol


def _vitali_arcs(arcs, P):
    """Greedy disjoint selection of closed arcs on a circle of length P."""
    order = sorted(range(len(arcs)), key=lambda i: (-arcs[i][2], arcs[i][1]))
    starts, ends, chosen = [], [], []
    for i in order:
        _, a, length = arcs[i]
        if length >= P:
            return [i]
        b = a + length
        clash = False
        for shift in (-P, 0.0, P):
            j = bisect.bisect_right(starts, b + shift) - 1
            if j >= 0 and ends[j] >= a + shift:
                clash = True
                break
        if not clash:
            j = bisect.bisect_left(starts, a)
            starts.insert(j, a)
            ends.insert(j, b)
            chosen.append(i)
    return chosen


def boundary_lower_bound(shape: Polygon, cells: Sequence[DyadicCell], lam: float,
                         diam_convention: str = "diameter") -> BoundaryBound:
    """Certify lower bounds for the volume and boundary parts of a cover.

    The cells must have pairwise disjoint interiors and cover the polygon;
    both are checked (dyadic ancestry and clipped-area bookkeeping).  Each
    cell meeting the boundary contributes the arcs of the arc-length
    parametrisation lying inside it; a greedy Vitali selection on those arcs
    keeps a disjoint subfamily of total length at least ``perimeter / 5``.
    """
    if not isinstance(shape, Polygon):
        raise UnsupportedDimensionError("boundary_lower_bound needs a polygon")
    if not cells:
        raise CoverageError("empty cover")
    _check_disjoint(cells)
    n = 2
    lo = np.array([c.box()[0] for c in cells])
    hi = np.array([c.box()[1] for c in cells])
    A = area(shape)
    boxes = shapely.box(lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1])
    poly = shapely.Polygon(shape.vertices)
    covered = math.fsum(shapely.area(shapely.intersection(boxes, poly)))
    if covered < A * (1 - 1e-9):
        raise CoverageError(f"cells cover area {covered} of {A}")

    arcs, P = _cell_arcs(shape, lo, hi)
    if not _covers_circle(arcs, P, 1e-9 * P):
        raise CoverageError("cells do not cover the boundary")
    chosen = _vitali_arcs(arcs, P)
    arc_lb = math.fsum(min(arcs[i][2], P) for i in chosen)
    if arc_lb < P / 5 * (1 - 1e-12):
        raise AssertionError("Vitali selection lost more than the 5r lemma allows")

    per_cell: dict = {}
    for i in chosen:
        c = arcs[i][0]
        per_cell[c] = per_cell.get(c, 0.0) + min(arcs[i][2], P)
    factor = math.sqrt(n) if diam_convention == "diameter" else 1.0
    terms, ratios = [], []
    for c, s in per_cell.items():
        d = cells[c].side * factor
        dn1 = d ** (n - 1)
        terms.append(min(dn1, s))
        ratios.append(min(1.0, dn1 / s))
    surf_lb = math.fsum(terms)
    boundary_cells = len({a[0] for a in arcs})
    return BoundaryBound(
        vol_lb=A,
        surf_lb=surf_lb,
        arc_lb=arc_lb,
        min_diam_factor=min(ratios),
        implied_lb=A * (n ** (n / 2) if diam_convention == "diameter" else 1.0) + lam * surf_lb,
        perimeter=P,
        boundary_cells=boundary_cells,
    )
