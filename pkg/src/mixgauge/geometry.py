"""Shapes, test families and the geometric queries the cover search needs.

Shapes are immutable.  Every set is treated as closed: a cell is *inside*
when the whole closed cell lies in the closed set, *outside* when the open
cell misses the closed set, and *straddling* otherwise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, Union as TUnion

import numpy as np
import shapely

from . import kernels
from .errors import GeometryError, PreconditionError, UnsupportedDimensionError
from .kernels import INSIDE, OUTSIDE, STRADDLE
from .predicates import compare_sq_dist_exact

__all__ = [
    "CellClassification",
    "Interval",
    "Polygon",
    "Disk",
    "ImplicitSet",
    "ShapeUnion",
    "Shape",
    "area",
    "area_estimate",
    "perimeter",
    "classify_cell",
    "classify_boxes",
    "boundary_distance",
    "box_boundary_distance",
    "bounding_box",
    "scale",
    "translate",
    "rectangle",
    "comb",
    "comb_defaults",
    "koch",
    "star",
    "make_family",
    "shape_from_json",
    "shape_to_json",
]


class CellClassification(enum.IntEnum):
    FullyOutside = OUTSIDE
    FullyInside = INSIDE
    Straddling = STRADDLE


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    dim = 1

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise GeometryError("interval endpoints must be finite")
        if not a < b:
            raise GeometryError(f"interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon; vertices are stored counterclockwise."""

    vertices: tuple

    dim = 2

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(pts) >= 2 and pts[0] == pts[-1]:
            pts = pts[:-1]
        if len(pts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        if not all(math.isfinite(c) for p in pts for c in p):
            raise GeometryError("polygon vertices must be finite")
        for i in range(len(pts)):
            if pts[i] == pts[(i + 1) % len(pts)]:
                raise GeometryError(f"zero-length edge at vertex {i}")
        if not shapely.LinearRing(pts).is_simple:
            raise GeometryError("polygon is self-intersecting")
        if _signed_area(pts) < 0:
            pts = pts[::-1]
        elif _signed_area(pts) == 0:
            raise GeometryError("polygon has zero area")
        object.__setattr__(self, "vertices", pts)

    @cached_property
    def xs(self) -> np.ndarray:
        a = np.array([p[0] for p in self.vertices], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def ys(self) -> np.ndarray:
        a = np.array([p[1] for p in self.vertices], dtype=np.float64)
        a.flags.writeable = False
        return a

    def edges(self):
        """Edge endpoint arrays ``(ax, ay, bx, by)``."""
        return self.xs, self.ys, np.roll(self.xs, -1), np.roll(self.ys, -1)

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    dim = 2

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        r = float(self.radius)
        if len(c) != 2 or not all(math.isfinite(v) for v in c):
            raise GeometryError("disk center must be a finite 2D point")
        if not (math.isfinite(r) and r > 0):
            raise GeometryError(f"disk radius must be positive, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True, eq=False)
class ImplicitSet:
    """Set ``{sdf < 0}`` (closure ``{sdf <= 0}``) given by a signed-distance oracle.

    ``sdf / lipschitz_bound`` must be 1-Lipschitz, and ``bbox`` =
    ``(xmin, ymin, xmax, ymax)`` must contain the set.
    """

    sdf: Callable[[np.ndarray], float]
    lipschitz_bound: float
    bbox: tuple

    dim = 2

    def __post_init__(self):
        if not (self.lipschitz_bound > 0 and math.isfinite(self.lipschitz_bound)):
            raise GeometryError("lipschitz_bound must be positive")
        bbox = tuple(float(v) for v in self.bbox)
        if len(bbox) != 4 or not (bbox[0] < bbox[2] and bbox[1] < bbox[3]):
            raise GeometryError("bbox must be (xmin, ymin, xmax, ymax) with positive extent")
        object.__setattr__(self, "bbox", bbox)


@dataclass(frozen=True)
class ShapeUnion:
    """Union of pairwise disjoint closed shapes of the same dimension."""

    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise GeometryError("union needs at least one part")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise GeometryError("union parts must share a dimension")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim


Shape = TUnion[Interval, Polygon, Disk, ImplicitSet, ShapeUnion]


def _signed_area(pts) -> float:
    s = 0.0
    m = len(pts)
    for i in range(m):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % m]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


# -- measurements -----------------------------------------------------------

def area(shape: Shape) -> float:
    """Lebesgue measure (length for intervals).

    Exact for intervals, polygons (shoelace) and disks; implicit sets use a
    seeded Monte-Carlo estimate, see :func:`area_estimate`.
    """
    if isinstance(shape, Interval):
        return shape.b - shape.a
    if isinstance(shape, Polygon):
        return _signed_area(shape.vertices)
    if isinstance(shape, Disk):
        return math.pi * shape.radius**2
    if isinstance(shape, ImplicitSet):
        return area_estimate(shape)[0]
    if isinstance(shape, ShapeUnion):
        return math.fsum(area(p) for p in shape.parts)
    raise TypeError(f"not a shape: {shape!r}")


def area_estimate(shape: ImplicitSet, samples: int = 200_000, seed: int = 0):
    """Monte-Carlo area of an implicit set: ``(estimate, standard_error)``."""
    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = shape.bbox
    pts = rng.uniform((xmin, ymin), (xmax, ymax), size=(samples, 2))
    hit = np.array([shape.sdf(p) <= 0 for p in pts], dtype=np.float64)
    box = (xmax - xmin) * (ymax - ymin)
    p = hit.mean()
    return box * p, box * math.sqrt(max(p * (1 - p), 0.0) / samples)


def perimeter(shape: Shape) -> float:
    """Length of the boundary of a planar shape."""
    if isinstance(shape, Interval) or getattr(shape, "dim", 2) != 2:
        raise UnsupportedDimensionError("perimeter is defined for planar shapes only")
    if isinstance(shape, Polygon):
        ax, ay, bx, by = shape.edges()
        return math.fsum(np.hypot(bx - ax, by - ay))
    if isinstance(shape, Disk):
        return 2 * math.pi * shape.radius
    if isinstance(shape, ImplicitSet):
        from .analysis import minkowski_perimeter

        xmin, ymin, xmax, ymax = shape.bbox
        return minkowski_perimeter(shape, 1e-3 * max(xmax - xmin, ymax - ymin))
    if isinstance(shape, ShapeUnion):
        return math.fsum(perimeter(p) for p in shape.parts)
    raise TypeError(f"not a shape: {shape!r}")


def bounding_box(shape: Shape):
    """``(lo, hi)`` tuples of the axis-aligned bounding box."""
    if isinstance(shape, Interval):
        return (shape.a,), (shape.b,)
    if isinstance(shape, Polygon):
        return (float(shape.xs.min()), float(shape.ys.min())), (float(shape.xs.max()), float(shape.ys.max()))
    if isinstance(shape, Disk):
        (cx, cy), r = shape.center, shape.radius
        return (cx - r, cy - r), (cx + r, cy + r)
    if isinstance(shape, ImplicitSet):
        xmin, ymin, xmax, ymax = shape.bbox
        return (xmin, ymin), (xmax, ymax)
    if isinstance(shape, ShapeUnion):
        boxes = [bounding_box(p) for p in shape.parts]
        lo = tuple(min(b[0][k] for b in boxes) for k in range(shape.dim))
        hi = tuple(max(b[1][k] for b in boxes) for k in range(shape.dim))
        return lo, hi
    raise TypeError(f"not a shape: {shape!r}")


# -- classification -----------------------------------------------------------

def _classify_disk(shape: Disk, x0, y0, x1, y1):
    cx, cy = shape.center
    r2 = shape.radius**2
    nx = np.clip(cx, x0, x1)
    ny = np.clip(cy, y0, y1)
    dmin2 = (nx - cx) ** 2 + (ny - cy) ** 2
    fx = np.maximum(np.abs(x0 - cx), np.abs(x1 - cx))
    fy = np.maximum(np.abs(y0 - cy), np.abs(y1 - cy))
    dmax2 = fx**2 + fy**2
    tol = 1e-12 * r2
    states = np.full(np.shape(x0), STRADDLE, dtype=np.int8)
    states[dmax2 < r2 - tol] = INSIDE
    states[dmin2 > r2 + tol] = OUTSIDE
    amb = np.flatnonzero((np.abs(dmax2 - r2) <= tol) | (np.abs(dmin2 - r2) <= tol))
    for k in amb:
        bx0, by0, bx1, by1 = float(x0[k]), float(y0[k]), float(x1[k]), float(y1[k])
        corners = ((bx0, by0), (bx1, by0), (bx1, by1), (bx0, by1))
        if all(compare_sq_dist_exact(px, py, cx, cy, shape.radius) <= 0 for px, py in corners):
            states[k] = INSIDE
        elif compare_sq_dist_exact(min(max(cx, bx0), bx1), min(max(cy, by0), by1), cx, cy, shape.radius) >= 0:
            states[k] = OUTSIDE
        else:
            states[k] = STRADDLE
    return states


def _classify_implicit(shape: ImplicitSet, x0, y0, x1, y1):
    states = np.empty(np.shape(x0), dtype=np.int8)
    for k in range(states.size):
        c = np.array([0.5 * (x0[k] + x1[k]), 0.5 * (y0[k] + y1[k])])
        radius = 0.5 * math.hypot(x1[k] - x0[k], y1[k] - y0[k])
        d = float(shape.sdf(c))
        # margin guards the rounding in the radius itself
        reach = shape.lipschitz_bound * radius * (1 + 1e-12)
        if abs(d) > reach:
            states[k] = INSIDE if d < 0 else OUTSIDE
        else:
            states[k] = STRADDLE
    return states


def classify_boxes(shape: Shape, lo, hi) -> np.ndarray:
    """Vectorised classification of boxes ``[lo, hi]``; arrays of shape ``(N, dim)``."""
    lo = np.atleast_2d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_2d(np.asarray(hi, dtype=np.float64))
    if isinstance(shape, Interval):
        x0, x1 = lo[:, 0], hi[:, 0]
        states = np.full(x0.shape, STRADDLE, dtype=np.int8)
        states[(shape.a <= x0) & (x1 <= shape.b)] = INSIDE
        states[(x1 <= shape.a) | (x0 >= shape.b)] = OUTSIDE
        return states
    x0, y0, x1, y1 = lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1]
    if isinstance(shape, Polygon):
        return kernels.classify_boxes(shape.xs, shape.ys, x0, y0, x1, y1)
    if isinstance(shape, Disk):
        return _classify_disk(shape, x0, y0, x1, y1)
    if isinstance(shape, ImplicitSet):
        return _classify_implicit(shape, x0, y0, x1, y1)
    if isinstance(shape, ShapeUnion):
        return combine_union_states([classify_boxes(p, lo, hi) for p in shape.parts])
    raise TypeError(f"not a shape: {shape!r}")


def combine_union_states(per_part):
    """Combine per-part states of disjoint closed parts into union states."""
    per_part = np.vstack(per_part)
    states = np.full(per_part.shape[1], STRADDLE, dtype=np.int8)
    states[(per_part == OUTSIDE).all(axis=0)] = OUTSIDE
    # a connected cell inside one of several disjoint closed parts is inside the union
    states[(per_part == INSIDE).any(axis=0)] = INSIDE
    return states


def classify_cell(shape: Shape, cell) -> CellClassification:
    """Classify one dyadic cell (anything with a ``box()`` returning ``(lo, hi)``)."""
    lo, hi = cell.box()
    return CellClassification(int(classify_boxes(shape, [lo], [hi])[0]))


# -- distances ----------------------------------------------------------------

def _point_segment_distance(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / L2, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def boundary_distance(shape: Shape, point) -> float:
    """Unsigned Euclidean distance from ``point`` to the boundary of ``shape``."""
    if isinstance(shape, Interval):
        x = float(np.atleast_1d(point)[0])
        return min(abs(x - shape.a), abs(x - shape.b))
    px, py = (float(v) for v in point)
    if isinstance(shape, Polygon):
        ax, ay, bx, by = shape.edges()
        return float(_point_segment_distance(px, py, ax, ay, bx, by).min())
    if isinstance(shape, Disk):
        cx, cy = shape.center
        return abs(math.hypot(px - cx, py - cy) - shape.radius)
    if isinstance(shape, ImplicitSet):
        return abs(float(shape.sdf(np.array([px, py])))) / shape.lipschitz_bound
    if isinstance(shape, ShapeUnion):
        return min(boundary_distance(p, point) for p in shape.parts)
    raise TypeError(f"not a shape: {shape!r}")


def polygon_grid_distance(shape: Polygon, px, py, chunk: int = 1 << 21):
    """Distance to the polygon boundary for many points (flat arrays)."""
    ax, ay, bx, by = shape.edges()
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    out = np.empty(px.size)
    rows = max(1, chunk // ax.size)
    for s in range(0, px.size, rows):
        d = _point_segment_distance(px[s:s + rows, None], py[s:s + rows, None], ax, ay, bx, by)
        out[s:s + rows] = d.min(axis=1)
    return out


def box_boundary_distance(shape: Shape, lo, hi) -> np.ndarray:
    """Distance from each closed box to the boundary, for boxes inside the shape.

    Boxes must not cross the boundary (inside cells); the result is the
    smallest distance between the box and any boundary point.
    """
    lo = np.atleast_2d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_2d(np.asarray(hi, dtype=np.float64))
    x0, y0, x1, y1 = lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1]
    if isinstance(shape, Disk):
        cx, cy = shape.center
        fx = np.maximum(np.abs(x0 - cx), np.abs(x1 - cx))
        fy = np.maximum(np.abs(y0 - cy), np.abs(y1 - cy))
        return np.maximum(shape.radius - np.hypot(fx, fy), 0.0)
    if isinstance(shape, Polygon):
        ax, ay, bx, by = shape.edges()
        out = np.empty(x0.size)
        rows = max(1, (1 << 19) // ax.size)
        for s in range(0, x0.size, rows):
            sl = slice(s, s + rows)
            X0, Y0, X1, Y1 = x0[sl, None], y0[sl, None], x1[sl, None], y1[sl, None]
            best = np.full(np.broadcast_shapes(X0.shape, ax.shape), np.inf)
            for ex, ey in ((ax, ay), (bx, by)):
                dx = np.maximum(np.maximum(X0 - ex, ex - X1), 0.0)
                dy = np.maximum(np.maximum(Y0 - ey, ey - Y1), 0.0)
                best = np.minimum(best, np.hypot(dx, dy))
            for cx, cy in ((X0, Y0), (X1, Y0), (X1, Y1), (X0, Y1)):
                best = np.minimum(best, _point_segment_distance(cx, cy, ax, ay, bx, by))
            out[sl] = best.min(axis=1)
        return out
    if isinstance(shape, ShapeUnion):
        return np.min([box_boundary_distance(p, lo, hi) for p in shape.parts], axis=0)
    raise UnsupportedDimensionError(f"box distance not available for {type(shape).__name__}")


# -- transforms and families --------------------------------------------------

def scale(shape: Shape, t: float) -> Shape:
    """The dilate ``t * shape`` about the origin."""
    t = float(t)
    if isinstance(shape, Interval):
        return Interval(t * shape.a, t * shape.b)
    if isinstance(shape, Polygon):
        return Polygon(tuple((t * x, t * y) for x, y in shape.vertices))
    if isinstance(shape, Disk):
        return Disk((t * shape.center[0], t * shape.center[1]), t * shape.radius)
    if isinstance(shape, ImplicitSet):
        f = shape.sdf
        return ImplicitSet(lambda p: t * f(np.asarray(p) / t), shape.lipschitz_bound,
                           tuple(t * v for v in shape.bbox))
    if isinstance(shape, ShapeUnion):
        return ShapeUnion(tuple(scale(p, t) for p in shape.parts))
    raise TypeError(f"not a shape: {shape!r}")


def translate(shape: Shape, offset: Sequence[float]) -> Shape:
    if isinstance(shape, Interval):
        return Interval(shape.a + offset[0], shape.b + offset[0])
    if isinstance(shape, Polygon):
        return Polygon(tuple((x + offset[0], y + offset[1]) for x, y in shape.vertices))
    if isinstance(shape, Disk):
        return Disk((shape.center[0] + offset[0], shape.center[1] + offset[1]), shape.radius)
    if isinstance(shape, ShapeUnion):
        return ShapeUnion(tuple(translate(p, offset) for p in shape.parts))
    raise TypeError(f"cannot translate {type(shape).__name__}")


def rectangle(width: float = 1.0, height: float = 1.0, origin=(0.0, 0.0)) -> Polygon:
    if not (width > 0 and height > 0):
        raise GeometryError("rectangle sides must be positive")
    x, y = origin
    return Polygon(((x, y), (x + width, y), (x + width, y + height), (x, y + height)))


def comb_defaults(teeth: int):
    """Standard comb parameters: area stays 0.75 (0.625 for one tooth), perimeter ~ 2k."""
    k = int(teeth)
    return {
        "base": (k / 2, 1 / k),
        "tooth_depth": 0.5,
        "tooth_width": 1 / (2 * k) if k >= 2 else 0.25,
    }


def comb(teeth: int, base=None, tooth_depth=None, tooth_width=None) -> Polygon:
    """Rectangle ``[0, w] x [0, h]`` with ``teeth`` rectangular teeth on its top edge.

    Tooth ``j`` is centred in the ``j``-th of ``teeth`` equal slots.
    """
    if isinstance(teeth, bool) or int(teeth) != teeth or teeth < 1:
        raise GeometryError(f"comb needs an integer number of teeth >= 1, got {teeth!r}")
    k = int(teeth)
    d = comb_defaults(k)
    w, h = base if base is not None else d["base"]
    depth = d["tooth_depth"] if tooth_depth is None else float(tooth_depth)
    wt = d["tooth_width"] if tooth_width is None else float(tooth_width)
    if not (w > 0 and h > 0 and depth > 0 and wt > 0):
        raise GeometryError("comb dimensions must be positive")
    slot = w / k
    if not wt < slot:
        raise GeometryError(f"tooth width {wt} does not fit in slot {slot}; teeth would overlap")
    pts = [(0.0, 0.0), (w, 0.0), (w, h)]
    for j in reversed(range(k)):
        left = (j + 0.5) * slot - wt / 2
        pts += [(left + wt, h), (left + wt, h + depth), (left, h + depth), (left, h)]
    pts.append((0.0, h))
    return Polygon(tuple(pts))


def koch(order: int, side: float = 1.0) -> Polygon:
    """Koch snowflake prefractal of the given order on an equilateral triangle."""
    if isinstance(order, bool) or int(order) != order or order < 0:
        raise GeometryError(f"koch order must be an integer >= 0, got {order!r}")
    if not side > 0:
        raise GeometryError("koch side must be positive")
    s = float(side)
    pts = [(0.0, 0.0), (s, 0.0), (s / 2, s * math.sqrt(3) / 2)]
    c60, s60 = 0.5, math.sqrt(3) / 2
    for _ in range(int(order)):
        out = []
        for i in range(len(pts)):
            (px, py), (qx, qy) = pts[i], pts[(i + 1) % len(pts)]
            dx, dy = (qx - px) / 3, (qy - py) / 3
            a = (px + dx, py + dy)
            b = (px + 2 * dx, py + 2 * dy)
            # rotate the middle third by -60 degrees: the bump points outward for CCW input
            apex = (a[0] + c60 * dx + s60 * dy, a[1] - s60 * dx + c60 * dy)
            out += [(px, py), a, apex, b]
        pts = out
    return Polygon(tuple(pts))


def star(points: int = 5, r_in: float = 0.5, r_out: float = 1.0, center=(0.0, 0.0)) -> Polygon:
    if isinstance(points, bool) or int(points) != points or points < 2:
        raise GeometryError("star needs an integer number of points >= 2")
    if not (0 < r_in < r_out):
        raise GeometryError("star radii must satisfy 0 < r_in < r_out")
    m = int(points)
    cx, cy = center
    pts = []
    for j in range(2 * m):
        r = r_out if j % 2 == 0 else r_in
        ang = math.pi / 2 + math.pi * j / m
        pts.append((cx + r * math.cos(ang), cy + r * math.sin(ang)))
    return Polygon(tuple(pts))


_FAMILIES = {"comb": comb, "koch": koch, "star": star, "rectangle": rectangle}


def make_family(name: str, **params) -> Polygon:
    """Build a member of a named polygon family (comb, koch, star, rectangle)."""
    try:
        fn = _FAMILIES[name]
    except KeyError:
        raise GeometryError(f"unknown family {name!r}; expected one of {sorted(_FAMILIES)}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise GeometryError(f"bad parameters for {name}: {exc}") from None


# -- JSON ---------------------------------------------------------------------

def _num(obj, key):
    try:
        v = obj[key]
    except KeyError:
        raise GeometryError(f"shape is missing field {key!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise GeometryError(f"field {key!r} must be a number")
    return v


def shape_from_json(obj: dict) -> Shape:
    """Build a shape from its JSON object form."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise GeometryError("shape must be an object with a 'type' field")
    kind = obj["type"]
    if kind == "interval":
        return Interval(_num(obj, "a"), _num(obj, "b"))
    if kind == "polygon":
        return Polygon(tuple(tuple(v) for v in obj["vertices"]))
    if kind == "disk":
        return Disk(tuple(obj["center"]), _num(obj, "radius"))
    if kind == "comb":
        base = obj.get("base")
        return comb(_num(obj, "teeth"), None if base is None else tuple(base),
                    obj.get("tooth_depth"), obj.get("tooth_width"))
    if kind == "koch":
        return koch(_num(obj, "order"), obj.get("side", 1.0))
    if kind == "star":
        return star(obj.get("points", 5), obj.get("r_in", 0.5), obj.get("r_out", 1.0),
                    tuple(obj.get("center", (0.0, 0.0))))
    if kind == "rectangle":
        return rectangle(obj.get("width", 1.0), obj.get("height", 1.0), tuple(obj.get("origin", (0.0, 0.0))))
    if kind == "union":
        return ShapeUnion(tuple(shape_from_json(p) for p in obj["parts"]))
    raise GeometryError(f"unknown shape type {kind!r}")


def shape_to_json(shape: Shape) -> dict:
    if isinstance(shape, Interval):
        return {"type": "interval", "a": shape.a, "b": shape.b}
    if isinstance(shape, Polygon):
        return {"type": "polygon", "vertices": [list(v) for v in shape.vertices]}
    if isinstance(shape, Disk):
        return {"type": "disk", "center": list(shape.center), "radius": shape.radius}
    if isinstance(shape, ShapeUnion):
        return {"type": "union", "parts": [shape_to_json(p) for p in shape.parts]}
    raise PreconditionError(f"{type(shape).__name__} has no JSON form")

