"""Experiment drivers: scaling residuals, comparability sweeps, Minkowski
perimeter, additivity and monotonicity checks.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import shapely

from .dyadic import CellTree, RootFrame, default_root, measure, refine_until
from .errors import PreconditionError, ResourceError, UnsupportedDimensionError
from .gauge import GaugeParams
from .geometry import (
    Disk,
    Interval,
    Polygon,
    Shape,
    ShapeUnion,
    area,
    bounding_box,
    comb,
    koch,
    perimeter,
    polygon_grid_distance,
    rectangle,
    scale,
    star,
)

__all__ = [
    "standard_suite",
    "COMPARABILITY_IDS",
    "scaling_check",
    "ComparabilityReport",
    "comparability_sweep",
    "minkowski_perimeter",
    "additivity_check",
    "lambda_sweep",
    "monotonicity_battery",
    "fit_line",
]

CSV_COLUMNS = (
    "shape_id", "lambda", "depth", "converged", "mu_hat",
    "volume_cost", "surface_cost", "area", "perimeter", "ratio",
)

COMPARABILITY_IDS = (
    "square", "disk", "comb2", "comb4", "comb8", "comb16", "comb32",
    "star3", "star5", "star7", "star9",
)


def standard_suite() -> dict:
    """The named shapes used by the acceptance runs, in a fixed order."""
    suite = {"square": rectangle(), "disk": Disk((0.0, 0.0), 1.0)}
    for k in (2, 4, 8, 16, 32):
        suite[f"comb{k}"] = comb(k)
    for p in (3, 5, 7, 9):
        suite[f"star{p}"] = star(p)
    for k in range(5):
        suite[f"koch{k}"] = koch(k)
    return suite


def _is_power_of_two(t: float) -> bool:
    return t > 0 and math.isfinite(t) and math.frexp(t)[0] == 0.5


def scaling_check(shape: Shape, params: GaugeParams, t: float, max_depth: int,
                  root: Optional[RootFrame] = None, diam_convention: str = "diameter",
                  *, strict: bool = True, threads: int = 1) -> float:
    """Relative gap between ``mu(t E)`` at ``lam`` and ``t**n mu(E)`` at ``lam / t``.

    With ``t`` a power of two the scaled root realises the same dyadic
    configurations cell for cell, so the gap is pure rounding.  Other ``t``
    are refused unless ``strict=False``, in which case the number is
    informational only.
    """
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise PreconditionError(f"t must be positive and finite, got {t}")
    if strict and not _is_power_of_two(t):
        raise PreconditionError(f"t = {t} is not a power of two")
    root = root or default_root(shape)
    a = measure(scale(shape, t), params, max_depth, root=root.scaled(t),
                diam_convention=diam_convention, threads=threads).total
    b = t ** params.n * measure(shape, params.with_lam(params.lam / t), max_depth, root=root,
                                diam_convention=diam_convention, threads=threads).total
    top = max(a, b)
    return 0.0 if top == 0 else abs(a - b) / top


@dataclass
class ComparabilityReport:
    rows: list = field(default_factory=list)
    ratio_min: float = math.nan
    ratio_max: float = math.nan

    @property
    def spread(self) -> float:
        return self.ratio_max / self.ratio_min if self.rows else math.nan

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items() if k in CSV_COLUMNS})
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"rows": self.rows, "ratio_min": self.ratio_min, "ratio_max": self.ratio_max}


def _named(shapes) -> list:
    if isinstance(shapes, dict):
        return list(shapes.items())
    out = []
    for i, s in enumerate(shapes):
        out.append(s if isinstance(s, tuple) else (f"shape{i}", s))
    return out


def comparability_sweep(shapes, lambdas: Sequence[float], depth: int,
                        diam_convention: str = "diameter", *, roots: Optional[dict] = None,
                        rel_tol: float = 1e-3, threads: int = 1) -> ComparabilityReport:
    """``mu_hat / (area + lam * perimeter)`` over a grid of shapes and ``lam``.

    ``shapes`` is a dict ``{id: shape}``, a list of ``(id, shape)`` pairs or
    a plain list.  Every row is evaluated at the full ``depth``; the
    ``converged`` column records whether the last refinement step moved the
    optimum by at most ``rel_tol``.
    """
    named = _named(shapes)
    for sid, s in named:
        if not isinstance(s, (Polygon, Disk)):
            raise PreconditionError(f"{sid}: comparability needs a planar polygon or disk")
    if any(not lam > 0 for lam in lambdas):
        raise PreconditionError("lambdas must be positive")
    rows = []
    for sid, s in named:
        if not lambdas:
            break
        tree = CellTree(s, (roots or {}).get(sid), threads=threads)
        A, P = area(s), float(perimeter(s))
        for lam in lambdas:
            r = refine_until(s, GaugeParams(2, float(lam)), rel_tol=rel_tol, depth_cap=depth,
                             min_depth=depth, diam_convention=diam_convention, tree=tree)
            rows.append({
                "shape_id": sid,
                "lambda": float(lam),
                "depth": r.max_depth,
                "converged": bool(r.converged),
                "mu_hat": r.total,
                "volume_cost": r.volume_cost,
                "surface_cost": r.surface_cost,
                "area": A,
                "perimeter": P,
                "ratio": r.total / (A + lam * P),
            })
    if not rows:
        return ComparabilityReport()
    ratios = [row["ratio"] for row in rows]
    return ComparabilityReport(rows, min(ratios), max(ratios))


def fit_line(x, y):
    """Least-squares ``y = a + b x``; returns ``(a, b, r_squared)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(a), float(b), r2


_MAX_GRID = 40_000_000


def minkowski_perimeter(shape: Shape, epsilon: float, resolution: int = 8) -> float:
    """Perimeter from the two-sided tube ``{x : dist(x, boundary) < eps}``.

    The tube area is counted on a grid of spacing ``eps / resolution`` and
    divided by ``2 eps``.
    """
    eps = float(epsilon)
    if not (eps > 0 and math.isfinite(eps)):
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")
    if resolution < 8:
        raise PreconditionError("grid spacing must be at most eps/8")
    if isinstance(shape, Polygon):
        ax, ay, bx, by = shape.edges()
        feature = float(np.hypot(bx - ax, by - ay).min())
    elif isinstance(shape, Disk):
        feature = shape.radius
    else:
        raise UnsupportedDimensionError("Minkowski perimeter needs a planar polygon or disk")
    if eps >= feature / 4:
        raise PreconditionError(f"epsilon {eps} too large for feature size {feature}")
    h = eps / resolution
    lo, hi = bounding_box(shape)
    nx = int(math.ceil((hi[0] - lo[0] + 2 * eps) / h))
    ny = int(math.ceil((hi[1] - lo[1] + 2 * eps) / h))
    if nx * ny > _MAX_GRID:
        raise ResourceError(f"Minkowski grid of {nx}x{ny} points is too large")
    xs = lo[0] - eps + h * (np.arange(nx) + 0.5)
    ys = lo[1] - eps + h * (np.arange(ny) + 0.5)
    count = 0
    rows = max(1, (1 << 21) // nx)
    for s in range(0, ny, rows):
        gx, gy = np.meshgrid(xs, ys[s:s + rows])
        gx, gy = gx.ravel(), gy.ravel()
        if isinstance(shape, Disk):
            d = np.abs(np.hypot(gx - shape.center[0], gy - shape.center[1]) - shape.radius)
        else:
            d = polygon_grid_distance(shape, gx, gy)
        count += int(np.count_nonzero(d < eps))
    return count * h * h / (2 * eps)


def _separation(a: Shape, b: Shape) -> float:
    if isinstance(a, Interval) and isinstance(b, Interval):
        return max(b.a - a.b, a.a - b.b)
    if isinstance(a, Disk) and isinstance(b, Disk):
        return math.dist(a.center, b.center) - a.radius - b.radius
    if isinstance(a, Disk):
        a, b = b, a
    if isinstance(a, Polygon) and isinstance(b, Polygon):
        return float(shapely.distance(shapely.Polygon(a.vertices), shapely.Polygon(b.vertices)))
    if isinstance(a, Polygon) and isinstance(b, Disk):
        return float(shapely.distance(shapely.Polygon(a.vertices), shapely.Point(b.center))) - b.radius
    raise PreconditionError("additivity_check supports intervals, polygons and disks")


def additivity_check(shape_a: Shape, shape_b: Optional[Shape], params: GaugeParams, depth: int,
                     root: Optional[RootFrame] = None, diam_convention: str = "diameter",
                     *, threads: int = 1) -> float:
    """``|mu(A u B) - mu(A) - mu(B)| / mu(A u B)`` in one shared root frame.

    The sets must be disjoint.  Below a separation of two finest cells the
    result is reported but carries no guarantee (a warning is issued).
    """
    if shape_b is None:
        return 0.0
    sep = _separation(shape_a, shape_b)
    if not sep > 0:
        raise PreconditionError("shapes overlap or touch")
    union = ShapeUnion((shape_a, shape_b))
    root = root or default_root(union)
    if sep < 2 * root.cell_side(depth):
        warnings.warn("separation below two finest cells; additivity not guaranteed", stacklevel=2)
    kw = dict(root=root, diam_convention=diam_convention, threads=threads)
    u = measure(union, params, depth, **kw).total
    a = measure(shape_a, params, depth, **kw).total
    b = measure(shape_b, params, depth, **kw).total
    return abs(u - a - b) / u if u else 0.0


def lambda_sweep(shape: Shape, lambdas: Sequence[float], depth: int,
                 root: Optional[RootFrame] = None, diam_convention: str = "diameter",
                 *, threads: int = 1):
    """``[(lam, total, bulk, boundary)]`` on one shared classification tree."""
    lambdas = [float(v) for v in lambdas]
    if any(b < a for a, b in zip(lambdas, lambdas[1:])):
        raise PreconditionError("lambdas must be sorted ascending")
    tree = CellTree(shape, root, threads=threads)
    out = []
    for lam in lambdas:
        r = measure(shape, GaugeParams(shape.dim, lam), depth, diam_convention=diam_convention, tree=tree)
        out.append((lam, r.total, r.volume_cost, lam * r.surface_cost))
    return out


def monotonicity_battery(shapes, lambdas: Sequence[float], depth: int,
                         diam_convention: str = "diameter", *, threads: int = 1) -> list:
    """Audit the order properties of the estimator; returns a list of violations.

    Checked per shape: totals nondecreasing in ``lam``, nonincreasing in
    depth (deeper search only adds options), the volume floor
    ``total >= n**(n/2) * area`` (``>= area`` for the side convention) and
    ``mu(E) <= mu(box)`` for the bounding rectangle in the same root.
    """
    lambdas = sorted(float(v) for v in lambdas)
    bad = []
    for sid, s in _named(shapes):
        tree = CellTree(s, threads=threads)
        n = s.dim
        floor = area(s) * (n ** (n / 2) if diam_convention == "diameter" else 1.0)
        prev = -math.inf
        box = None
        if isinstance(s, (Polygon, Disk)):
            lo, hi = bounding_box(s)
            box = CellTree(rectangle(hi[0] - lo[0], hi[1] - lo[1], lo), tree.root)
        for lam in lambdas:
            p = GaugeParams(n, lam)
            r = measure(s, p, depth, diam_convention=diam_convention, tree=tree)
            if r.total < prev:
                bad.append((sid, lam, "lambda", prev, r.total))
            prev = r.total
            for (d0, t0), (d1, t1) in zip(r.depth_trace, r.depth_trace[1:]):
                if t1 > t0:
                    bad.append((sid, lam, f"depth {d0}->{d1}", t0, t1))
            if r.total < floor:
                bad.append((sid, lam, "volume", floor, r.total))
            if box is not None:
                big = measure(box.shape, p, depth, diam_convention=diam_convention, tree=box).total
                if r.total > big:
                    bad.append((sid, lam, "inclusion", big, r.total))
    return bad
