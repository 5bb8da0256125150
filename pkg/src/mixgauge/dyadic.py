"""Exact minimum-cost dyadic covers.

The estimator works in two stages.  A :class:`CellTree` classifies the
dyadic subdivision of a root cube against the shape, refining only
straddling cells; it does not depend on the gauge.  The dynamic program
then evaluates, bottom up,

    cost(cell) = 0                          outside
               = h(diam cell)               inside, or straddling at the depth cap
               = min(h(diam cell), sum of children costs)   straddling

so one tree serves every value of ``lam`` and every depth up to its own.
Child costs are always summed in lexicographic index order, which makes
totals bit-identical regardless of how the tree was built.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, FrameError, PreconditionError, ResourceError
from .gauge import GaugeParams, cell_powers, evaluate_powers
from .geometry import Polygon, Shape, bounding_box, classify_boxes, shape_from_json, shape_to_json
from .kernels import INSIDE, OUTSIDE, STRADDLE

__all__ = [
    "MAX_DEPTH",
    "RootFrame",
    "DyadicCell",
    "CellTree",
    "CoverResult",
    "default_root",
    "measure",
    "refine_until",
    "cost_decomposition",
]

MAX_DEPTH = 30
CONVENTIONS = ("diameter", "side")


@dataclass(frozen=True)
class RootFrame:
    """Axis-aligned root cube ``origin + side * [0, 1]^n``."""

    origin: tuple
    side: float

    def __post_init__(self):
        origin = tuple(float(v) for v in self.origin)
        side = float(self.side)
        if not (math.isfinite(side) and side > 0) or not all(math.isfinite(v) for v in origin):
            raise FrameError(f"invalid root frame origin={self.origin!r} side={self.side!r}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "side", side)

    @property
    def n(self) -> int:
        return len(self.origin)

    def cell_side(self, level: int) -> float:
        return math.ldexp(self.side, -level)

    def scaled(self, t: float) -> "RootFrame":
        return RootFrame(tuple(t * v for v in self.origin), t * self.side)

    def contains_box(self, lo, hi) -> bool:
        return all(o <= a and b <= o + self.side for o, a, b in zip(self.origin, lo, hi))

    def to_json(self) -> dict:
        return {"origin": list(self.origin), "side": self.side}

    @classmethod
    def from_json(cls, obj) -> "RootFrame":
        return cls(tuple(obj["origin"]), obj["side"])


@dataclass(frozen=True)
class DyadicCell:
    level: int
    index: tuple
    root: RootFrame

    def __post_init__(self):
        if self.level < 0 or len(self.index) != self.root.n:
            raise DomainError("bad dyadic cell")
        if not all(0 <= i < (1 << self.level) for i in self.index):
            raise DomainError(f"index {self.index} out of range at level {self.level}")

    @property
    def side(self) -> float:
        return self.root.cell_side(self.level)

    @property
    def diam(self) -> float:
        return self.side * math.sqrt(self.root.n)

    def box(self):
        """``(lo, hi)`` corners, computed exactly as the kernels compute them."""
        s = self.side
        lo = tuple(o + s * float(i) for o, i in zip(self.root.origin, self.index))
        hi = tuple(o + s * float(i + 1) for o, i in zip(self.root.origin, self.index))
        return lo, hi

    def children(self):
        return [
            DyadicCell(self.level + 1, tuple(2 * i + b for i, b in zip(self.index, bits)), self.root)
            for bits in itertools.product((0, 1), repeat=self.root.n)
        ]


def default_root(shape: Shape) -> RootFrame:
    """Smallest cube around the bounding box, inflated 1%, on a coarse binary grid.

    Origin and side are multiples of ``2**(floor(log2(extent)) - 10)``, so cell
    corners down to level 30 are exact binary fractions and scaling the shape
    by a power of two scales the root exactly.
    """
    lo, hi = bounding_box(shape)
    extent = max(b - a for a, b in zip(lo, hi))
    q = math.ldexp(1.0, math.frexp(extent)[1] - 11)
    side = math.ceil(1.01 * extent / q) * q
    origin = []
    for a, b in zip(lo, hi):
        o = math.floor((0.5 * (a + b) - 0.5 * side) / q) * q
        while o + side < b:
            o += q
        origin.append(o)
    return RootFrame(tuple(origin), side)


def _powers(root: RootFrame, depth: int, convention: str):
    """Per-level ``(diam**n, diam**(n-1))``."""
    if convention not in CONVENTIONS:
        raise PreconditionError(f"diam_convention must be one of {CONVENTIONS}, got {convention!r}")
    return [cell_powers(root.n, root.cell_side(L), convention) for L in range(depth + 1)]


class CellTree:
    """Classification of the straddling-refined dyadic tree of a root cube.

    Level ``L`` holds index and state arrays for the children of the
    straddling cells of level ``L - 1``, in parent order, each parent's
    ``2**n`` children in lexicographic index order.
    """

    def __init__(self, shape: Shape, root: Optional[RootFrame] = None, threads: int = 1, backend=None):
        self.shape = shape
        self.root = root if root is not None else default_root(shape)
        self.n = shape.dim
        if self.root.n != self.n:
            raise FrameError(f"root frame is {self.root.n}D but the shape is {self.n}D")
        lo, hi = bounding_box(shape)
        if not self.root.contains_box(lo, hi):
            raise FrameError("shape escapes the root frame")
        self.threads = max(1, int(threads))
        self.backend = backend
        self._offsets = np.array(list(itertools.product((0, 1), repeat=self.n)), dtype=np.int64)
        self.index = [np.zeros((1, self.n), dtype=np.int64)]
        rlo = np.array([self.root.origin])
        rhi = rlo + self.root.side
        self._polygon = isinstance(shape, Polygon)
        if self._polygon:
            xs, ys = shape.xs, shape.ys
            edges = kernels.box_edges(xs, ys, rlo[0, 0], rlo[0, 1], rhi[0, 0], rhi[0, 1], backend=backend)
            state = kernels.classify_boxes(xs, ys, rlo[:, 0], rlo[:, 1], rhi[:, 0], rhi[:, 1], backend=backend)
            self._ptr = np.array([0, edges.size], dtype=np.int64) if state[0] == STRADDLE else np.zeros(1, np.int64)
            self._idx = edges if state[0] == STRADDLE else np.zeros(0, np.int64)
        else:
            state = classify_boxes(shape, rlo, rhi)
        self.state = [np.asarray(state, dtype=np.int8)]

    @property
    def depth(self) -> int:
        return len(self.state) - 1

    def grow(self, depth: int) -> "CellTree":
        if depth > MAX_DEPTH:
            raise ResourceError(f"max_depth {depth} exceeds the hard limit {MAX_DEPTH}")
        while self.depth < depth:
            self._grow_one()
        return self

    def _grow_one(self):
        L = self.depth
        parents = self.index[L][self.state[L] == STRADDLE]
        children = (2 * parents[:, None, :] + self._offsets[None, :, :]).reshape(-1, self.n)
        cs = self.root.cell_side(L + 1)
        if self._polygon:
            ox, oy = self.root.origin
            states, self._ptr, self._idx = kernels.expand_level(
                self.shape.xs, self.shape.ys, ox, oy, cs,
                parents[:, 0], parents[:, 1], self._ptr, self._idx,
                threads=self.threads, backend=self.backend,
            )
        else:
            origin = np.array(self.root.origin)
            lo = origin + cs * children.astype(np.float64)
            hi = origin + cs * (children + 1).astype(np.float64)
            states = classify_boxes(self.shape, lo, hi)
        self.index.append(children)
        self.state.append(np.asarray(states, dtype=np.int8))

    def node_count(self) -> int:
        return sum(s.size for s in self.state)

    def exhausted_at(self, level: int) -> bool:
        """True when no cell at ``level`` straddles, so deeper search changes nothing."""
        return not np.any(self.state[level] == STRADDLE)


def _solve(tree: CellTree, hs: Sequence[float], depth: int):
    """Bottom-up pass for ``max_depth = depth``: root cost and child sums per level."""
    k = 1 << tree.n
    sums = {}
    cost = None
    for L in range(depth, -1, -1):
        st = tree.state[L]
        c = np.where(st == INSIDE, hs[L], 0.0)
        strad = st == STRADDLE
        if L == depth:
            c[strad] = hs[L]
        else:
            ch = cost.reshape(-1, k)
            s = ch[:, 0].copy()
            for j in range(1, k):
                s = s + ch[:, j]
            sums[L] = s
            c[strad] = np.minimum(hs[L], s)
        cost = c
    return float(cost[0]), sums


def _select(tree: CellTree, hs, sums, depth: int):
    """Top-down recovery of the optimal cover; ties keep the coarser cell."""
    k = 1 << tree.n
    picked = []
    active = np.ones(1, dtype=bool)
    for L in range(depth + 1):
        st = tree.state[L]
        take = active & (st == INSIDE)
        strad = st == STRADDLE
        if L == depth:
            take |= active & strad
            picked.append((L, np.flatnonzero(take)))
            break
        sr = active[strad]
        keep = hs[L] <= sums[L]
        taken_strad = np.zeros(st.size, dtype=bool)
        taken_strad[np.flatnonzero(strad)[sr & keep]] = True
        take |= taken_strad
        picked.append((L, np.flatnonzero(take)))
        active = np.repeat(sr & ~keep, k)
        if not active.any():
            break
    return picked


@dataclass
class CoverResult:
    """An optimal dyadic cover and its cost bookkeeping."""

    cells: list
    volume_cost: float
    surface_cost: float
    total: float
    depth_trace: list
    params: GaugeParams
    diam_convention: str
    root: RootFrame
    max_depth: int
    converged: bool = False
    shape: Optional[Shape] = field(default=None, repr=False, compare=False)
    straddling: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def to_json(self, include_shape: bool = True) -> dict:
        out = {
            "total": self.total,
            "volume_cost": self.volume_cost,
            "surface_cost": self.surface_cost,
            "lambda": self.params.lam,
            "n": self.params.n,
            "diam_convention": self.diam_convention,
            "max_depth": self.max_depth,
            "depth_trace": [[int(d), t] for d, t in self.depth_trace],
            "cells": [{"level": c.level, "index": list(c.index)} for c in self.cells],
            "root": self.root.to_json(),
            "converged": bool(self.converged),
        }
        if include_shape and self.shape is not None:
            try:
                out["shape"] = shape_to_json(self.shape)
            except Exception:
                pass
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CoverResult":
        root = RootFrame.from_json(obj["root"])
        cells = [DyadicCell(int(c["level"]), tuple(int(i) for i in c["index"]), root) for c in obj["cells"]]
        shape = shape_from_json(obj["shape"]) if "shape" in obj else None
        return cls(
            cells=cells,
            volume_cost=float(obj["volume_cost"]),
            surface_cost=float(obj["surface_cost"]),
            total=float(obj["total"]),
            depth_trace=[(int(d), float(t)) for d, t in obj["depth_trace"]],
            params=GaugeParams(int(obj["n"]), float(obj["lambda"])),
            diam_convention=obj["diam_convention"],
            root=root,
            max_depth=int(obj.get("max_depth", max((c.level for c in cells), default=0))),
            converged=bool(obj.get("converged", False)),
            shape=shape,
        )


def _result(tree, params, depth, convention, trace, converged, hs, sums):
    powers = _powers(tree.root, depth, convention)
    picked = _select(tree, hs, sums, depth)
    cells, strad, vol, surf = [], [], [], []
    for L, nodes in picked:
        idx = tree.index[L][nodes]
        cells.extend(DyadicCell(L, tuple(int(v) for v in row), tree.root) for row in idx)
        strad.append(tree.state[L][nodes] == STRADDLE)
        count = nodes.size
        vol.append(count * powers[L][0])
        surf.append(count * powers[L][1])
    volume_cost, surface_cost = math.fsum(vol), math.fsum(surf)
    return CoverResult(
        cells=cells,
        volume_cost=volume_cost,
        surface_cost=surface_cost,
        # the DP optimum (trace[-1]) agrees with this to rounding; the sum
        # form keeps total == volume_cost + lam * surface_cost exact
        total=volume_cost + params.lam * surface_cost,
        depth_trace=trace,
        params=params,
        diam_convention=convention,
        root=tree.root,
        max_depth=depth,
        converged=converged,
        shape=tree.shape,
        straddling=np.concatenate(strad) if strad else np.zeros(0, bool),
    )


def _check_params(shape, params):
    if params.n != shape.dim:
        raise PreconditionError(f"gauge dimension {params.n} does not match shape dimension {shape.dim}")


def _gauge_table(tree, params, depth, convention):
    return [evaluate_powers(params, rn, rn1) for rn, rn1 in _powers(tree.root, depth, convention)]


def _is_converged(tree, trace, d, rel_tol):
    if tree.exhausted_at(d):
        return True
    if d == 0:
        return False
    prev, cur = trace[d - 1][1], trace[d][1]
    return abs(cur - prev) <= rel_tol * cur


def measure(
    shape: Shape,
    params: GaugeParams,
    max_depth: int,
    root: Optional[RootFrame] = None,
    diam_convention: str = "diameter",
    *,
    threads: int = 1,
    rel_tol: float = 1e-3,
    tree: Optional[CellTree] = None,
) -> CoverResult:
    """Minimum cover cost over dyadic subdivisions of ``root`` down to ``max_depth``.

    ``depth_trace`` lists the optimum for every depth ``0..max_depth``.
    ``converged`` applies the :func:`refine_until` criterion at ``max_depth``.
    Pass a prebuilt ``tree`` to reuse classification across gauges.
    """
    if isinstance(max_depth, bool) or int(max_depth) != max_depth or max_depth < 0:
        raise PreconditionError(f"max_depth must be a nonnegative integer, got {max_depth!r}")
    if max_depth > MAX_DEPTH:
        raise ResourceError(f"max_depth {max_depth} exceeds the hard limit {MAX_DEPTH}")
    _check_params(shape, params)
    if tree is None:
        tree = CellTree(shape, root, threads=threads)
    elif root is not None and root != tree.root:
        raise FrameError("tree was built for a different root frame")
    tree.grow(max_depth)
    hs = _gauge_table(tree, params, max_depth, diam_convention)
    trace = []
    sums = None
    for d in range(max_depth + 1):
        total, sums = _solve(tree, hs, d)
        trace.append((d, total))
    converged = _is_converged(tree, trace, max_depth, rel_tol)
    return _result(tree, params, max_depth, diam_convention, trace, converged, hs, sums)


def refine_until(
    shape: Shape,
    params: GaugeParams,
    rel_tol: float = 1e-3,
    depth_cap: int = 12,
    *,
    min_depth: int = 4,
    root: Optional[RootFrame] = None,
    diam_convention: str = "diameter",
    threads: int = 1,
    tree: Optional[CellTree] = None,
) -> CoverResult:
    """Deepen the search until the optimum stabilises.

    Stops at the first depth where no cell straddles (deeper search cannot
    change anything) or, from ``min_depth`` on, where
    ``|total(d) - total(d-1)| <= rel_tol * total(d)``.  The default
    ``min_depth`` skips the plateau that shallow trees often show while the
    root cell is still the cheapest cover.  Reaching ``depth_cap`` first
    returns the capped result with ``converged = False``.
    """
    if not (0 < rel_tol < 0.5):
        raise PreconditionError(f"rel_tol must lie in (0, 0.5), got {rel_tol}")
    if depth_cap > MAX_DEPTH:
        raise ResourceError(f"depth_cap {depth_cap} exceeds the hard limit {MAX_DEPTH}")
    if depth_cap < 0 or min_depth < 0:
        raise PreconditionError("depth_cap and min_depth must be nonnegative")
    min_depth = min(min_depth, depth_cap)
    _check_params(shape, params)
    if tree is None:
        tree = CellTree(shape, root, threads=threads)
    elif root is not None and root != tree.root:
        raise FrameError("tree was built for a different root frame")
    trace = []
    for d in range(depth_cap + 1):
        tree.grow(d)
        hs = _gauge_table(tree, params, d, diam_convention)
        total, sums = _solve(tree, hs, d)
        trace.append((d, total))
        done = tree.exhausted_at(d) or (d >= min_depth and _is_converged(tree, trace, d, rel_tol))
        if done or d == depth_cap:
            return _result(tree, params, d, diam_convention, trace, done, hs, sums)
    raise AssertionError("unreachable")


def cost_decomposition(result: CoverResult):
    """``(bulk, boundary)`` = ``(volume_cost, lam * surface_cost)``."""
    return result.volume_cost, result.params.lam * result.surface_cost
