"""Robust geometric predicates.

Orientation uses a floating-point filter with Shewchuk's static error
bound and falls back to exact rational arithmetic when the filter cannot
decide.  The fallback is rare, so ``fractions.Fraction`` is fast enough.
Both kernel backends call :func:`orient_exact` for undecided cases, which
keeps them bit-for-bit consistent.
"""
from __future__ import annotations

from fractions import Fraction

# (3 + 16 eps) * eps with eps = 2**-53
CCW_ERRBOUND = 3.3306690738754716e-16


def orient_exact(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> int:
    """Exact sign of ``(b - a) x (c - a)``."""
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orient(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> int:
    """Sign of the orientation of ``c`` relative to the directed line ``a -> b``.

    +1 if ``c`` lies to the left, -1 to the right, 0 if collinear.
    """
    left = (bx - ax) * (cy - ay)
    right = (by - ay) * (cx - ax)
    det = left - right
    err = CCW_ERRBOUND * (abs(left) + abs(right))
    if det > err:
        return 1
    if -det > err:
        return -1
    return orient_exact(ax, ay, bx, by, cx, cy)


def compare_sq_dist_exact(px: float, py: float, qx: float, qy: float, r: float) -> int:
    """Exact sign of ``|p - q|**2 - r**2``."""
    px, py, qx, qy, r = map(Fraction, (px, py, qx, qy, r))
    d = (px - qx) ** 2 + (py - qy) ** 2 - r * r
    return (d > 0) - (d < 0)


def segment_hits_open_box(ax, ay, bx, by, x0, y0, x1, y1) -> bool:
    """True iff the closed segment ``ab`` meets the open box ``(x0,x1) x (y0,y1)``."""
    if max(ax, bx) <= x0 or min(ax, bx) >= x1:
        return False
    if max(ay, by) <= y0 or min(ay, by) >= y1:
        return False
    if ax == bx and ay == by:
        return True  # a point that passed the slab tests is inside
    pos = neg = False
    for cx, cy in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
        s = orient(ax, ay, bx, by, cx, cy)
        pos |= s > 0
        neg |= s < 0
    return pos and neg


def point_in_polygon(px: float, py: float, xs, ys) -> bool:
    """Crossing-number test; exact for points not on the boundary."""
    inside = False
    m = len(xs)
    for i in range(m):
        ax, ay = xs[i], ys[i]
        bx, by = xs[(i + 1) % m], ys[(i + 1) % m]
        if (ay > py) != (by > py):
            s = orient(ax, ay, bx, by, px, py)
            if (s > 0) == (by > ay):
                inside = not inside
    return inside
