"""Independent oracles shared by the test modules.

Nothing here calls the estimator or the package's classification code:
cells are classified with shapely's DE-9IM predicates and covers are
enumerated configuration by configuration.
"""
import math
import random
import sys

import numpy as np
import pytest
import shapely

SQRT2 = math.sqrt(2.0)


def shapely_state(poly: shapely.Polygon, x0, y0, x1, y1) -> int:
    """0 outside (open box misses the closed set), 1 inside (closed box in set), 2 otherwise."""
    box = shapely.box(x0, y0, x1, y1)
    if box.relate_pattern(poly, "FF*******"):
        return 0
    if poly.covers(box):
        return 1
    return 2


def brute_force_costs(poly: shapely.Polygon, lam: float, depth: int, root=((0.0, 0.0), 1.0)) -> np.ndarray:
    """Cost of every take/subdivide cover of the root down to ``depth``.

    Cells whose open box misses the set may be skipped; every other cell is
    either bought whole or split (above the depth cap).  Costs use the
    Euclidean diameter ``side * sqrt(2)``.
    """
    (ox, oy), side = root

    def h(level):
        d = side / 2**level * SQRT2
        return d * d + lam * d

    def rec(level, i, j):
        s = side / 2**level
        x0, y0 = ox + s * i, oy + s * j
        st = shapely_state(poly, x0, y0, x0 + s, y0 + s)
        if st == 0:
            return np.zeros(1)
        take = np.array([h(level)])
        if level == depth:
            return take
        combos = np.zeros(1)
        for a in (0, 1):
            for b in (0, 1):
                combos = np.add.outer(combos, rec(level + 1, 2 * i + a, 2 * j + b)).ravel()
        return np.concatenate([take, combos])

    return rec(0, 0, 0)


def random_star_polygon(rng: random.Random, lo=0.05, hi=0.95, kmin=3, kmax=8):
    """Simple polygon, star-shaped about a random centre, inside ``[lo, hi]^2``."""
    k = rng.randint(kmin, kmax)
    cx, cy = rng.uniform(0.4, 0.6), rng.uniform(0.4, 0.6)
    rmax = min(cx - lo, hi - cx, cy - lo, hi - cy)
    # keep consecutive angles apart so the polygon is not needle-thin
    angles = [2 * math.pi * i / k + rng.uniform(-0.3, 0.3) * 2 * math.pi / k for i in range(k)]
    pts = []
    for a in angles:
        r = rng.uniform(0.2, 1.0) * rmax
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return pts


@pytest.fixture
def unit_root():
    from mixgauge.dyadic import RootFrame

    return RootFrame((0.0, 0.0), 1.0)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for m in list(sys.modules.values()) if hasattr(m, "ACCEPTANCE_RESULTS")), None)
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for num in range(1, mod.N_CRITERIA + 1):
        line = mod.ACCEPTANCE_RESULTS.get(num, f"[----] AC{num:>2} not reported in this run")
        terminalreporter.write_line(line)
