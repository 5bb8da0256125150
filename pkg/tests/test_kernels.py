"""Exact predicates and backend equivalence."""
import os
import random
import subprocess
import sys

import numpy as np
import pytest
import shapely
from hypothesis import example, given, settings
from hypothesis import strategies as st

from mixgauge import _pykernels, kernels
from mixgauge.dyadic import CellTree
from mixgauge.geometry import comb, koch, star
from mixgauge.predicates import orient, orient_exact, point_in_polygon, segment_hits_open_box

from conftest import random_star_polygon

HAVE_C = kernels.BACKEND == "cython"
needs_c = pytest.mark.skipif(not HAVE_C, reason="compiled backend not built")

coord = st.integers(-4, 4).map(lambda v: v / 2)


def shapely_hits(ax, ay, bx, by, x0, y0, x1, y1):
    seg = shapely.LineString([(ax, ay), (bx, by)]) if (ax, ay) != (bx, by) else shapely.Point(ax, ay)
    m = seg.relate(shapely.box(x0, y0, x1, y1))
    # interior or boundary of the segment meets the interior of the box
    return m[0] != "F" or (len(m) > 3 and m[3] != "F")


def test_orient_filter_matches_exact_on_near_degenerate():
    rng = random.Random(1)
    for _ in range(2000):
        ax, ay = rng.random(), rng.random()
        bx, by = rng.random(), rng.random()
        t = rng.random()
        cx = ax + t * (bx - ax)
        cy = ay + t * (by - ay)
        assert orient(ax, ay, bx, by, cx, cy) == orient_exact(ax, ay, bx, by, cx, cy)


@settings(max_examples=400, deadline=None)
@given(ax=coord, ay=coord, bx=coord, by=coord, x0=coord, y0=coord, w=st.integers(1, 4), h=st.integers(1, 4))
@example(ax=0.5, ay=0.5, bx=0.5, by=0.5, x0=0.0, y0=0.0, w=2, h=2)  # zero-length segment inside the box
def test_segment_box_matches_de9im(ax, ay, bx, by, x0, y0, w, h):
    x1, y1 = x0 + w / 2, y0 + h / 2
    expected = shapely_hits(ax, ay, bx, by, x0, y0, x1, y1)
    assert segment_hits_open_box(ax, ay, bx, by, x0, y0, x1, y1) == expected
    for impl in (_pykernels,) + ((kernels.get_backend("cython"),) if HAVE_C else ()):
        got = impl.box_edges(np.array([ax, bx]), np.array([ay, by]), x0, y0, x1, y1)
        # a two-vertex "polygon" has the segment twice (edges 0 and 1)
        assert (got.size > 0) == expected


def test_point_in_polygon_matches_shapely():
    rng = random.Random(7)
    for _ in range(30):
        pts = random_star_polygon(rng)
        poly = shapely.Polygon(pts)
        xs, ys = np.array([p[0] for p in pts]), np.array([p[1] for p in pts])
        qx, qy = np.array([rng.random() for _ in range(300)]), np.array([rng.random() for _ in range(300)])
        expected = shapely.contains_xy(poly, qx, qy)
        assert np.array_equal(_pykernels.points_in_polygon(xs, ys, qx, qy), expected)
        if HAVE_C:
            assert np.array_equal(kernels.get_backend("cython").points_in_polygon(xs, ys, qx, qy), expected)
        for k in range(20):
            assert point_in_polygon(qx[k], qy[k], xs, ys) == expected[k]


@needs_c
@pytest.mark.parametrize("shape", [comb(16), koch(3), star(7)], ids=["comb16", "koch3", "star7"])
def test_backends_build_identical_trees(shape):
    a = CellTree(shape, backend="cython").grow(9)
    b = CellTree(shape, backend="python").grow(9)
    for L in range(10):
        assert np.array_equal(a.index[L], b.index[L])
        assert np.array_equal(a.state[L], b.state[L])
    assert np.array_equal(a._ptr, b._ptr) and np.array_equal(a._idx, b._idx)


@pytest.mark.parametrize("threads", [2, 3, 4])
def test_threaded_expansion_is_positional(threads):
    shape = comb(8)
    a = CellTree(shape, threads=1).grow(10)
    b = CellTree(shape, threads=threads).grow(10)
    for L in range(11):
        assert np.array_equal(a.state[L], b.state[L])


def test_classify_boxes_backends_agree():
    shape = koch(2)
    rng = np.random.default_rng(3)
    x0 = rng.uniform(-0.5, 1.5, 500)
    y0 = rng.uniform(-0.5, 1.5, 500)
    s = rng.uniform(0.01, 0.3, 500)
    ref = _pykernels.classify_boxes(shape.xs, shape.ys, x0, y0, x0 + s, y0 + s)
    poly = shapely.Polygon(shape.vertices)
    from conftest import shapely_state

    oracle = np.array([shapely_state(poly, a, b, a + w, b + w) for a, b, w in zip(x0, y0, s)])
    assert np.array_equal(ref, oracle)
    if HAVE_C:
        assert np.array_equal(kernels.get_backend("cython").classify_boxes(shape.xs, shape.ys, x0, y0, x0 + s, y0 + s), ref)


def test_pure_python_selected_by_env():
    code = "from mixgauge import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, MIXGAUGE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
