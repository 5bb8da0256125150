import json
import math
import random

import numpy as np
import pytest
import shapely
from hypothesis import given, settings
from hypothesis import strategies as st

from mixgauge.dyadic import DyadicCell, RootFrame
from mixgauge.errors import GeometryError, PreconditionError, UnsupportedDimensionError
from mixgauge.geometry import (
    CellClassification,
    Disk,
    ImplicitSet,
    Interval,
    Polygon,
    ShapeUnion,
    area,
    area_estimate,
    boundary_distance,
    bounding_box,
    box_boundary_distance,
    classify_boxes,
    classify_cell,
    comb,
    koch,
    make_family,
    perimeter,
    rectangle,
    scale,
    shape_from_json,
    shape_to_json,
    star,
    translate,
)

from conftest import random_star_polygon, shapely_state


class _Box:
    def __init__(self, lo, hi):
        self._b = (tuple(lo), tuple(hi))

    def box(self):
        return self._b


def _segments_cross(p, q, r, s):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    o1, o2, o3, o4 = orient(p, q, r), orient(p, q, s), orient(r, s, p), orient(r, s, q)
    return o1 * o2 < 0 and o3 * o4 < 0


def brute_simple(poly: Polygon) -> bool:
    """O(E^2) check that non-adjacent edges neither cross nor touch."""
    v = poly.vertices
    m = len(v)
    segs = [shapely.LineString([v[i], v[(i + 1) % m]]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if j == i + 1 or (i == 0 and j == m - 1):
                # adjacent edges share exactly their common vertex
                if segs[i].intersection(segs[j]).geom_type != "Point":
                    return False
                continue
            if _segments_cross(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]) or segs[i].intersects(segs[j]):
                return False
    return True


FAMILY = {
    "comb1": comb(1), "comb2": comb(2), "comb8": comb(8), "comb32": comb(32),
    "koch0": koch(0), "koch2": koch(2), "koch3": koch(3),
    "star3": star(3), "star5": star(5), "star9": star(9),
    "rect": rectangle(2, 0.5),
}


@pytest.mark.parametrize("name", list(FAMILY))
def test_family_members_are_simple_ccw(name):
    p = FAMILY[name]
    assert brute_simple(p)
    assert shapely.Polygon(p.vertices).exterior.is_ccw
    assert math.isclose(area(p), shapely.Polygon(p.vertices).area, rel_tol=1e-12)
    assert math.isclose(perimeter(p), shapely.Polygon(p.vertices).length, rel_tol=1e-12)


def test_basic_measures():
    sq = rectangle()
    assert area(sq) == 1.0 and perimeter(sq) == 4.0
    assert area(Interval(0, 2.5)) == 2.5
    d = Disk((1, 2), 0.5)
    assert area(d) == math.pi * 0.25 and perimeter(d) == math.pi
    with pytest.raises(UnsupportedDimensionError):
        perimeter(Interval(0, 1))


@pytest.mark.parametrize("k", [1, 2, 3, 8, 32])
def test_comb_closed_forms(k):
    c = comb(k, base=(2.0, 0.3), tooth_depth=0.4, tooth_width=1.5 / k)
    assert math.isclose(perimeter(c), 2 * 2.0 + 2 * 0.3 + 2 * k * 0.4, rel_tol=1e-12)
    assert math.isclose(area(c), 2.0 * 0.3 + k * (1.5 / k) * 0.4, rel_tol=1e-12)


def test_standard_comb_area_band_and_perimeter_growth():
    areas = [area(comb(k)) for k in (2, 4, 8, 16, 32)]
    assert max(areas) <= 2 * min(areas)
    per = [perimeter(comb(k)) for k in (2, 4, 8, 16, 32)]
    assert all(b > a for a, b in zip(per, per[1:]))
    assert math.isclose(perimeter(comb(1)), 4.0)


def test_koch_laws():
    tri = area(koch(0))
    assert math.isclose(perimeter(koch(0)), 3.0)
    prev_a = tri
    for k in range(1, 5):
        assert math.isclose(perimeter(koch(k)) / perimeter(koch(k - 1)), 4 / 3, rel_tol=1e-12)
        assert math.isclose(perimeter(koch(k)), 3 * (4 / 3) ** k, rel_tol=1e-12)
        a = area(koch(k))
        assert prev_a < a <= 2 * tri
        prev_a = a
    assert len(koch(3)) == 3 * 4**3


def test_koch2_area_matches_sampling():
    p = koch(2)
    poly = shapely.Polygon(p.vertices)
    rng = np.random.default_rng(0)
    (x0, y0), (x1, y1) = bounding_box(p)
    n = 200_000
    xs, ys = rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)
    frac = shapely.contains_xy(poly, xs, ys).mean()
    est = frac * (x1 - x0) * (y1 - y0)
    se = math.sqrt(frac * (1 - frac) / n) * (x1 - x0) * (y1 - y0)
    assert abs(est - area(p)) < 5 * se


def test_star_is_ten_gon():
    s = star(5, 0.5, 1.0)
    assert len(s) == 10
    v = np.array(s.vertices)
    edges = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
    assert np.allclose(edges, edges[0])
    assert math.isclose(perimeter(s), 10 * edges[0], rel_tol=1e-12)


def test_make_family():
    assert make_family("comb", teeth=4) == comb(4)
    assert make_family("rectangle", width=2, height=3) == rectangle(2, 3)
    with pytest.raises(GeometryError):
        make_family("spiral")
    with pytest.raises(GeometryError):
        make_family("comb", teeth=4, tooth_width=2.0)


@pytest.mark.parametrize(
    "verts",
    [[(0, 0), (1, 1), (1, 0), (0, 1)], [(0, 0), (1, 0)], [(0, 0), (1, 0), (2, 0)], [(0, 0), (0, 0), (1, 0), (0, 1)]],
)
def test_invalid_polygons(verts):
    with pytest.raises(GeometryError):
        Polygon(verts)


def test_clockwise_input_is_reoriented():
    p = Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert area(p) == 1.0
    assert shapely.Polygon(p.vertices).exterior.is_ccw


@pytest.mark.parametrize("args", [(1, 1), (2, 1), (0, math.inf)])
def test_invalid_intervals(args):
    with pytest.raises(GeometryError):
        Interval(*args)


def test_invalid_disk():
    with pytest.raises(GeometryError):
        Disk((0, 0), 0)


def test_classification_examples():
    root = RootFrame((0.0, 0.0), 4.0)
    sq = rectangle()
    assert classify_cell(sq, _Box((0.25, 0.25), (0.5, 0.5))) is CellClassification.FullyInside
    assert classify_cell(sq, _Box((2, 0), (3, 1))) is CellClassification.FullyOutside
    assert classify_cell(Disk((0, 0), 1), _Box((0.5, -0.5), (1.5, 0.5))) is CellClassification.Straddling
    # touching from outside along an edge is outside; the closed cell equal to the set is inside
    assert classify_cell(sq, _Box((1, 0), (2, 1))) is CellClassification.FullyOutside
    assert classify_cell(sq, _Box((0, 0), (1, 1))) is CellClassification.FullyInside
    assert classify_cell(sq, DyadicCell(2, (0, 0), root)) is CellClassification.FullyInside
    iv = Interval(0.0, 1.0)
    assert classify_cell(iv, _Box((0.0,), (1.0,))) is CellClassification.FullyInside
    assert classify_cell(iv, _Box((1.0,), (2.0,))) is CellClassification.FullyOutside
    assert classify_cell(iv, _Box((0.5,), (1.5,))) is CellClassification.Straddling


def test_polygon_classification_matches_de9im():
    rng = random.Random(11)
    for _ in range(20):
        p = Polygon(random_star_polygon(rng))
        poly = shapely.Polygon(p.vertices)
        lo = np.array([[rng.uniform(-0.1, 1), rng.uniform(-0.1, 1)] for _ in range(200)])
        side = np.array([rng.choice([1 / 8, 1 / 16, 1 / 32, 0.3]) for _ in range(200)])
        hi = lo + side[:, None]
        got = classify_boxes(p, lo, hi)
        want = [shapely_state(poly, a, b, c, d) for (a, b), (c, d) in zip(lo, hi)]
        assert list(got) == want


def _sample_check(shape, inside_fn, lo, hi, state, rng, n=100_000):
    pts = rng.uniform(lo, hi, size=(n, 2))
    ins = inside_fn(pts)
    if state == CellClassification.FullyInside:
        assert ins.all()
    elif state == CellClassification.FullyOutside:
        assert not ins.any()


def test_classification_conservative_on_samples():
    rng = np.random.default_rng(5)
    c = comb(8)
    poly = shapely.Polygon(c.vertices)
    disk = Disk((0.0, 0.0), 1.0)
    cells = [((0.3, 0.05), (0.35, 0.1)), ((0.2, 0.5), (0.25, 0.55)), ((1.0, 0.1), (1.2, 0.3)), ((3.9, 0.2), (4.5, 0.9))]
    for lo, hi in cells:
        st_ = classify_cell(c, _Box(lo, hi))
        _sample_check(c, lambda p: shapely.intersects_xy(poly, p[:, 0], p[:, 1]), lo, hi, st_, rng)
    for lo, hi in [((0.1, 0.1), (0.5, 0.5)), ((0.8, 0.8), (1.0, 1.0)), ((0.6, 0.6), (0.7, 0.7)), ((-0.2, 0.9), (0.2, 1.3))]:
        st_ = classify_cell(disk, _Box(lo, hi))
        _sample_check(disk, lambda p: np.hypot(p[:, 0], p[:, 1]) <= 1.0, lo, hi, st_, rng)


def test_implicit_set_classification_is_conservative():
    ring = ImplicitSet(lambda p: np.hypot(p[..., 0], p[..., 1]) - 1.0, 1.0, (-1, -1, 1, 1))
    states = classify_boxes(ring, [(-0.1, -0.1), (2, 2), (0.9, 0.0)], [(0.1, 0.1), (3, 3), (1.1, 0.2)])
    assert list(states) == [1, 0, 2]
    est, se = area_estimate(ring, samples=100_000, seed=1)
    assert abs(est - math.pi) < 5 * se
    assert math.isclose(area(ring), area_estimate(ring)[0])


def test_boundary_distance_examples():
    sq = rectangle()
    assert boundary_distance(sq, (0.5, 0.5)) == 0.5
    assert boundary_distance(sq, (2, 0.5)) == 1.0
    assert boundary_distance(Disk((0, 0), 1), (0, 0)) == 1.0
    assert boundary_distance(Interval(0, 1), (0.25,)) == 0.25
    c = comb(4)
    # midpoint between the first two teeth, half way up
    slot = 2.0 / 4
    gap = (slot, 0.25 + 0.25)
    dense = shapely.Polygon(c.vertices).exterior.segmentize(1e-4)
    pts = np.array(dense.coords)
    oracle = np.hypot(pts[:, 0] - gap[0], pts[:, 1] - gap[1]).min()
    assert abs(boundary_distance(c, gap) - oracle) < 1e-4


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-1, 2), y=st.floats(-1, 2))
def test_boundary_distance_matches_shapely(x, y):
    c = comb(4)
    want = shapely.Polygon(c.vertices).exterior.distance(shapely.Point(x, y))
    assert abs(boundary_distance(c, (x, y)) - want) <= 4 * 2.0**-52 * max(1.0, want)


def test_boundary_distance_zero_exactly_on_boundary():
    c = comb(4)
    for v, w in zip(c.vertices, c.vertices[1:] + c.vertices[:1]):
        mid = ((v[0] + w[0]) / 2, (v[1] + w[1]) / 2)
        assert boundary_distance(c, v) == 0.0
        assert boundary_distance(c, mid) == 0.0
    assert boundary_distance(c, (0.1, 0.1)) > 0


def test_box_boundary_distance_matches_shapely():
    c = comb(8)
    poly = shapely.Polygon(c.vertices)
    lo = np.array([[0.1, 0.02], [1.0, 0.03], [2.5, 0.05]])
    hi = lo + 0.02
    got = box_boundary_distance(c, lo, hi)
    want = [poly.exterior.distance(shapely.box(*a, *b)) for a, b in zip(lo, hi)]
    assert np.allclose(got, want, rtol=1e-12, atol=1e-15)
    d = Disk((0, 0), 1)
    got = box_boundary_distance(d, [[0.1, 0.1]], [[0.2, 0.3]])
    assert math.isclose(got[0], 1 - math.hypot(0.2, 0.3))


def test_json_roundtrip_and_schema():
    for s in (Interval(0, 1), rectangle(), Disk((0.5, 1), 2), comb(3), ShapeUnion((rectangle(), rectangle(origin=(3, 0))))):
        back = shape_from_json(json.loads(json.dumps(shape_to_json(s))))
        assert back == s
    assert shape_from_json({"type": "comb", "teeth": 4, "base": [2, 0.25], "tooth_depth": 0.5, "tooth_width": 0.25}) == comb(
        4, (2, 0.25), 0.5, 0.25
    )
    assert shape_from_json({"type": "koch", "order": 2, "side": 1.0}) == koch(2)
    for bad in ({"type": "blob"}, {"a": 1}, {"type": "interval", "a": 0}, {"type": "interval", "a": "x", "b": 1}):
        with pytest.raises(GeometryError):
            shape_from_json(bad)
    with pytest.raises(PreconditionError):
        shape_to_json(ImplicitSet(lambda p: 0.0, 1.0, (0, 0, 1, 1)))


def test_scale_and_translate():
    c = comb(4)
    assert math.isclose(area(scale(c, 3.0)), 9 * area(c))
    assert math.isclose(perimeter(scale(c, 3.0)), 3 * perimeter(c))
    assert area(translate(c, (5, -2))) == pytest.approx(area(c))
    assert scale(Interval(1, 2), 2) == Interval(2, 4)
    assert scale(Disk((1, 1), 1), 2) == Disk((2, 2), 2)
