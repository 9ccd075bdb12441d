import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (brute_force_mst, gift_wrap_hull, incircle_det, inside_convex_polygon, shoelace,
                     tree_diameter_all_pairs)
from pptour.scag import (BinnedPoints, SpanningTree, alpha_hull, bin_points, convex_hull, delaunay, mst,
                         mst_diameter)


def _bp(pts):
    pts = np.asarray(pts, dtype=float)
    return BinnedPoints(pts, np.ones(len(pts)))


def test_bin_points_merges_duplicates():
    y = np.array([[0.0, 0.0]] * 5 + [[1.0, 1.0]] * 3)
    b = bin_points(y)
    assert len(b) == 2
    assert sorted(b.weights.tolist()) == [3, 5]


def test_bin_points_respects_cap(rng):
    b = bin_points(rng.random((5000, 2)), bin_cap=10)
    assert len(b) <= 100
    assert b.weights.sum() == 5000


def test_convex_hull_contains_all_points(rng):
    pts = rng.normal(size=(200, 2))
    h = convex_hull(_bp(pts))
    (poly,) = h.vertices
    assert all(inside_convex_polygon(poly, q, tol=1e-9) for q in pts)
    assert h.area == pytest.approx(shoelace(poly), rel=1e-12)
    assert h.area == pytest.approx(shoelace(gift_wrap_hull(pts)), rel=1e-12)


def test_delaunay_three_points_and_square():
    tri = delaunay(_bp([[0, 0], [1, 0], [0, 1]]))
    assert len(tri.simplices) == 1
    tri = delaunay(_bp([[0, 0], [1, 0], [1, 1], [0, 1.001]]))
    assert len(tri.simplices) == 2


def test_delaunay_empty_circumcircle(rng):
    pts = rng.random((80, 2))
    tri = delaunay(_bp(pts))
    for s in tri.simplices:
        a, b, c = pts[s]
        for k in np.delete(np.arange(80), s):
            assert incircle_det(a, b, c, pts[k]) <= 1e-9


def test_alpha_hull_infinite_is_convex_hull(rng):
    b = _bp(rng.normal(size=(60, 2)))
    assert alpha_hull(b, np.inf).area == pytest.approx(convex_hull(b).area, abs=1e-9)


def test_alpha_hull_two_clusters_separates(rng):
    pts = np.vstack([rng.random((50, 2)), rng.random((50, 2)) + [10, 0]])
    b = _bp(pts)
    assert alpha_hull(b, 0.5).area < 0.5 * convex_hull(b).area


def test_alpha_hull_tiny_alpha_has_no_area(rng):
    assert alpha_hull(_bp(rng.random((40, 2))), 1e-6).area == 0.0


def test_mst_examples():
    t = mst(_bp([[0, 0], [1, 0], [3, 0], [6, 0]]))
    assert t.total_length == pytest.approx(6.0)
    assert mst_diameter(t) == pytest.approx(6.0)


def test_mst_diameter_path_and_star():
    path = SpanningTree([(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0)], 6.0)
    assert mst_diameter(path) == pytest.approx(6.0)
    star = SpanningTree([(0, k, 1.0) for k in range(1, 6)], 5.0)
    assert mst_diameter(star) == pytest.approx(2.0)


def test_mst_diameter_random_tree_matches_all_pairs(rng):
    m = 10
    edges = [(k, int(rng.integers(0, k)), float(rng.random())) for k in range(1, m)]
    t = SpanningTree(edges, sum(e[2] for e in edges))
    assert mst_diameter(t) == pytest.approx(tree_diameter_all_pairs(m, edges), rel=1e-12)


@given(st.integers(0, 2**31))
def test_mst_matches_prufer_brute_force(seed):
    pts = np.random.default_rng(seed).random((7, 2))
    t = mst(_bp(pts))
    total, edges = brute_force_mst(pts)
    assert {frozenset((int(i), int(j))) for i, j, _ in t.edges} == edges
    assert t.total_length == pytest.approx(total, rel=1e-12)


@given(st.integers(0, 2**31), st.integers(4, 60))
def test_hull_area_bounds(seed, n):
    b = _bp(np.random.default_rng(seed).normal(size=(n, 2)))
    for a in (0.1, 1.0, 5.0):
        assert alpha_hull(b, a).area <= convex_hull(b).area + 1e-9
