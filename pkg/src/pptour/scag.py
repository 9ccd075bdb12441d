"""Geometry behind the scagnostic indexes.

Binning to a square grid, convex hull, Delaunay triangulation, alpha hull,
Euclidean minimum spanning tree and tree diameter.  All functions operate on
the distinct bin locations; bin counts are carried along but ignored by the
geometry.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.spatial import Delaunay, QhullError

from .errors import CollinearInput, DegenerateSpread, InvalidParameter, TooFewPoints
from .geometry import as_xy

DEFAULT_BIN_CAP = 40


@dataclass(frozen=True)
class BinnedPoints:
    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class Hull:
    vertices: list[np.ndarray]
    area: float
    perimeter: float


@dataclass(frozen=True)
class SpanningTree:
    edges: list[tuple[int, int, float]]
    total_length: float
    diameter: float = field(default=float("nan"))


@dataclass(frozen=True)
class Triangulation:
    points: np.ndarray
    simplices: np.ndarray  # (t, 3) vertex indices, counter-clockwise


def bin_points(y, bin_cap: int = DEFAULT_BIN_CAP) -> BinnedPoints:
    """Scale both coordinates to [0, 1] and aggregate on a bin_cap x bin_cap grid.

    Each occupied cell becomes one point at the centroid of its members.
    Points are put in lexicographic order first so the result does not
    depend on the input row order.
    """
    v = as_xy(y)
    if v.shape[0] < 3:
        raise TooFewPoints("binning needs at least 3 points")
    bin_cap = int(bin_cap)
    if bin_cap < 1:
        raise InvalidParameter("bin_cap must be positive")
    lo = v.min(axis=0)
    rng = v.max(axis=0) - lo
    if np.any(rng <= 0):
        raise DegenerateSpread("projection has zero extent in a coordinate")
    u = (v - lo) / rng
    u = u[np.lexsort((u[:, 1], u[:, 0]))]
    cells = np.minimum((u * bin_cap).astype(np.int64), bin_cap - 1)
    cid = cells[:, 0] * bin_cap + cells[:, 1]
    order = np.argsort(cid, kind="stable")
    cid = cid[order]
    u = u[order]
    starts = np.flatnonzero(np.r_[True, cid[1:] != cid[:-1]])
    counts = np.diff(np.r_[starts, len(cid)])
    sums = np.add.reduceat(u, starts, axis=0)
    pts = np.clip(sums / counts[:, None], 0.0, 1.0)
    return BinnedPoints(pts, counts.astype(np.int64))


def _points(b) -> np.ndarray:
    return np.asarray(getattr(b, "points", b), dtype=float)


@numba.njit(cache=True)
def _monotone_chain(pts):
    """Indices of the convex hull of lexicographically sorted points, CCW."""
    m = pts.shape[0]
    hull = np.empty(2 * m, dtype=np.int64)
    k = 0
    for sweep in range(2):
        start = k
        for idx in range(m):
            i = idx if sweep == 0 else m - 1 - idx
            while k >= start + 2:
                o = pts[hull[k - 2]]
                a = pts[hull[k - 1]]
                cr = (a[0] - o[0]) * (pts[i, 1] - o[1]) - (a[1] - o[1]) * (pts[i, 0] - o[0])
                if cr > 0:
                    break
                k -= 1
            hull[k] = i
            k += 1
        k -= 1  # last point repeats as the first of the next chain
    return hull[:k]


def convex_hull(b) -> Hull:
    """Andrew's monotone chain; vertices counter-clockwise."""
    pts = _points(b)
    uniq = np.unique(pts, axis=0)
    if len(uniq) < 3:
        raise CollinearInput("fewer than 3 distinct points")
    hull = uniq[_monotone_chain(np.ascontiguousarray(uniq))]
    if len(hull) < 3:
        raise CollinearInput("all points are collinear")
    area = polygon_area(hull)
    if area <= 0:
        raise CollinearInput("all points are collinear")
    perim = float(np.sum(np.linalg.norm(hull - np.roll(hull, -1, axis=0), axis=1)))
    return Hull([hull], area, perim)


def polygon_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def delaunay(b) -> Triangulation:
    pts = _points(b)
    if len(pts) < 3:
        raise CollinearInput("need at least 3 points")
    try:
        tri = Delaunay(pts)
    except QhullError as exc:
        raise CollinearInput("points are collinear or coincident") from exc
    simp = tri.simplices.copy()
    # orient counter-clockwise
    p0, p1, p2 = pts[simp[:, 0]], pts[simp[:, 1]], pts[simp[:, 2]]
    cw = _tri_cross(p0, p1, p2) < 0
    simp[cw] = simp[cw][:, [0, 2, 1]]
    return Triangulation(pts, simp)


def _tri_cross(p0, p1, p2):
    return (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p1[:, 1] - p0[:, 1]) * (
        p2[:, 0] - p0[:, 0]
    )


def circumradii(tri: Triangulation) -> np.ndarray:
    pts = tri.points
    a = pts[tri.simplices[:, 0]]
    b = pts[tri.simplices[:, 1]]
    c = pts[tri.simplices[:, 2]]
    la = np.linalg.norm(b - c, axis=1)
    lb = np.linalg.norm(a - c, axis=1)
    lc = np.linalg.norm(a - b, axis=1)
    area2 = np.abs(_tri_cross(a, b, c))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = la * lb * lc / (2.0 * area2)
    return np.where(area2 > 0, r, np.inf)


def _unique_edges(e: np.ndarray, m: int, return_counts: bool = False):
    e = np.sort(e, axis=1)
    code = e[:, 0].astype(np.int64) * m + e[:, 1]
    if return_counts:
        u, cnt = np.unique(code, return_counts=True)
        return np.column_stack([u // m, u % m]), cnt
    u = np.unique(code)
    return np.column_stack([u // m, u % m])


def delaunay_edges(tri: Triangulation) -> np.ndarray:
    """Sorted (i < j) unique edges of the triangulation."""
    s = tri.simplices
    return _unique_edges(np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [2, 0]]]), len(tri.points))


def alpha_hull(b, alpha: float, tri: Triangulation | None = None) -> Hull:
    """Alpha shape from the Delaunay triangulation.

    Triangles with circumradius above ``alpha`` are discarded.  The area is
    the sum of the kept triangles; the perimeter is the length of edges that
    bound exactly one kept triangle, plus twice the length of dangling
    edges: Delaunay edges no longer than ``alpha`` with at least one
    endpoint outside every kept triangle.  Dangling edges are walked on both
    sides, so a chain of points with no area still has a perimeter.
    """
    if not alpha > 0:
        raise InvalidParameter("alpha must be positive")
    if tri is None:
        tri = delaunay(b)
    pts = tri.points
    keep = circumradii(tri) <= alpha
    kept = tri.simplices[keep]
    area = float(0.5 * np.sum(np.abs(_tri_cross(pts[kept[:, 0]], pts[kept[:, 1]], pts[kept[:, 2]]))))
    if len(kept):
        e = np.concatenate([kept[:, [0, 1]], kept[:, [1, 2]], kept[:, [2, 0]]])
        uniq, cnt = _unique_edges(e, len(pts), return_counts=True)
        boundary = uniq[cnt == 1]
    else:
        boundary = np.empty((0, 2), dtype=np.int64)
    perim = float(np.sum(np.linalg.norm(pts[boundary[:, 0]] - pts[boundary[:, 1]], axis=1)))
    covered = np.zeros(len(pts), dtype=bool)
    covered[kept.ravel()] = True
    all_e = delaunay_edges(tri)
    lengths = np.linalg.norm(pts[all_e[:, 0]] - pts[all_e[:, 1]], axis=1)
    loose = (lengths <= alpha) & ~(covered[all_e[:, 0]] & covered[all_e[:, 1]])
    perim += 2.0 * float(np.sum(lengths[loose]))
    loops = _boundary_loops(pts, np.concatenate([boundary, all_e[loose]]))
    return Hull(loops, area, perim)


def _boundary_loops(pts: np.ndarray, edges: np.ndarray) -> list[np.ndarray]:
    """Chain boundary edges into vertex sequences (one per component walk)."""
    adj: dict[int, list[int]] = {}
    for i, j in edges:
        adj.setdefault(int(i), []).append(int(j))
        adj.setdefault(int(j), []).append(int(i))
    used: set[tuple[int, int]] = set()
    loops = []
    for i, j in edges:
        key = (min(i, j), max(i, j))
        if key in used:
            continue
        walk = [int(i)]
        prev, cur = int(i), int(j)
        used.add(key)
        while True:
            walk.append(cur)
            nxt = None
            for k in adj[cur]:
                kk = (min(cur, k), max(cur, k))
                if kk not in used:
                    nxt = k
                    used.add(kk)
                    break
            if nxt is None:
                break
            prev, cur = cur, nxt
        loops.append(pts[walk])
    return loops


@numba.njit(cache=True)
def _kruskal(n, ei, ej, w, order):
    parent = np.arange(n)
    rank = np.zeros(n, dtype=np.int64)
    chosen = np.empty(n - 1, dtype=np.int64)
    k = 0
    for idx in order:
        a = ei[idx]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = ej[idx]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        chosen[k] = idx
        k += 1
        if k == n - 1:
            break
    return chosen[:k]


def _candidate_edges(pts: np.ndarray, tri: Triangulation | None):
    m = len(pts)
    if tri is None and m > 3:
        try:
            tri = delaunay(pts)
        except CollinearInput:
            tri = None
    if tri is not None:
        e = delaunay_edges(tri)
    else:
        iu = np.triu_indices(m, 1)
        e = np.column_stack(iu)
    return e


def mst(b, tri: Triangulation | None = None) -> SpanningTree:
    """Euclidean minimum spanning tree (Kruskal).

    Candidate edges come from the Delaunay triangulation, which always
    contains a minimum spanning tree; collinear input falls back to the
    complete graph.  Ties are broken by (length, i, j).
    """
    pts = _points(b)
    m = len(pts)
    if m < 2:
        raise TooFewPoints("spanning tree needs at least 2 points")
    e = _candidate_edges(pts, tri)
    w = np.linalg.norm(pts[e[:, 0]] - pts[e[:, 1]], axis=1)
    order = np.lexsort((e[:, 1], e[:, 0], w))
    chosen = _kruskal(m, e[:, 0].astype(np.int64), e[:, 1].astype(np.int64), w, order)
    edges = list(zip(e[chosen, 0].tolist(), e[chosen, 1].tolist(), w[chosen].tolist()))
    total = float(np.sum(w[chosen]))
    diam = mst_diameter_edges(m, np.column_stack([e[chosen], w[chosen]]))
    return SpanningTree(edges, total, diam)


@numba.njit(cache=True)
def _farthest(start, ptr, nbr, wt):
    m = ptr.shape[0] - 1
    dist = np.full(m, -1.0)
    dist[start] = 0.0
    stack = np.empty(m, dtype=np.int64)
    stack[0] = start
    top = 1
    while top > 0:
        top -= 1
        u = stack[top]
        for q in range(ptr[u], ptr[u + 1]):
            v = nbr[q]
            if dist[v] < 0:
                dist[v] = dist[u] + wt[q]
                stack[top] = v
                top += 1
    far = 0
    for v in range(m):
        if dist[v] > dist[far]:
            far = v
    return far, dist[far]


def mst_diameter_edges(m: int, edges) -> float:
    if m < 2 or not len(edges):
        return 0.0
    arr = np.asarray(edges, dtype=float)
    i = arr[:, 0].astype(np.int64)
    j = arr[:, 1].astype(np.int64)
    w = arr[:, 2]
    src = np.r_[i, j]
    dst = np.r_[j, i]
    ww = np.r_[w, w]
    order = np.argsort(src, kind="stable")
    ptr = np.zeros(m + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    ptr = np.cumsum(ptr)
    a, _ = _farthest(int(i[0]), ptr, dst[order], ww[order])
    _, d = _farthest(a, ptr, dst[order], ww[order])
    return float(d)


def mst_diameter(t: SpanningTree) -> float:
    """Weight of the longest simple path through the tree (two sweeps)."""
    if not t.edges:
        return 0.0
    m = 1 + max(max(i, j) for i, j, _ in t.edges)
    return mst_diameter_edges(m, t.edges)
