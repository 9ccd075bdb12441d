"""Independent reference implementations used only by the tests.

These are deliberately naive (brute force, O(n^2) matrices, exhaustive
enumeration) and share no code with the package.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


# ---------------------------------------------------------------- trees

@lru_cache(maxsize=4)
def all_labelled_trees(m: int) -> np.ndarray:
    """Every labelled tree on m nodes as an (m^(m-2), m-1, 2) edge array.

    Decodes all Prufer sequences at once, one elimination step per column.
    """
    seqs = np.array(list(itertools.product(range(m), repeat=m - 2)), dtype=np.int64).reshape(-1, m - 2)
    n_trees = seqs.shape[0]
    deg = np.ones((n_trees, m), dtype=np.int64)
    rows = np.arange(n_trees)
    for k in range(m - 2):
        np.add.at(deg, (rows, seqs[:, k]), 1)
    edges = np.empty((n_trees, m - 1, 2), dtype=np.int64)
    for k in range(m - 2):
        leaf = np.argmax(deg == 1, axis=1)
        edges[:, k, 0] = leaf
        edges[:, k, 1] = seqs[:, k]
        deg[rows, leaf] = 0
        deg[rows, seqs[:, k]] -= 1
    last = np.argsort(deg != 1, axis=1, kind="stable")[:, :2]
    edges[:, m - 2, 0] = last[:, 0]
    edges[:, m - 2, 1] = last[:, 1]
    return edges


def brute_force_mst(pts: np.ndarray) -> tuple[float, set]:
    m = len(pts)
    trees = all_labelled_trees(m)
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    totals = d[trees[:, :, 0], trees[:, :, 1]].sum(axis=1)
    best = int(np.argmin(totals))
    return float(totals[best]), {frozenset(map(int, e)) for e in trees[best]}


def tree_diameter_all_pairs(m: int, edges) -> float:
    """Longest path by Floyd-Warshall over the tree."""
    d = np.full((m, m), np.inf)
    np.fill_diagonal(d, 0.0)
    for i, j, w in edges:
        d[i, j] = d[j, i] = w
    for k in range(m):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return float(d[np.isfinite(d)].max())


# ---------------------------------------------------------------- planar geometry

def incircle_det(a, b, c, d) -> float:
    """Positive when d lies inside the circumcircle of counter-clockwise abc."""
    m = np.array([
        [a[0] - d[0], a[1] - d[1], (a[0] - d[0]) ** 2 + (a[1] - d[1]) ** 2],
        [b[0] - d[0], b[1] - d[1], (b[0] - d[0]) ** 2 + (b[1] - d[1]) ** 2],
        [c[0] - d[0], c[1] - d[1], (c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2],
    ])
    return float(np.linalg.det(m))


def orient(a, b, c) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def inside_convex_polygon(poly: np.ndarray, q, tol: float = 1e-12) -> bool:
    """Counter-clockwise convex polygon containment (boundary counts)."""
    n = len(poly)
    return all(orient(poly[k], poly[(k + 1) % n], q) >= -tol for k in range(n))


def shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.sum(x * np.roll(y, -1) - y * np.roll(x, -1))))


def gift_wrap_hull(pts: np.ndarray) -> np.ndarray:
    """Jarvis march, counter-clockwise, collinear boundary points dropped."""
    pts = np.unique(pts, axis=0)
    start = int(np.lexsort((pts[:, 1], pts[:, 0]))[0])
    hull = [start]
    while True:
        cur = hull[-1]
        cand = (cur + 1) % len(pts)
        for k in range(len(pts)):
            o = orient(pts[cur], pts[cand], pts[k])
            farther = np.linalg.norm(pts[k] - pts[cur]) > np.linalg.norm(pts[cand] - pts[cur])
            if o < 0 or (o == 0 and farther):
                cand = k
        if cand == start:
            break
        hull.append(cand)
    return pts[hull]


# ---------------------------------------------------------------- dependence measures

def dcor_textbook(x, y, squared: bool = True) -> float:
    """Distance correlation from explicitly double-centred distance matrices."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.abs(x[:, None] - x[None, :])
    b = np.abs(y[:, None] - y[None, :])
    A = a - a.mean(axis=0, keepdims=True) - a.mean(axis=1, keepdims=True) + a.mean()
    B = b - b.mean(axis=0, keepdims=True) - b.mean(axis=1, keepdims=True) + b.mean()
    dcov = (A * B).mean()
    dvx = (A * A).mean()
    dvy = (B * B).mean()
    r2 = dcov / np.sqrt(dvx * dvy)
    return float(r2 if squared else np.sqrt(max(r2, 0.0)))


def mutual_information(table: np.ndarray) -> float:
    p = table / table.sum()
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / (px @ py)[nz])))


def exhaustive_mi_2x2(y: np.ndarray) -> float:
    """Max normalised MI over all 2 x 2 grids: rows split the second
    coordinate into two equal halves by rank, the column split on the first
    coordinate ranges over every gap between distinct values."""
    n = len(y)
    rank = np.empty(n, dtype=np.int64)
    order = np.argsort(y[:, 1], kind="stable")
    ys = y[order, 1]
    # tied values share the rank of their first occurrence
    first = np.array([np.searchsorted(ys, v, side="left") for v in ys])
    rank[order] = first
    row = (rank * 2) // n
    xs = np.unique(y[:, 0])
    best = 0.0
    for cut in (xs[:-1] + xs[1:]) / 2:
        col = (y[:, 0] > cut).astype(int)
        t = np.zeros((2, 2))
        np.add.at(t, (col, row), 1)
        best = max(best, mutual_information(t))
    return best / np.log(2)
