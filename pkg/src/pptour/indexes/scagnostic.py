"""Scagnostic indexes built on binned geometry: 1 - convex, skinny, stringy."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import scag
from ..errors import CollinearInput, DegenerateSpread, InvalidParameter, TooFewPoints
from ..geometry import as_xy

ALPHA_QUANTILE = 90.0
# alpha is this multiple of the 90th percentile of MST edge lengths
ALPHA_SCALE = 2.5


@dataclass(frozen=True)
class ScagSummary:
    convex_area: float
    alpha_area: float
    alpha_perimeter: float
    mst_length: float
    mst_diameter: float
    n_bins: int
    alpha: float
    degenerate: bool = False


def summarize(y, bin_cap: int = scag.DEFAULT_BIN_CAP, alpha_override: float | None = None) -> ScagSummary:
    """Binned hulls and spanning tree of a projection, cached per input."""
    v = as_xy(y)
    if v.shape[0] < 3:
        raise TooFewPoints("scagnostics need at least 3 points")
    a = None if alpha_override is None else float(alpha_override)
    if a is not None and not a > 0:
        raise InvalidParameter("alpha_override must be positive")
    return _summary_cached(v.tobytes(), v.shape[0], int(bin_cap), a)


@lru_cache(maxsize=32)
def _summary_cached(buf, n, bin_cap, alpha_override):
    v = np.frombuffer(buf, dtype=float).reshape(n, 2)
    try:
        b = scag.bin_points(v, bin_cap)
    except DegenerateSpread:
        return ScagSummary(0.0, 0.0, 0.0, 0.0, 0.0, 1, 0.0, True)
    pts = b.points
    if len(pts) < 2:
        return ScagSummary(0.0, 0.0, 0.0, 0.0, 0.0, len(pts), 0.0, True)
    try:
        tri = scag.delaunay(pts)
    except CollinearInput:
        tri = None
    tree = scag.mst(pts, tri)
    lengths = np.array([w for _, _, w in tree.edges])
    alpha = alpha_override if alpha_override is not None else ALPHA_SCALE * float(np.percentile(lengths, ALPHA_QUANTILE))
    if tri is None:
        return ScagSummary(0.0, 0.0, 0.0, tree.total_length, tree.diameter, len(pts), alpha, True)
    hull = scag.convex_hull(pts)
    ah = scag.alpha_hull(pts, alpha, tri)
    return ScagSummary(hull.area, ah.area, ah.perimeter, tree.total_length, tree.diameter, len(pts), alpha)


def _summary(y, params):
    params = params or {}
    return summarize(y, params.get("bin_cap", scag.DEFAULT_BIN_CAP), params.get("alpha_override"))


def idx_convex1m(y, params: dict | None = None) -> float:
    """1 - area(alpha hull) / area(convex hull); 0 for degenerate geometry."""
    s = _summary(y, params)
    if s.degenerate or s.convex_area <= 0:
        return 0.0
    return float(np.clip(1.0 - s.alpha_area / s.convex_area, 0.0, 1.0))


def idx_skinny(y, params: dict | None = None) -> float:
    """1 - sqrt(4 pi area) / perimeter of the alpha hull (0 for a disk)."""
    s = _summary(y, params)
    if s.degenerate:
        return 1.0
    if s.alpha_perimeter <= 0:
        return 0.0
    if s.alpha_area <= 0:
        return 1.0
    return float(np.clip(1.0 - np.sqrt(4.0 * np.pi * s.alpha_area) / s.alpha_perimeter, 0.0, 1.0))


def idx_stringy(y, params: dict | None = None) -> float:
    """MST diameter over total MST length; 1 when the tree is a path."""
    s = _summary(y, params)
    if s.n_bins < 2 or s.mst_length <= 0:
        return 1.0 if s.degenerate and s.n_bins >= 2 else 0.0
    return float(np.clip(s.mst_diameter / s.mst_length, 0.0, 1.0))
