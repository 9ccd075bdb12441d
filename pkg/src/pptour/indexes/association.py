"""Dependence indexes: distance correlation and the two-way spline index."""
from __future__ import annotations

from functools import lru_cache

import numba
import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import solve_triangular

from ..errors import IndexEvaluationError, InvalidParameter, TooFewPoints
from ..geometry import as_xy

DEFAULT_DF_BOUNDS = (2.0, 15.0)
N_BASIS = 20


@numba.njit(cache=True)
def _distance_sums(x, y):
    """Row sums of |xi - xj| and |yi - yj|, and totals of their products."""
    n = x.shape[0]
    ra = np.zeros(n)
    rb = np.zeros(n)
    sab = 0.0
    saa = 0.0
    sbb = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            a = abs(x[i] - x[j])
            b = abs(y[i] - y[j])
            ra[i] += a
            ra[j] += a
            rb[i] += b
            rb[j] += b
            sab += a * b
            saa += a * a
            sbb += b * b
    return ra, rb, 2.0 * sab, 2.0 * saa, 2.0 * sbb


def dcor_sq(x, y) -> float:
    """Squared sample distance correlation (V-statistic).

    Uses sum_ij A_ij B_ij = sum_ij a_ij b_ij - 2 n sum_i abar_i bbar_i
    + n^2 abar bbar for the double-centred matrices, so no n x n array is built.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n = len(x)
    ra, rb, sab, saa, sbb = _distance_sums(x, y)
    ma, mb = ra / n, rb / n
    ga, gb = ma.mean(), mb.mean()
    cov = sab - 2.0 * n * np.dot(ma, mb) + n * n * ga * gb
    va = saa - 2.0 * n * np.dot(ma, ma) + n * n * ga * ga
    vb = sbb - 2.0 * n * np.dot(mb, mb) + n * n * gb * gb
    if va <= 0 or vb <= 0:
        return 0.0
    return float(max(cov, 0.0) / np.sqrt(va * vb))


def idx_dcor2d(y, params: dict | None = None) -> float:
    """Distance correlation between the two projected coordinates.

    ``params["squared"]`` selects dCor^2; the default reports dCor.
    """
    params = params or {}
    v = as_xy(y)
    if v.shape[0] < 4:
        raise TooFewPoints("dcor2d needs at least 4 points")
    if np.ptp(v[:, 0]) == 0 or np.ptp(v[:, 1]) == 0:
        return 0.0
    v = (v - v.mean(axis=0)) / v.std(axis=0)
    r2 = dcor_sq(v[:, 0], v[:, 1])
    val = r2 if params.get("squared", False) else np.sqrt(r2)
    return float(np.clip(val, 0.0, 1.0))


class PenalizedSpline:
    """Cubic regression spline with a curvature penalty, smoothing by GCV.

    The basis is a cubic B-spline with equally spaced knots on the
    min-max scaled predictor.
    The penalty is the integrated squared second derivative, so a heavy
    penalty shrinks the fit to a straight line (2 degrees of freedom).
    """

    def __init__(self, x, n_basis: int = N_BASIS, df_bounds=DEFAULT_DF_BOUNDS):
        x = np.asarray(x, dtype=float)
        lo, hi = x.min(), x.max()
        u = (x - lo) / (hi - lo)
        knots, omega = _basis_setup(int(n_basis))
        self.knots = knots
        self.u = u
        basis = BSpline.design_matrix(u, knots, 3).toarray()
        xtx = basis.T @ basis
        ridge = 1e-9 * np.trace(xtx) / xtx.shape[0]
        r = np.linalg.cholesky(xtx + ridge * np.eye(xtx.shape[0])).T
        rinv = solve_triangular(r, np.eye(r.shape[0]))
        s = rinv.T @ omega @ rinv
        s = 0.5 * (s + s.T)
        d, vecs = np.linalg.eigh(s)
        self.eig = np.clip(d, 0.0, None)
        self.z = basis @ (rinv @ vecs)
        self.df_bounds = df_bounds

    def fit(self, y):
        """Fitted values at the GCV-optimal smoothing parameter."""
        y = np.asarray(y, dtype=float)
        mu = y.mean()
        y = y - mu
        n = len(y)
        b = self.z.T @ y
        base_rss = float(y @ y - b @ b)
        # grid spans from no shrinkage of any penalized direction to full shrinkage
        pos = self.eig[self.eig > 1e-10 * max(self.eig.max(), 1e-300)]
        if len(pos) == 0:
            raise IndexEvaluationError("penalty has no positive eigenvalues")
        lams = np.geomspace(1e-3 / pos.max(), 1e3 / pos.min(), 121)
        shrink = 1.0 / (1.0 + np.outer(lams, self.eig))
        edf = shrink.sum(axis=1)
        rss = base_rss + ((1.0 - shrink) ** 2 * b * b).sum(axis=1)
        lo, hi = self.df_bounds
        ok = (edf >= lo - 1e-9) & (edf <= hi + 1e-9) & (edf < n - 1)
        if not np.any(ok):
            raise IndexEvaluationError("no smoothing parameter satisfies the df bounds")
        gcv = np.where(ok, n * np.maximum(rss, 0.0) / (n - edf) ** 2, np.inf)
        k = int(np.argmin(gcv))
        self.edf = float(edf[k])
        return self.z @ (shrink[k] * b) + mu


@lru_cache(maxsize=8)
def _basis_setup(n_basis: int):
    """Equally spaced cubic knots on [0, 1] and their curvature penalty."""
    if n_basis < 4:
        raise InvalidParameter("need at least 4 basis functions")
    inner = np.linspace(0.0, 1.0, n_basis - 2)[1:-1]
    knots = np.r_[[0.0] * 4, inner, [1.0] * 4]
    return knots, _curvature_penalty(knots)


def _curvature_penalty(knots: np.ndarray) -> np.ndarray:
    """Gram matrix of second derivatives of the cubic B-spline basis."""
    nb = len(knots) - 4
    gx, gw = np.polynomial.legendre.leggauss(3)
    breaks = np.unique(knots)
    pts, wts = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        pts.append(0.5 * (b - a) * gx + 0.5 * (a + b))
        wts.append(0.5 * (b - a) * gw)
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    d2 = BSpline(knots, np.eye(nb), 3).derivative(2)(pts)
    return (d2 * wts[:, None]).T @ d2


def _explained(x, y, df_bounds) -> float:
    try:
        fitted = PenalizedSpline(x, df_bounds=df_bounds).fit(y)
    except np.linalg.LinAlgError as exc:
        raise IndexEvaluationError(f"spline fit failed: {exc}") from exc
    return 1.0 - np.var(y - fitted) / np.var(y)


def idx_splines2d(y, params: dict | None = None) -> float:
    """max over both regression directions of 1 - Var(residual) / Var(response)."""
    params = params or {}
    v = as_xy(y)
    if v.shape[0] < 10:
        raise TooFewPoints("splines2d needs at least 10 points")
    if np.ptp(v[:, 0]) == 0 or np.ptp(v[:, 1]) == 0:
        return 0.0
    bounds = tuple(params.get("spline_df_bounds", DEFAULT_DF_BOUNDS))
    a = _explained(v[:, 0], v[:, 1], bounds)
    b = _explained(v[:, 1], v[:, 0], bounds)
    return float(np.clip(max(a, b), 0.0, 1.0))
