"""Grid mutual information, MIC and TIC.

The characteristic matrix follows the equipartition/dynamic-programming
scheme: for every resolution (kx, ky) with kx * ky <= B(n), one axis is
equipartitioned into ky rows and the column boundaries on the other axis
are chosen by dynamic programming over clumps to maximise the mutual
information.  Both axis roles are computed and the larger value is kept.
Entries are normalised by log(min(kx, ky)).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

from ..errors import CalibrationRequired, InvalidParameter, TooFewPoints
from ..geometry import as_xy

DEFAULT_EXPONENT = 0.6
DEFAULT_CLUMPS = 5


@numba.njit(cache=True)
def _optimize_axis(x_order, x_newgroup, y_first_rank, ky, kx_max, c, xlogx):
    """Best I(P;Q) for up to l columns, l = 0..kx_max, with Q = ky equal rows.

    Returns an array ``out`` with ``out[l]`` the maximal mutual information
    (nats) using at most ``l`` columns on the x axis.
    """
    n = x_order.shape[0]
    rows = np.empty(n, dtype=np.int64)
    for i in range(n):
        rows[i] = (y_first_rank[i] * ky) // n

    # clumps: runs of x-sorted points in one row; tied x values never split
    clump = np.empty(n, dtype=np.int64)
    n_clumps = 0
    cur_pure = False
    cur_row = -1
    pos = 0
    while pos < n:
        end = pos + 1
        while end < n and not x_newgroup[end]:
            end += 1
        r0 = rows[x_order[pos]]
        pure = True
        for q in range(pos + 1, end):
            if rows[x_order[q]] != r0:
                pure = False
                break
        if not (pure and cur_pure and r0 == cur_row):
            n_clumps += 1
            cur_pure = pure
            cur_row = r0
        for q in range(pos, end):
            clump[q] = n_clumps - 1
        pos = end

    # superclumps: merge consecutive clumps into about c * kx_max groups
    if c > 0 and n_clumps > c * kx_max:
        khat = c * kx_max
        sizes = np.zeros(n_clumps, dtype=np.int64)
        for q in range(n):
            sizes[clump[q]] += 1
        sid = np.empty(n_clumps, dtype=np.int64)
        cum = 0
        last = -1
        k = -1
        for j in range(n_clumps):
            s = (cum * khat) // n
            if s != last:
                k += 1
                last = s
            sid[j] = k
            cum += sizes[j]
        for q in range(n):
            clump[q] = sid[clump[q]]
        n_clumps = k + 1

    k = n_clumps
    pref = np.zeros((k + 1, ky), dtype=np.int64)
    for q in range(n):
        pref[clump[q] + 1, rows[x_order[q]]] += 1
    for t in range(1, k + 1):
        for r in range(ky):
            pref[t, r] += pref[t - 1, r]
    tot = np.zeros(k + 1, dtype=np.int64)
    for t in range(k + 1):
        s = 0
        for r in range(ky):
            s += pref[t, r]
        tot[t] = s

    hq = xlogx[n]
    for r in range(ky):
        hq -= xlogx[pref[k, r]]
    hq /= n

    # cost[s, t]: n * (conditional row entropy) of the column holding clumps s..t-1
    cost = np.zeros((k + 1, k + 1))
    for s in range(k):
        for t in range(s + 1, k + 1):
            v = xlogx[tot[t] - tot[s]]
            for r in range(ky):
                v -= xlogx[pref[t, r] - pref[s, r]]
            cost[s, t] = v

    out = np.zeros(kx_max + 1)
    w_prev = np.empty(k + 1)
    for t in range(k + 1):
        w_prev[t] = cost[0, t]
    best = hq - w_prev[k] / n
    if kx_max >= 1:
        out[1] = max(best, 0.0)
    w_cur = np.empty(k + 1)
    for l in range(2, kx_max + 1):
        if l > k:
            out[l] = out[l - 1]
            continue
        for t in range(k + 1):
            w_cur[t] = np.inf
        for t in range(l, k + 1):
            m = np.inf
            for s in range(l - 1, t):
                v = w_prev[s] + cost[s, t]
                if v < m:
                    m = v
            w_cur[t] = m
        val = hq - w_cur[k] / n
        if val > best:
            best = val
        out[l] = best
        for t in range(k + 1):
            w_prev[t] = w_cur[t]
    return out


def _axis_inputs(x, y):
    x_order = np.argsort(x, kind="stable")
    xs = x[x_order]
    x_newgroup = np.r_[True, xs[1:] != xs[:-1]]
    y_order = np.argsort(y, kind="stable")
    ys = y[y_order]
    newg = np.r_[True, ys[1:] != ys[:-1]]
    first = np.maximum.accumulate(np.where(newg, np.arange(len(y)), 0))
    y_first_rank = np.empty(len(y), dtype=np.int64)
    y_first_rank[y_order] = first
    return x_order.astype(np.int64), x_newgroup, y_first_rank


@lru_cache(maxsize=4)
def _xlogx(n: int) -> np.ndarray:
    i = np.arange(n + 1, dtype=float)
    out = np.zeros(n + 1)
    out[1:] = i[1:] * np.log(i[1:])
    return out


def resolution_bound(n: int, exponent: float = DEFAULT_EXPONENT) -> int:
    return max(int(np.floor(n ** exponent)), 4)


def _check(v):
    if v.shape[0] < 4:
        raise TooFewPoints("mutual information grid needs at least 4 points")


def idx_mi_grid(y, kx: int, ky: int, clump_factor: int = 0) -> float:
    """Normalised maximal grid mutual information at resolution (kx, ky).

    The second coordinate is equipartitioned into ``ky`` rows and at most
    ``kx`` columns on the first coordinate are placed optimally.  With
    ``clump_factor = 0`` every clump boundary is a candidate (exact).
    """
    v = as_xy(y)
    _check(v)
    if kx < 2 or ky < 2:
        raise InvalidParameter("kx and ky must be at least 2")
    xo, xg, yr = _axis_inputs(v[:, 0], v[:, 1])
    out = _optimize_axis(xo, xg, yr, int(ky), int(kx), int(clump_factor), _xlogx(len(v)))
    return float(min(out[kx] / np.log(min(kx, ky)), 1.0))


def characteristic_matrix(y, exponent: float = DEFAULT_EXPONENT, clump_factor: int = DEFAULT_CLUMPS):
    """Normalised characteristic matrix ``M[kx, ky]``; NaN outside kx * ky <= B."""
    v = as_xy(y)
    return _char_matrix_cached(v.tobytes(), v.shape[0], float(exponent), int(clump_factor))


@numba.njit(cache=True)
def _fill_axis(raw, x_order, x_newgroup, y_first_rank, big_b, c, xlogx, transpose):
    half = big_b // 2
    for ky in range(2, half + 1):
        kx_max = big_b // ky
        if kx_max < 2:
            continue
        out = _optimize_axis(x_order, x_newgroup, y_first_rank, ky, kx_max, c, xlogx)
        for kx in range(2, kx_max + 1):
            val = out[kx] / np.log(min(kx, ky))
            if transpose:
                i, j = ky, kx
            else:
                i, j = kx, ky
            if np.isnan(raw[i, j]) or val > raw[i, j]:
                raw[i, j] = val


@lru_cache(maxsize=16)
def _char_matrix_cached(buf: bytes, n: int, exponent: float, clump_factor: int):
    v = np.frombuffer(buf, dtype=float).reshape(n, 2)
    _check(v)
    big_b = resolution_bound(n, exponent)
    half = big_b // 2
    tab = _xlogx(n)
    raw = np.full((half + 1, half + 1), np.nan)
    for cols, rows_axis, transpose in ((0, 1, False), (1, 0, True)):
        xo, xg, yr = _axis_inputs(v[:, cols], v[:, rows_axis])
        _fill_axis(raw, xo, xg, yr, big_b, clump_factor, tab, transpose)
    m = np.minimum(raw, 1.0)
    m.setflags(write=False)
    return m


def idx_mic(y, params: dict | None = None) -> float:
    params = params or {}
    v = as_xy(y)
    if v.shape[0] < 10:
        raise TooFewPoints("MIC needs at least 10 points")
    m = characteristic_matrix(v, params.get("mic_exponent", DEFAULT_EXPONENT),
                              params.get("mic_clumps", DEFAULT_CLUMPS))
    return float(np.clip(np.nanmax(m), 0.0, 1.0))


def tic_raw(y, params: dict | None = None) -> float:
    params = params or {}
    m = characteristic_matrix(y, params.get("mic_exponent", DEFAULT_EXPONENT),
                              params.get("mic_clumps", DEFAULT_CLUMPS))
    return float(np.nansum(m))


@dataclass(frozen=True)
class TicCalibration:
    n: int
    max_estimate: float
    mic_exponent: float = DEFAULT_EXPONENT
    mic_clumps: int = DEFAULT_CLUMPS

    def __post_init__(self):
        if not self.max_estimate > 0:
            raise InvalidParameter("TIC calibration maximum must be positive")


def calibrate_tic(n: int, rng=None, params: dict | None = None) -> TicCalibration:
    """Unscaled TIC of the equispaced diagonal y2 = y1 with n points.

    ``rng`` is accepted for interface symmetry; the reference is deterministic.
    """
    params = params or {}
    exponent = float(params.get("mic_exponent", DEFAULT_EXPONENT))
    clumps = int(params.get("mic_clumps", DEFAULT_CLUMPS))
    return _calibrate_cached(int(n), exponent, clumps)


@lru_cache(maxsize=64)
def _calibrate_cached(n: int, exponent: float, clumps: int) -> TicCalibration:
    if n < 10:
        raise TooFewPoints("TIC calibration needs n >= 10")
    t = np.linspace(0.0, 1.0, n)
    ref = np.column_stack([t, t])
    val = tic_raw(ref, {"mic_exponent": exponent, "mic_clumps": clumps})
    return TicCalibration(n, val, exponent, clumps)


def idx_tic(y, params: dict | None = None, cal: TicCalibration | None = None) -> float:
    params = dict(params or {})
    v = as_xy(y)
    if v.shape[0] < 10:
        raise TooFewPoints("TIC needs at least 10 points")
    if cal is None:
        cal = params.get("tic_calibration")
    if cal is None:
        raise CalibrationRequired(f"no TIC calibration for n={v.shape[0]}")
    if cal.n != v.shape[0]:
        raise CalibrationRequired(f"calibration is for n={cal.n}, data has n={v.shape[0]}")
    params.setdefault("mic_exponent", cal.mic_exponent)
    params.setdefault("mic_clumps", cal.mic_clumps)
    return float(np.clip(tic_raw(v, params) / cal.max_estimate, 0.0, 1.0))
