"""Central-hole index, rescaled so that bivariate normal data scores 0."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import TooFewPoints
from ..geometry import as_xy

CALIBRATION_SEED = 20190501
CALIBRATION_SIZE = 100_000


def _sphere(v: np.ndarray) -> np.ndarray:
    """Centre and whiten with the sample covariance (ddof=1).

    Any invertible affine map of the projection whitens to the same points up
    to an orthogonal transform, which leaves |z| unchanged.  A singular
    covariance falls back to per-column scaling.
    """
    c = v - v.mean(axis=0)
    cov = c.T @ c / (len(v) - 1)
    w, u = np.linalg.eigh(cov)
    if w[0] <= 1e-12 * max(w[1], 1e-300):
        sd = np.sqrt(np.diag(cov))
        sd[sd == 0] = 1.0
        return c / sd
    return c @ (u / np.sqrt(w))


def holes_raw(y) -> float:
    """(1 - mean(exp(-|z|^2 / 2))) / (1 - exp(-1)) on the whitened projection z."""
    v = as_xy(y)
    if v.shape[0] < 3:
        raise TooFewPoints("holes needs at least 3 points")
    z = _sphere(v)
    num = 1.0 - np.mean(np.exp(-0.5 * np.sum(z * z, axis=1)))
    return float(num / (1.0 - np.exp(-1.0)))


@lru_cache(maxsize=1)
def normal_anchor() -> float:
    """Raw holes value of a large bivariate normal sample (fixed seed)."""
    rng = np.random.default_rng(CALIBRATION_SEED)
    return holes_raw(rng.standard_normal((CALIBRATION_SIZE, 2)))


def idx_holes(y, params: dict | None = None) -> float:
    params = params or {}
    raw = holes_raw(y)
    if params.get("raw", False):
        return float(np.clip(raw, 0.0, 1.0))
    a = params.get("holes_anchor")
    if a is None:
        a = normal_anchor()
    return float(np.clip((raw - a) / (1.0 - a), 0.0, 1.0))
