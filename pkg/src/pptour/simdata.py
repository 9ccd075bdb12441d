"""Simulated pipe, sine and spiral families, and preprocessing transforms.

Each family puts its structure in the last two columns and fills the rest
with nuisance noise.  All columns are standardized before return.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateColumn, InvalidParameter
from .geometry import DataMatrix

FAMILIES = ("pipe", "sine", "spiral")

DEFAULT_NOISE = {
    "pipe": {"radial_sd": 0.02},
    "sine": {"jitter_sd": 0.01},
    "spiral": {"spiral_a": 0.1, "spiral_b": 0.1, "theta_spread": 2 * np.pi},
}


@dataclass(frozen=True)
class SimSpec:
    family: str
    n: int = 1000
    p: int = 6
    seed: int = 0
    noise_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown family {self.family!r}")
        if self.n < 10:
            raise InvalidParameter("n must be at least 10")
        if self.p < 3:
            raise InvalidParameter("p must be at least 3")
        bad = set(self.noise_params) - set(DEFAULT_NOISE[self.family])
        if bad:
            raise InvalidParameter(f"{self.family} has no noise parameter(s) {sorted(bad)}")

    def noise(self, key: str) -> float:
        return float(self.noise_params.get(key, DEFAULT_NOISE[self.family][key]))


def _names(p):
    return tuple(f"x{j + 1}" for j in range(p))


def _finish(nuisance: np.ndarray, pair: np.ndarray) -> DataMatrix:
    x = np.column_stack([nuisance, pair])
    return standardize(DataMatrix(x, _names(x.shape[1])))


def pipe_raw(spec: SimSpec) -> np.ndarray:
    """Unstandardized pipe sample: uniform nuisance, noisy unit circle."""
    rng = np.random.default_rng(spec.seed)
    nuis = rng.uniform(-1.0, 1.0, size=(spec.n, spec.p - 2))
    ang = rng.uniform(0.0, 2 * np.pi, size=spec.n)
    rad = 1.0 + rng.normal(0.0, 1.0, size=spec.n) * spec.noise("radial_sd")
    return np.column_stack([nuis, rad * np.cos(ang), rad * np.sin(ang)])


def sine_raw(spec: SimSpec) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)
    nuis = rng.standard_normal((spec.n, spec.p - 2))
    a = rng.standard_normal(spec.n)
    b = np.sin(a) + rng.normal(0.0, 1.0, size=spec.n) * spec.noise("jitter_sd")
    return np.column_stack([nuis, a, b])


def spiral_raw(spec: SimSpec, return_theta: bool = False):
    rng = np.random.default_rng(spec.seed)
    nuis = rng.standard_normal((spec.n, spec.p - 2))
    # theta_spread is a variance
    theta = rng.normal(0.0, np.sqrt(spec.noise("theta_spread")), size=spec.n)
    t = np.abs(theta)
    r = spec.noise("spiral_a") + spec.noise("spiral_b") * t
    out = np.column_stack([nuis, r * np.cos(t), r * np.sin(t)])
    return (out, theta) if return_theta else out


def gen_pipe(spec: SimSpec) -> DataMatrix:
    _require(spec, "pipe")
    x = pipe_raw(spec)
    return _finish(x[:, :-2], x[:, -2:])


def gen_sine(spec: SimSpec) -> DataMatrix:
    _require(spec, "sine")
    x = sine_raw(spec)
    return _finish(x[:, :-2], x[:, -2:])


def gen_spiral(spec: SimSpec) -> DataMatrix:
    _require(spec, "spiral")
    x = spiral_raw(spec)
    return _finish(x[:, :-2], x[:, -2:])


def generate(spec: SimSpec) -> DataMatrix:
    return {"pipe": gen_pipe, "sine": gen_sine, "spiral": gen_spiral}[spec.family](spec)


def _require(spec, family):
    if spec.family != family:
        raise InvalidParameter(f"spec is for {spec.family}, not {family}")


def _values(x):
    return np.asarray(getattr(x, "values", x), dtype=float)


def _wrap(x, v, names=None):
    if names is None:
        names = getattr(x, "column_names", None) or _names(v.shape[1])
    return DataMatrix(v, tuple(names))


def standardize(x) -> DataMatrix:
    """Per-column z-scores (sample sd)."""
    v = _values(x)
    sd = v.std(axis=0, ddof=1)
    if np.any(sd <= 0):
        raise DegenerateColumn(f"zero-variance column(s) {np.flatnonzero(sd <= 0).tolist()}")
    return _wrap(x, (v - v.mean(axis=0)) / sd)


def minmax_scale(x) -> DataMatrix:
    v = _values(x)
    lo, hi = v.min(axis=0), v.max(axis=0)
    if np.any(hi <= lo):
        raise DegenerateColumn(f"zero-range column(s) {np.flatnonzero(hi <= lo).tolist()}")
    out = (v - lo) / (hi - lo)
    # pin the extremes exactly
    out[v == lo] = 0.0
    out[v == hi] = 1.0
    return _wrap(x, out)


def sphere_pca(x, keep: int | None = None, rank_tol: float = 1e-10) -> DataMatrix:
    """Project onto the leading principal components, each scaled to unit variance."""
    v = _values(x)
    p = v.shape[1]
    keep = p if keep is None else int(keep)
    if not 2 <= keep <= p:
        raise InvalidParameter(f"keep must be in 2..{p}")
    c = v - v.mean(axis=0)
    _, s, vt = np.linalg.svd(c, full_matrices=False)
    var = s ** 2 / (v.shape[0] - 1)
    rank = int(np.sum(var > rank_tol * var[0])) if var[0] > 0 else 0
    if rank < keep:
        warnings.warn(f"covariance has rank {rank}; keeping {rank} components instead of {keep}")
        keep = rank
    if keep < 2:
        raise DegenerateColumn(f"covariance rank {rank} is below 2")
    w = vt[:keep].T / np.sqrt(var[:keep])
    out = c @ w
    return DataMatrix(out, tuple(f"pc{j + 1}" for j in range(keep)))
