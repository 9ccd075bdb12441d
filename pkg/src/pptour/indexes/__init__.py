"""Index registry: named, parameterized projection-pursuit indexes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import InvalidParameter, UnknownIndex
from ..geometry import Frame, as_xy, geodesic_step, tangent_direction
from .association import idx_dcor2d, idx_splines2d
from .holes import idx_holes
from .information import TicCalibration, calibrate_tic, idx_mi_grid, idx_mic, idx_tic
from .scagnostic import idx_convex1m, idx_skinny, idx_stringy

INDEX_NAMES = ("holes", "convex1m", "skinny", "stringy", "dcor2d", "splines2d", "mic", "tic")

# parameters each index understands; smoothing keys apply to all
_SMOOTH_KEYS = {"smooth_window", "smooth_method", "smooth_seed", "smooth_step"}
_SCAG_KEYS = {"bin_cap", "alpha_override"}
_MIC_KEYS = {"mic_exponent", "mic_clumps"}
ALLOWED_PARAMS = {
    "holes": {"raw", "holes_anchor"},
    "convex1m": _SCAG_KEYS,
    "skinny": _SCAG_KEYS,
    "stringy": _SCAG_KEYS,
    "dcor2d": {"squared"},
    "splines2d": {"spline_df_bounds"},
    "mic": _MIC_KEYS,
    "tic": _MIC_KEYS | {"tic_calibration"},
}

_FUNCS: dict[str, Callable] = {
    "holes": idx_holes,
    "convex1m": idx_convex1m,
    "skinny": idx_skinny,
    "stringy": idx_stringy,
    "dcor2d": idx_dcor2d,
    "splines2d": idx_splines2d,
    "mic": idx_mic,
    "tic": idx_tic,
}


@dataclass(frozen=True)
class IndexDescriptor:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in _FUNCS:
            raise UnknownIndex(self.name)
        bad = set(self.params) - ALLOWED_PARAMS[self.name] - _SMOOTH_KEYS
        if bad:
            raise InvalidParameter(f"{self.name} does not take parameter(s) {sorted(bad)}")

    @property
    def label(self) -> str:
        w = self.params.get("smooth_window")
        return f"{self.name}_s{w}" if w else self.name

    def with_params(self, **kw) -> "IndexDescriptor":
        return IndexDescriptor(self.name, {**self.params, **kw})


def descriptor(spec) -> IndexDescriptor:
    """Build a descriptor from a name, a (name, params) pair or a descriptor."""
    if isinstance(spec, IndexDescriptor):
        return spec
    if isinstance(spec, str):
        return IndexDescriptor(spec)
    if isinstance(spec, dict):
        return IndexDescriptor(spec["name"], dict(spec.get("params") or {}))
    name, params = spec
    return IndexDescriptor(name, dict(params))


def evaluate(desc: IndexDescriptor | str, y) -> float:
    """Value of the named index on a projection (smoothing is frame-level, see bind)."""
    desc = descriptor(desc)
    v = as_xy(y)
    params = {k: val for k, val in desc.params.items() if k not in _SMOOTH_KEYS}
    if desc.name == "tic" and params.get("tic_calibration") is None:
        params["tic_calibration"] = calibrate_tic(v.shape[0], params=params)
    val = float(_FUNCS[desc.name](v, params))
    if not np.isfinite(val):
        val = 0.0
    return val


def bind(desc: IndexDescriptor | str, x) -> Callable[[Frame], float]:
    """Frame-level evaluator for one data matrix.

    With ``smooth_window`` > 1 the value at a frame is the mean (or median)
    over the frame itself and window - 1 nearby frames at geodesic distance
    ``smooth_step`` along fixed pseudo-random tangents.
    """
    desc = descriptor(desc)
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    window = int(desc.params.get("smooth_window", 1) or 1)
    if window <= 1:
        return lambda f: evaluate(desc, xv @ f.basis)
    method = desc.params.get("smooth_method", "mean")
    if method not in ("mean", "median"):
        raise InvalidParameter(f"unknown smoothing method {method!r}")
    step = float(desc.params.get("smooth_step", 0.01))
    seed = int(desc.params.get("smooth_seed", 0))
    zs = np.random.default_rng(seed).standard_normal((window - 1, xv.shape[1], 2))
    agg = np.mean if method == "mean" else np.median

    def f_idx(f: Frame) -> float:
        vals = [evaluate(desc, xv @ f.basis)]
        for z in zs:
            try:
                h = tangent_direction(f, z)
            except ValueError:
                continue
            g = geodesic_step(f, h, step)
            vals.append(evaluate(desc, xv @ g.basis))
        return float(agg(vals))

    return f_idx


__all__ = [
    "INDEX_NAMES",
    "IndexDescriptor",
    "TicCalibration",
    "bind",
    "calibrate_tic",
    "descriptor",
    "evaluate",
    "idx_convex1m",
    "idx_dcor2d",
    "idx_holes",
    "idx_mi_grid",
    "idx_mic",
    "idx_skinny",
    "idx_splines2d",
    "idx_stringy",
    "idx_tic",
]
