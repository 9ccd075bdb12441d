"""Index-quality diagnostics: traces, rotation scans, percentile tables,
squint angles, timing, parameter sweeps and index smoothing."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError, InvalidParameter, NoStructureAtTarget, ShapeError
from .geometry import Frame, as_xy, geodesic_path, geodesic_step, tangent_direction
from .indexes import IndexDescriptor, bind, descriptor, evaluate
from .simdata import SimSpec, generate


@dataclass(frozen=True)
class FrameIndex:
    """An index given directly as a function of the frame (synthetic indexes)."""

    name: str
    fn: Callable[[Frame], float]

    @property
    def label(self):
        return self.name


def _label(ix) -> str:
    return ix.label if isinstance(ix, FrameIndex) else descriptor(ix).label


def _binder(x, ix) -> Callable[[Frame], float]:
    if isinstance(ix, FrameIndex):
        return ix.fn
    return bind(ix, x)


def _describe(ix):
    if isinstance(ix, FrameIndex):
        return {"name": ix.name, "synthetic": True}
    d = descriptor(ix)
    return {"name": d.name, "params": {k: v for k, v in d.params.items() if k != "tic_calibration"}}


def fingerprint(x, config: dict) -> str:
    h = hashlib.sha256()
    if x is not None:
        h.update(np.ascontiguousarray(getattr(x, "values", x), dtype=float).tobytes())
    h.update(json.dumps(config, sort_keys=True, default=str).encode())
    return h.hexdigest()[:16]


def masd(values) -> float:
    """Mean absolute successive difference along a trace."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if len(v) < 2:
        return 0.0
    return float(np.mean(np.abs(np.diff(v))))


@dataclass
class TraceResult:
    path: list
    rows: list  # (frame index, index name, value)
    leg_markers: list = field(default_factory=list)
    invalid: list = field(default_factory=list)  # (frame index, index name, message)
    metadata: dict = field(default_factory=dict)

    @property
    def index_names(self) -> list[str]:
        seen = []
        for _, k, _ in self.rows:
            if k not in seen:
                seen.append(k)
        return seen

    def values(self, name: str) -> np.ndarray:
        out = np.full(len(self.path), np.nan)
        for i, k, v in self.rows:
            if k == name:
                out[i] = v
        return out

    def masd(self, name: str) -> float:
        return masd(self.values(name))

    def write(self, directory) -> None:
        """traces.csv in the tour-history schema plus frames.csv with marker flags."""
        from pathlib import Path

        from .optimizer import write_frames_csv

        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        write_frames_csv(d / "frames.csv", self.path, self.leg_markers, ["trace"] * len(self.path))
        with open(d / "traces.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["frame_id", "index_name", "value", "eval_ms"])
            for i, k, v in self.rows:
                w.writerow([i, k, repr(float(v)), ""])


def evaluate_path(x, path: Sequence[Frame], indexes, leg_markers=(), config=None) -> TraceResult:
    """Evaluate every index on every frame; a failing cell is recorded as invalid."""
    fns = [(_label(ix), _binder(x, ix)) for ix in indexes]
    rows, invalid = [], []
    for i, fr in enumerate(path):
        for name, f in fns:
            try:
                rows.append((i, name, float(f(fr))))
            except EvaluationError as exc:
                invalid.append((i, name, str(exc)))
    cfg = dict(config or {})
    cfg["indexes"] = [_describe(ix) for ix in indexes]
    return TraceResult(list(path), rows, list(leg_markers), invalid,
                       {"config": cfg, "fingerprint": fingerprint(x, cfg)})


def _p(x) -> int:
    return np.asarray(getattr(x, "values", x)).shape[1]


def nuisance_path(p: int, steps: int = 41) -> list[Frame]:
    if p < 4:
        raise ShapeError("nuisance trace needs p >= 4")
    return geodesic_path(Frame.axes(p, 0, 1), Frame.axes(p, 2, 3), steps)


def squint_path(p: int, steps_per_leg: int = 30) -> tuple[list[Frame], int]:
    """x1x2 -> x1x(p-1) -> x(p-1)xp; returns the path and the marker position."""
    if p < 4:
        raise ShapeError("squint trace needs p >= 4")
    a = Frame.axes(p, 0, 1)
    b = Frame.axes(p, 0, p - 2)
    c = Frame.axes(p, p - 2, p - 1)
    leg1 = geodesic_path(a, b, steps_per_leg)
    leg2 = geodesic_path(leg1[-1], c, steps_per_leg)
    return leg1 + leg2[1:], steps_per_leg - 1


def trace_nuisance(x, indexes, steps: int = 41) -> TraceResult:
    """Indexes along the geodesic from span(x1, x2) to span(x3, x4)."""
    path = nuisance_path(_p(x), steps)
    return evaluate_path(x, path, indexes, config={"trace": "nuisance", "steps": steps})


def trace_squint(x, indexes, steps_per_leg: int = 30) -> TraceResult:
    """Indexes along the two-leg path into the structured plane."""
    path, mark = squint_path(_p(x), steps_per_leg)
    return evaluate_path(x, path, indexes, [mark],
                         config={"trace": "squint", "steps_per_leg": steps_per_leg})


def rotation_scan(y, indexes, n_angles: int = 36) -> dict:
    """Index values for the projection rotated by angles k pi / n_angles, k < n_angles."""
    if n_angles < 8:
        raise InvalidParameter("n_angles must be at least 8")
    v = as_xy(y)
    angles = np.arange(n_angles) * np.pi / n_angles
    out = {"angle": angles}
    descs = [descriptor(ix) for ix in indexes]
    for d in descs:
        vals = []
        for a in angles:
            c, s = np.cos(a), np.sin(a)
            vals.append(evaluate(d, v @ np.array([[c, -s], [s, c]])))
        out[d.label] = np.array(vals)
    return out


def spread(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(v.max() - v.min())


@dataclass
class PercentileTable:
    rows: list  # dicts: index, family, role, p5, p95
    samples: dict  # (index, family, role) -> array of values
    metadata: dict = field(default_factory=dict)

    def cell(self, index: str, family: str, role: str) -> tuple[float, float]:
        for r in self.rows:
            if (r["index"], r["family"], r["role"]) == (index, family, role):
                return r["p5"], r["p95"]
        raise KeyError((index, family, role))

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "family", "role", "p5", "p95"])
            for r in self.rows:
                w.writerow([r["index"], r["family"], r["role"], repr(r["p5"]), repr(r["p95"])])


def percentile_table(families=("pipe", "sine", "spiral"), indexes=None, n: int = 1000, n_reps: int = 100,
                     p: int = 6, seed: int = 0, noise_pair=(0, 1), noise_params=None) -> PercentileTable:
    """5th and 95th percentiles of each index on a noise pair and the structured pair.

    Replicate r of every family uses seed ``seed * 100003 + r``.  When
    convex1m is requested, raw ``convex`` rows (1 - convex1m) are added.
    """
    if n_reps < 20:
        raise InvalidParameter("n_reps must be at least 20")
    from .indexes import INDEX_NAMES

    descs = [descriptor(ix) for ix in (indexes or INDEX_NAMES)]
    noise_params = noise_params or {}
    samples: dict = {}
    for fam in families:
        for r in range(n_reps):
            spec = SimSpec(fam, n, p, seed * 100003 + r, dict(noise_params.get(fam, {})))
            xv = generate(spec).values
            pairs = {"noise": xv[:, list(noise_pair)], "structure": xv[:, [p - 2, p - 1]]}
            for role, y in pairs.items():
                for d in descs:
                    val = evaluate(d, y)
                    samples.setdefault((d.label, fam, role), []).append(val)
                    if d.name == "convex1m":
                        samples.setdefault(("convex", fam, role), []).append(1.0 - val)
    rows = []
    for (idx, fam, role), vals in samples.items():
        a = np.asarray(vals)
        rows.append({"index": idx, "family": fam, "role": role,
                     "p5": float(np.percentile(a, 5)), "p95": float(np.percentile(a, 95))})
    cfg = {"families": list(families), "indexes": [_describe(d) for d in descs], "n": n,
           "n_reps": n_reps, "p": p, "seed": seed, "noise_pair": list(noise_pair),
           "noise_params": noise_params}
    return PercentileTable(rows, {k: np.asarray(v) for k, v in samples.items()},
                           {"config": cfg, "fingerprint": fingerprint(None, cfg)})


@dataclass
class SquintResult:
    angles: np.ndarray
    median: float
    q1: float
    q3: float
    target_value: float
    directions: list


def squint_angle_estimate(x, index, target: Frame, threshold: float = 0.8, n_dirs: int = 20,
                          rng=None, window: float = math.pi / 4, tol: float = 1e-3) -> SquintResult:
    """Largest angle along random geodesics from ``target`` at which the index
    stays at or above ``threshold`` times its value at the target.

    Each direction is bisected on [0, window]; a direction that never drops
    below the level reports ``window``.
    """
    rng = np.random.default_rng(rng)
    f = _binder(x, index)
    v0 = float(f(target))
    if not v0 > 0:
        raise NoStructureAtTarget(f"index is {v0} at the target plane")
    level = threshold * v0
    angles, dirs = [], []
    for _ in range(n_dirs):
        h = tangent_direction(target, rng.standard_normal((target.p, 2)))
        dirs.append(h)
        if f(geodesic_step(target, h, window)) >= level:
            angles.append(window)
            continue
        lo, hi = 0.0, window
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if f(geodesic_step(target, h, mid)) >= level:
                lo = mid
            else:
                hi = mid
        angles.append(0.5 * (lo + hi))
    a = np.asarray(angles)
    q1, med, q3 = np.percentile(a, [25, 50, 75])
    return SquintResult(a, float(med), float(q1), float(q3), v0, dirs)


def timing_benchmark(indexes, sizes, n_reps: int = 5, seed: int = 0) -> list[dict]:
    """Median wall-clock milliseconds per evaluation on fresh normal projections."""
    if not len(sizes):
        raise InvalidParameter("sizes must be nonempty")
    rng = np.random.default_rng(seed)
    rows = []
    for d in (descriptor(ix) for ix in indexes):
        for n in sizes:
            evaluate(d, rng.standard_normal((n, 2)))  # warm up compilation and calibration
            times = []
            for _ in range(n_reps):
                y = rng.standard_normal((n, 2))
                t0 = time.perf_counter()
                evaluate(d, y)
                times.append((time.perf_counter() - t0) * 1000.0)
            rows.append({"index": d.label, "n": int(n), "median_ms": float(np.median(times))})
    return rows


def parameter_sweep(x, index, param_name: str, values, structured_pair=None, noise_pair=(0, 1),
                    trace_steps: int = 41) -> list[dict]:
    """Structured score, noise score, nuisance-trace MASD and cost per parameter value."""
    base = descriptor(index)
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    p = xv.shape[1]
    sp = list(structured_pair or (p - 2, p - 1))
    rows = []
    for val in values:
        d = base.with_params(**{param_name: val})  # raises InvalidParameter if not applicable
        t0 = time.perf_counter()
        s = evaluate(d, xv[:, sp])
        nz = evaluate(d, xv[:, list(noise_pair)])
        ms = (time.perf_counter() - t0) * 500.0
        tr = trace_nuisance(xv, [d], trace_steps) if p >= 4 else None
        rows.append({"value": val, "structured": s, "noise": nz,
                     "trace_masd": tr.masd(d.label) if tr else float("nan"), "eval_ms": ms})
    return rows


def smooth_index(index, window: int = 5, method: str = "mean", seed: int = 0,
                 step: float = 0.01) -> IndexDescriptor:
    """Descriptor whose frame-level value aggregates ``window`` nearby frames.

    The frame itself plus window - 1 frames at geodesic distance ``step``
    along fixed pseudo-random tangents (see :func:`pptour.indexes.bind`).
    """
    window = int(window)
    if window < 1 or window % 2 == 0:
        raise InvalidParameter("window must be a positive odd integer")
    if method not in ("mean", "median"):
        raise InvalidParameter(f"unknown smoothing method {method!r}")
    d = descriptor(index)
    if window == 1:
        return d
    return d.with_params(smooth_window=window, smooth_method=method, smooth_seed=int(seed),
                         smooth_step=float(step))
