"""Guided tour: derivative-free searches over planes and the record loop.

A search starts from the current plane and returns a better plane (a
:class:`Candidate`) or :data:`EXHAUSTED`.  :func:`guided_tour` alternates
searches with geodesic interpolation to each accepted target and records
index values on every frame of the path.
"""
from __future__ import annotations

import csv
import hashlib
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError, InvalidParameter
from .geometry import (
    Frame,
    frame_from_stored,
    geodesic_path,
    geodesic_step,
    orthonormalize,
    proj_dist,
    random_frame,
    tangent_direction,
)
from .indexes import IndexDescriptor, bind, descriptor

METHODS = ("better_random", "better", "geodesic")
SAMPLERS = ("window", "blend")
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "geodesic"
    alpha: float = 0.5
    cooling: float = 0.99
    max_tries: int = 25
    tol: float = 1e-4
    probe_step: float = 0.01
    line_window: float = math.pi / 4
    line_tol: float = 1e-3
    interp_steps: int = 20
    n_dir: int = 10
    local_fraction: float = 0.0
    max_anchors: int = 500
    seed: int = 0
    sampler: str = "window"

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameter(f"unknown method {self.method!r}")
        if self.sampler not in SAMPLERS:
            raise InvalidParameter(f"unknown sampler {self.sampler!r}")
        if self.sampler == "blend" and not self.alpha <= 1:
            raise InvalidParameter("the blend sampler needs alpha <= 1")
        if not 0 < self.cooling <= 1:
            raise InvalidParameter("cooling must be in (0, 1]")
        if not self.alpha > 0:
            raise InvalidParameter("alpha must be positive")
        if self.max_tries < 1:
            raise InvalidParameter("max_tries must be at least 1")
        if self.tol < 0:
            raise InvalidParameter("tol must be nonnegative")
        if self.interp_steps < 2:
            raise InvalidParameter("interp_steps must be at least 2")
        if not 0 <= self.local_fraction <= 1:
            raise InvalidParameter("local_fraction must be in [0, 1]")
        if self.n_dir < 1 or self.probe_step <= 0 or self.line_window <= 0 or self.line_tol <= 0:
            raise InvalidParameter("n_dir, probe_step, line_window and line_tol must be positive")


@dataclass(frozen=True)
class Candidate:
    frame: Frame
    value: float
    tries: int


class _Exhausted:
    def __repr__(self):
        return "EXHAUSTED"

    def __bool__(self):
        return False


EXHAUSTED = _Exhausted()


@dataclass
class SearchState:
    """Mutable per-run search state (the shrinking window of search_better)."""

    alpha: float


class CountingIndex:
    """Wraps a frame evaluator and counts calls."""

    def __init__(self, f: Callable[[Frame], float]):
        self.f = f
        self.count = 0

    def __call__(self, frame: Frame) -> float:
        self.count += 1
        return self.f(frame)


def _current_value(current, f_idx, current_value):
    return f_idx(current) if current_value is None else float(current_value)


def nearby_frame(current: Frame, alpha: float, rng: np.random.Generator, max_halvings: int = 60) -> Frame:
    """Random plane within proj_dist alpha of ``current``.

    Blends the current basis with a random frame, (1 - w) F + w R, and
    orthonormalizes; a draw outside the window is rejected and redrawn with
    the blend weight halved, so the loop always terminates.
    """
    w = min(alpha, 1.0)
    for _ in range(max_halvings):
        r = random_frame(current.p, rng)
        try:
            cand = orthonormalize((1.0 - w) * current.basis + w * r.basis)
        except ValueError:
            w *= 0.5
            continue
        if proj_dist(cand, current) <= alpha:
            return cand
        w *= 0.5
    return current


def blended_frame(current: Frame, alpha: float, rng: np.random.Generator) -> Frame:
    """Orthonormalized (1 - alpha) F + alpha R for a random frame R.

    Here alpha is a blend weight, not a distance bound: candidates can land
    well outside proj_dist alpha of ``current``.
    """
    for _ in range(60):
        r = random_frame(current.p, rng)
        try:
            return orthonormalize((1.0 - alpha) * current.basis + alpha * r.basis)
        except ValueError:
            continue
    return current


def _sample_near(current, alpha, rng, cfg):
    if cfg.sampler == "blend":
        return blended_frame(current, alpha, rng)
    return nearby_frame(current, alpha, rng)


def search_better_random(current: Frame, f_idx, cfg: OptimizerConfig, rng, current_value=None,
                         state: SearchState | None = None):
    """Global random sampling; a fraction ``local_fraction`` of draws is local."""
    cur = _current_value(current, f_idx, current_value)
    alpha = state.alpha if state is not None else cfg.alpha
    for k in range(1, cfg.max_tries + 1):
        if cfg.local_fraction > 0 and rng.random() < cfg.local_fraction:
            cand = _sample_near(current, alpha, rng, cfg)
        else:
            cand = random_frame(current.p, rng)
        val = f_idx(cand)
        if val > cur + cfg.tol:
            return Candidate(cand, val, k)
    return EXHAUSTED


def search_better(current: Frame, f_idx, cfg: OptimizerConfig, rng, current_value=None,
                  state: SearchState | None = None):
    """Local random search within plane distance alpha; alpha cools on success."""
    cur = _current_value(current, f_idx, current_value)
    if state is None:
        state = SearchState(cfg.alpha)
    for k in range(1, cfg.max_tries + 1):
        cand = _sample_near(current, state.alpha, rng, cfg)
        val = f_idx(cand)
        if val > cur + cfg.tol:
            state.alpha *= cfg.cooling
            return Candidate(cand, val, k)
    return EXHAUSTED


def random_tangent(current: Frame, rng) -> np.ndarray:
    return tangent_direction(current, rng.standard_normal((current.p, 2)))


def line_search_geodesic(current: Frame, direction: np.ndarray, f_idx, window: float = math.pi / 4,
                         tol: float = 1e-3):
    """Golden-section search for the best angle in [-window, window] along a geodesic.

    Returns ``(angle, frame, value)`` for the best point evaluated.
    """
    h = tangent_direction(current, direction)
    cache: dict[float, tuple[Frame, float]] = {}

    def at(t):
        if t not in cache:
            fr = geodesic_step(current, h, t)
            cache[t] = (fr, f_idx(fr))
        return cache[t][1]

    a, b = -window, window
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = at(c), at(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = at(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = at(d)
    t_best = max(cache, key=lambda t: (cache[t][1], -abs(t)))
    fr, val = cache[t_best]
    return t_best, fr, val


def search_geodesic(current: Frame, f_idx, cfg: OptimizerConfig, rng, current_value=None,
                    state: SearchState | None = None):
    """Probe random directions at +-probe_step, then line-search the best one."""
    cur = _current_value(current, f_idx, current_value)
    for k in range(1, cfg.max_tries + 1):
        best_h, best_v = None, -np.inf
        for _ in range(cfg.n_dir):
            h = random_tangent(current, rng)
            for sgn in (1.0, -1.0):
                v = f_idx(geodesic_step(current, h, sgn * cfg.probe_step))
                if v > best_v:
                    best_h, best_v = sgn * h, v
        _, fr, val = line_search_geodesic(current, best_h, f_idx, cfg.line_window, cfg.line_tol)
        if val > cur + cfg.tol:
            return Candidate(fr, val, k)
    return EXHAUSTED


SEARCHES = {
    "better_random": search_better_random,
    "better": search_better,
    "geodesic": search_geodesic,
}


def line_search_budget(cfg: OptimizerConfig) -> int:
    """Evaluations used by one golden-section line search."""
    width = 2 * cfg.line_window
    steps = 0
    while width > cfg.line_tol:
        width *= GOLDEN
        steps += 1
    return steps + 1


def evaluation_budget(cfg: OptimizerConfig) -> int:
    """Upper bound on index evaluations for one search call."""
    if cfg.method == "geodesic":
        return cfg.max_tries * (2 * cfg.n_dir + line_search_budget(cfg))
    return cfg.max_tries


def _fingerprint(values: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(values, dtype=float).tobytes()).hexdigest()[:16]


@dataclass
class TourHistory:
    """Frames along a tour path with per-frame index values."""

    frames: list = field(default_factory=list)
    index_values: dict = field(default_factory=dict)
    anchors: list = field(default_factory=list)
    stages: list = field(default_factory=list)
    eval_ms: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.frames)

    @property
    def index_names(self) -> list[str]:
        return list(self.index_values)

    def append(self, frame: Frame, values: dict, ms: dict, stage: str, anchor: bool = False):
        self.frames.append(frame)
        for k, v in values.items():
            self.index_values.setdefault(k, []).append(float(v))
            self.eval_ms.setdefault(k, []).append(float(ms.get(k, float("nan"))))
        self.stages.append(stage)
        if anchor:
            self.anchors.append(len(self.frames) - 1)

    @property
    def anchor_frames(self) -> list[Frame]:
        return [self.frames[i] for i in self.anchors]

    def anchor_values(self, name: str | None = None) -> list[float]:
        name = name or self.metadata.get("primary") or self.index_names[0]
        return [self.index_values[name][i] for i in self.anchors]

    @property
    def final_frame(self) -> Frame:
        return self.frames[self.anchors[-1]] if self.anchors else self.frames[-1]

    def extend(self, other: "TourHistory", skip_first: bool = True):
        off = len(self.frames)
        start = 1 if skip_first and other.frames else 0
        for i in range(start, len(other.frames)):
            vals = {k: v[i] for k, v in other.index_values.items()}
            ms = {k: v[i] for k, v in other.eval_ms.items()}
            self.append(other.frames[i], vals, ms, other.stages[i], anchor=False)
        self.anchors.extend(a - start + off for a in other.anchors if a >= start)

    def write(self, directory, timing: bool = False) -> None:
        """Write frames.csv and traces.csv; eval_ms is blank unless ``timing``."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        write_frames_csv(d / "frames.csv", self.frames, set(self.anchors), self.stages)
        with open(d / "traces.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["frame_id", "index_name", "value", "eval_ms"])
            for i in range(len(self.frames)):
                for k in self.index_values:
                    ms = self.eval_ms.get(k, [])
                    t = repr(ms[i]) if timing and i < len(ms) and np.isfinite(ms[i]) else ""
                    w.writerow([i, k, repr(self.index_values[k][i]), t])

    @classmethod
    def read(cls, directory) -> "TourHistory":
        d = Path(directory)
        h = cls()
        with open(d / "frames.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        for r in rows:
            keys = [k for k in r if k.startswith("b") and k[1:].isdigit()]
            p = len(keys) // 2
            b = np.array([[float(r[f"b{i + 1}{j + 1}"]) for j in range(2)] for i in range(p)])
            h.frames.append(frame_from_stored(b))
            h.stages.append(r["stage"])
            if r["anchor"] == "1":
                h.anchors.append(int(r["frame_id"]))
        trace_path = d / "traces.csv"
        if trace_path.exists():
            n = len(h.frames)
            with open(trace_path, newline="") as fh:
                for r in csv.DictReader(fh):
                    name = r["index_name"]
                    if name not in h.index_values:
                        h.index_values[name] = [float("nan")] * n
                        h.eval_ms[name] = [float("nan")] * n
                    i = int(r["frame_id"])
                    h.index_values[name][i] = float(r["value"])
                    if r.get("eval_ms"):
                        h.eval_ms[name][i] = float(r["eval_ms"])
        return h


def write_frames_csv(path, frames: Sequence[Frame], anchors=(), stages=None) -> None:
    anchors = set(anchors)
    p = frames[0].p if frames else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame_id", "anchor", "stage"] + [f"b{i + 1}{j + 1}" for i in range(p) for j in range(2)])
        for k, f in enumerate(frames):
            stage = stages[k] if stages is not None else ""
            w.writerow([k, int(k in anchors), stage] + [repr(float(v)) for v in f.basis.ravel()])


class TourAborted(EvaluationError):
    """An index failed mid-tour; ``history`` holds everything recorded so far."""

    def __init__(self, msg, history: TourHistory):
        super().__init__(msg)
        self.history = history


def _evaluators(x, desc, extra_indexes):
    descs = [descriptor(desc)] + [descriptor(e) for e in extra_indexes or ()]
    out = {}
    for d in descs:
        out.setdefault(d.label, bind(d, x))
    return descs[0].label, out


def guided_tour(x, desc: IndexDescriptor | str, cfg: OptimizerConfig | None = None,
                extra_indexes: Sequence = (), start: Frame | None = None, stage: str = "tour",
                f_primary: Callable[[Frame], float] | None = None) -> TourHistory:
    """Search, interpolate to the accepted target, record; repeat until exhausted.

    Every frame on every leg is recorded for the primary and extra indexes.
    The accepted target is recorded with its own basis as the last frame of
    the leg (an anchor), so the primary value at anchors never decreases.
    ``f_primary`` replaces the primary evaluator (used for synthetic indexes).
    """
    cfg = cfg or OptimizerConfig()
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    primary, fns = _evaluators(xv, desc, extra_indexes)
    if f_primary is not None:
        fns[primary] = f_primary
    rng = np.random.default_rng(cfg.seed)
    search = SEARCHES[cfg.method]
    current = start if start is not None else random_frame(xv.shape[1], rng)
    hist = TourHistory(metadata={
        "primary": primary,
        "config": asdict(cfg),
        "data_fingerprint": _fingerprint(xv),
        "n_evals": 0,
    })
    counter = CountingIndex(fns[primary])

    def record(frame, anchor, known=None):
        vals, ms = {}, {}
        for k, f in fns.items():
            t0 = time.perf_counter()
            if k == primary and known is not None:
                v = known
            else:
                v = f(frame)
            ms[k] = (time.perf_counter() - t0) * 1000.0
            vals[k] = v
        hist.append(frame, vals, ms, stage, anchor)
        return vals[primary]

    try:
        cur_val = record(current, True)
        state = SearchState(cfg.alpha)
        for _ in range(cfg.max_anchors):
            res = search(current, counter, cfg, rng, cur_val, state)
            if res is EXHAUSTED:
                break
            path = geodesic_path(current, res.frame, cfg.interp_steps)
            for fr in path[1:-1]:
                record(fr, False)
            record(res.frame, True, res.value)
            current, cur_val = res.frame, res.value
    except EvaluationError as exc:
        hist.metadata["error"] = str(exc)
        hist.metadata["n_evals"] = counter.count
        raise TourAborted(str(exc), hist) from exc
    hist.metadata["n_evals"] = counter.count
    hist.metadata["final_alpha"] = state.alpha
    return hist


def scout_then_refine(x, desc, cfg_scout: OptimizerConfig, cfg_refine: OptimizerConfig,
                      extra_indexes: Sequence = (), start: Frame | None = None) -> TourHistory:
    """Broad search with search_better, then geodesic refinement from its best anchor."""
    if cfg_scout.method != "better":
        raise InvalidParameter("scouting uses method 'better'")
    if cfg_refine.method != "geodesic":
        raise InvalidParameter("refinement uses method 'geodesic'")
    scout = guided_tour(x, desc, cfg_scout, extra_indexes, start=start, stage="scout")
    refine = guided_tour(x, desc, cfg_refine, extra_indexes, start=scout.final_frame, stage="refine")
    out = TourHistory(metadata={
        "primary": scout.metadata["primary"],
        "config": {"scout": asdict(cfg_scout), "refine": asdict(cfg_refine)},
        "data_fingerprint": scout.metadata["data_fingerprint"],
        "n_evals": scout.metadata["n_evals"] + refine.metadata["n_evals"],
        "scout_end": len(scout.frames) - 1,
    })
    out.extend(scout, skip_first=False)
    out.extend(refine, skip_first=True)
    return out


def pairwise_anchor_distances(hist: TourHistory) -> np.ndarray:
    fr = hist.anchor_frames
    return np.array([proj_dist(fr[i], fr[j]) for i in range(len(fr)) for j in range(i + 1, len(fr))])


def distances_to(hist: TourHistory, target: Frame, anchors_only: bool = True) -> np.ndarray:
    frames = hist.anchor_frames if anchors_only else hist.frames
    return np.array([proj_dist(f, target) for f in frames])


def with_method(cfg: OptimizerConfig, **kw) -> OptimizerConfig:
    return replace(cfg, **kw)
