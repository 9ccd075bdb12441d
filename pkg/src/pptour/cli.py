"""Batch command line: ``pptour <command> --config run.yaml``.

Commands and the ``diagnostics`` keys they read:

simulate   data.simulate -> data.csv
evaluate   diagnostics.frames (frames.csv path) or diagnostics.axes ([[i, j], ...], 1-based)
           -> traces.csv, frames.csv
trace      diagnostics.trace (nuisance | squint), steps, steps_per_leg -> traces.csv, frames.csv, trace.svg
optimize   optimizer (OptimizerConfig fields, or scout/refine sub-mappings),
           optimizer.verify {target: [i, j], max_dist} -> frames.csv, traces.csv, verify.json
diagnose   diagnostics.kind: percentile | rotation | timing | sweep | squint -> <kind>.csv
plot       diagnostics.input (traces.csv) -> plot.svg, or diagnostics.kind scatter with
           diagnostics.frame / diagnostics.columns -> scatter.svg

Every run writes manifest.json; a failed run also writes error.json.
Exit codes: 0 ok, 2 configuration error, 3 data error, 4 evaluation error.
"""
from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, RunConfig
from .diagnostics import (
    parameter_sweep,
    percentile_table,
    rotation_scan,
    squint_angle_estimate,
    timing_benchmark,
    trace_nuisance,
    trace_squint,
)
from .errors import ConfigError, PPTourError
from .geometry import DataMatrix, Frame, proj_dist, read_frames
from .indexes import bind, descriptor
from .io import load_csv, staged_output, write_csv, write_table
from .optimizer import OptimizerConfig, TourAborted, guided_tour, scout_then_refine, write_frames_csv
from .simdata import SimSpec, generate
from .svg import render_scatter_svg, render_trace_svg


def _opt_config(d: dict, seed: int) -> OptimizerConfig:
    known = {f.name for f in fields(OptimizerConfig)}
    extra = set(d) - known
    if extra:
        raise ConfigError(f"unknown optimizer key(s) {sorted(extra)}")
    d = {"seed": seed, **d}
    return OptimizerConfig(**d)


def load_data(cfg: RunConfig) -> DataMatrix:
    d = cfg.data
    if not d:
        raise ConfigError("this command needs a data section")
    if "simulate" in d:
        s = dict(d["simulate"])
        s.setdefault("seed", cfg.seed)
        try:
            return generate(SimSpec(**s))
        except TypeError as exc:
            raise ConfigError(f"bad simulate section: {exc}") from None
    return load_csv(d["csv"], d.get("drop", ()), d.get("scale", "none"))


def _pair_frame(p: int, pair) -> Frame:
    i, j = (int(v) for v in pair)
    if not (1 <= i <= p and 1 <= j <= p and i != j):
        raise ConfigError(f"column pair {pair} is out of range for p = {p}")
    return Frame.axes(p, i - 1, j - 1)


def _indexes(cfg: RunConfig, required: bool = True):
    if required and not cfg.indexes:
        raise ConfigError("this command needs at least one index")
    return [descriptor(ix) for ix in cfg.indexes]


def _write_trace_rows(path, frames, values: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("frame_id,index_name,value,eval_ms\n")
        for i in range(len(frames)):
            for k, v in values.items():
                fh.write(f"{i},{k},{v[i]!r},\n")


def cmd_simulate(cfg, out: Path) -> dict:
    x = load_data(cfg)
    write_csv(out / "data.csv", x)
    return {}


def cmd_evaluate(cfg, out: Path) -> dict:
    x = load_data(cfg)
    descs = _indexes(cfg)
    dg = cfg.diagnostics
    if "frames" in dg:
        frames = read_frames(dg["frames"])
    elif "axes" in dg:
        frames = [_pair_frame(x.p, pr) for pr in dg["axes"]]
    else:
        raise ConfigError("evaluate needs diagnostics.frames or diagnostics.axes")
    for f in frames:
        if f.p != x.p:
            raise ConfigError(f"frame dimension {f.p} does not match data p = {x.p}")
    vals = {}
    for d in descs:
        f = bind(d, x)
        vals[d.label] = [float(f(fr)) for fr in frames]
    write_frames_csv(out / "frames.csv", frames, (), ["evaluate"] * len(frames))
    _write_trace_rows(out / "traces.csv", frames, vals)
    return {}


def cmd_trace(cfg, out: Path) -> dict:
    x = load_data(cfg)
    descs = _indexes(cfg)
    dg = cfg.diagnostics
    kind = dg.get("trace", "nuisance")
    if kind == "nuisance":
        tr = trace_nuisance(x, descs, int(dg.get("steps", 41)))
    elif kind == "squint":
        tr = trace_squint(x, descs, int(dg.get("steps_per_leg", 30)))
    else:
        raise ConfigError(f"unknown trace {kind!r}")
    tr.write(out)
    if tr.invalid:
        write_table(out / "invalid.csv", [{"frame_id": i, "index_name": k, "message": m} for i, k, m in tr.invalid])
    (out / "trace.svg").write_text(render_trace_svg(out / "traces.csv", tr.leg_markers), encoding="utf-8")
    return {"fingerprint": tr.metadata["fingerprint"], "leg_markers": tr.leg_markers}


def cmd_optimize(cfg, out: Path, verify: bool = False) -> dict:
    x = load_data(cfg)
    descs = _indexes(cfg)
    oc = dict(cfg.optimizer)
    ver = oc.pop("verify", None)
    start = oc.pop("start", None)
    start_frame = _pair_frame(x.p, start) if start else None
    if "scout" in oc or "refine" in oc:
        sc = _opt_config({"method": "better", "cooling": 1.0, **oc.get("scout", {})}, cfg.seed)
        rf = _opt_config({"method": "geodesic", **oc.get("refine", {})}, cfg.seed + 1)
        hist = scout_then_refine(x, descs[0], sc, rf, descs[1:], start=start_frame)
    else:
        hist = guided_tour(x, descs[0], _opt_config(oc, cfg.seed), descs[1:], start=start_frame)
    hist.write(out)
    info = {"n_frames": len(hist.frames), "n_anchors": len(hist.anchors), "n_evals": hist.metadata["n_evals"]}
    if verify or ver is not None:
        ver = dict(ver or {})
        if "target" not in ver:
            ver["target"] = [x.p - 1, x.p]
        target = _pair_frame(x.p, ver["target"])
        dist = proj_dist(hist.final_frame, target)
        max_dist = float(ver.get("max_dist", 0.15))
        res = {"target": list(ver["target"]), "final_proj_dist": dist, "max_dist": max_dist,
               "passed": bool(dist <= max_dist)}
        (out / "verify.json").write_text(json.dumps(res, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"verify: proj_dist {dist:.4f} to span{tuple(ver['target'])} "
              f"{'PASS' if res['passed'] else 'FAIL'} (max {max_dist})")
        info["verify"] = res
    return info


def cmd_diagnose(cfg, out: Path) -> dict:
    dg = dict(cfg.diagnostics)
    kind = dg.get("kind")
    if kind == "percentile":
        tab = percentile_table(tuple(dg.get("families", ("pipe", "sine", "spiral"))),
                               _indexes(cfg, required=False) or None, int(dg.get("n", 1000)),
                               int(dg.get("n_reps", 100)), int(dg.get("p", 6)), cfg.seed)
        tab.write(out / "percentile.csv")
        return {"fingerprint": tab.metadata["fingerprint"]}
    if kind == "timing":
        rows = timing_benchmark(_indexes(cfg), [int(s) for s in dg.get("sizes", (100, 1000))],
                                int(dg.get("n_reps", 5)), cfg.seed)
        write_table(out / "timing.csv", rows, ["index", "n", "median_ms"])
        return {}
    x = load_data(cfg)
    descs = _indexes(cfg)
    if kind == "rotation":
        pair = dg.get("pair", [x.p - 1, x.p])
        y = x.values @ _pair_frame(x.p, pair).basis
        res = rotation_scan(y, descs, int(dg.get("n_angles", 36)))
        rows = [{k: res[k][i] for k in res} for i in range(len(res["angle"]))]
        write_table(out / "rotation.csv", rows, list(res))
        return {}
    if kind == "sweep":
        rows = parameter_sweep(x, descs[0], dg["param"], dg["values"],
                               structured_pair=[v - 1 for v in dg.get("pair", [x.p - 1, x.p])],
                               trace_steps=int(dg.get("steps", 41)))
        cols = ["value", "structured", "noise", "trace_masd"] + (["eval_ms"] if dg.get("timing") else [])
        write_table(out / "sweep.csv", rows, cols)
        return {}
    if kind == "squint":
        target = _pair_frame(x.p, dg.get("target", [x.p - 1, x.p]))
        res = squint_angle_estimate(x, descs[0], target, float(dg.get("threshold", 0.8)),
                                    int(dg.get("n_dirs", 20)), np.random.default_rng(cfg.seed))
        rows = [{"direction": k, "angle": a} for k, a in enumerate(res.angles)]
        write_table(out / "squint.csv", rows, ["direction", "angle"])
        write_table(out / "squint_summary.csv", [{"median": res.median, "q1": res.q1, "q3": res.q3,
                                                   "target_value": res.target_value}])
        return {}
    raise ConfigError(f"unknown diagnostic kind {kind!r}")


def cmd_plot(cfg, out: Path) -> dict:
    dg = cfg.diagnostics
    kind = dg.get("kind", "trace")
    if kind == "trace":
        if "input" not in dg:
            raise ConfigError("plot needs diagnostics.input (a traces.csv)")
        src = Path(dg["input"])
        if not src.is_file():
            raise ConfigError(f"no such traces file: {src}")
        svg = render_trace_svg(src, dg.get("markers", ()), {"title": dg.get("title")})
        (out / "plot.svg").write_text(svg, encoding="utf-8")
    elif kind == "scatter":
        x = load_data(cfg)
        if "frame" in dg:
            fr = read_frames(dg["frame"])[int(dg.get("frame_row", -1))]
        else:
            fr = _pair_frame(x.p, dg.get("columns", [1, 2]))
        opts = {k: dg[k] for k in ("radius", "opacity", "title") if k in dg}
        svg = render_scatter_svg(x.values @ fr.basis, {**opts, "frame": fr, "column_names": list(x.column_names)})
        (out / "scatter.svg").write_text(svg, encoding="utf-8")
    else:
        raise ConfigError(f"unknown plot kind {kind!r}")
    return {}


HANDLERS = {
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "trace": cmd_trace,
    "optimize": cmd_optimize,
    "diagnose": cmd_diagnose,
    "plot": cmd_plot,
}


def _versions() -> dict:
    import numba
    import scipy
    import yaml

    return {"pptour": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__, "pyyaml": yaml.__version__}


def _write_json(path: Path, obj) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    tmp.replace(path)


def run_command(cfg: RunConfig, verify: bool = False) -> int:
    """Run one configured command; returns the process exit status."""
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    status, info, err = 0, {}, None
    try:
        with staged_output(out) as tmp:
            if cfg.command == "optimize":
                info = cmd_optimize(cfg, tmp, verify)
            else:
                info = HANDLERS[cfg.command](cfg, tmp)
        (out / "error.json").unlink(missing_ok=True)
    except TourAborted as exc:
        # keep the partial history next to the error record
        exc.history.write(out)
        status, err = exc.exit_code, exc
    except PPTourError as exc:
        status, err = exc.exit_code, exc
    except Exception as exc:  # unexpected: still leave a machine-readable record
        status, err = 1, exc
    if err is not None:
        _write_json(out / "error.json", {"error": type(err).__name__, "message": str(err), "exit_code": status,
                                         "command": cfg.command})
        print(f"pptour {cfg.command}: {type(err).__name__}: {err}", file=sys.stderr)
    _write_json(out / "manifest.json", {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "versions": _versions(),
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "exit_code": status,
        "info": info,
    })
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pptour", description="Projection pursuit indexes, guided tours and diagnostics.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", "-c", help="YAML run configuration")
        sp.add_argument("--output", "-o", help="artifact directory (overrides config)")
        sp.add_argument("--seed", type=int, help="master seed (overrides config)")
        if name == "optimize":
            sp.add_argument("--verify", action="store_true",
                            help="report the final plane's distance to the known structured plane")
        if name == "plot":
            sp.add_argument("--input", help="traces.csv to plot (overrides config)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = RunConfig.load(args.config)
            if cfg.command != args.command:
                raise ConfigError(f"config is for {cfg.command!r}, not {args.command!r}")
        else:
            cfg = RunConfig(args.command)
        if args.output:
            cfg.output = args.output
        if args.seed is not None:
            cfg.seed = args.seed
        if getattr(args, "input", None):
            cfg.diagnostics = {**cfg.diagnostics, "input": args.input}
    except PPTourError as exc:
        print(f"pptour {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        out = Path(args.output or "out")
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "error.json", {"error": type(exc).__name__, "message": str(exc),
                                         "exit_code": exc.exit_code, "command": args.command})
        return exc.exit_code
    return run_command(cfg, getattr(args, "verify", False))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
