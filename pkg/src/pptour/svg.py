"""Deterministic SVG rendering of index traces and 2-D scatterplots.

Coordinates are written with two decimals, so identical input gives
identical bytes.  Layout constants are module-level so tests can recompute
element positions.
"""
from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyTrace, ShapeError
from .geometry import as_xy

WIDTH, HEIGHT = 640.0, 400.0
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 50.0, 140.0, 20.0, 40.0
PALETTE = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")

SCATTER_SIZE = 400.0
SCATTER_MARGIN = 40.0
DEFAULT_RADIUS = 2.0
DEFAULT_OPACITY = 0.5


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def read_traces(path) -> tuple[dict, list]:
    """Series per index name and anchor frame ids (from a sibling frames.csv)."""
    path = Path(path)
    series: dict[str, dict[int, float]] = {}
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            series.setdefault(r["index_name"], {})[int(r["frame_id"])] = float(r["value"])
    anchors = []
    frames = path.with_name("frames.csv")
    if frames.exists():
        with open(frames, newline="") as fh:
            anchors = [int(r["frame_id"]) for r in csv.DictReader(fh) if r.get("anchor") == "1"]
    return series, anchors


def trace_x(frame: float, n_frames: int) -> float:
    span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    return MARGIN_LEFT + (span * frame / (n_frames - 1) if n_frames > 1 else span / 2)


def trace_y(value: float) -> float:
    span = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    return MARGIN_TOP + span * (1.0 - float(np.clip(value, 0.0, 1.0)))


def render_trace_svg(traces, markers=(), options: dict | None = None) -> str:
    """Index values against frame index, y fixed to [0, 1].

    ``traces`` is a traces.csv path or a ``{name: {frame_id: value}}`` mapping.
    ``markers`` are frame ids drawn as vertical lines; when reading from a
    path the anchors of a sibling frames.csv are used unless markers are given.
    """
    opts = dict(options or {})
    if isinstance(traces, (str, Path)):
        series, anchors = read_traces(traces)
        markers = list(markers) or anchors
    else:
        series = {k: dict(v) for k, v in traces.items()}
    if not series or not any(series.values()):
        raise EmptyTrace("no trace values to plot")
    n_frames = max(max(v) for v in series.values() if v) + 1
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(WIDTH)}" height="{_f(HEIGHT)}" '
        f'viewBox="0 0 {_f(WIDTH)} {_f(HEIGHT)}">',
        f'<rect x="0" y="0" width="{_f(WIDTH)}" height="{_f(HEIGHT)}" fill="white"/>',
    ]
    x0, x1 = trace_x(0, n_frames), trace_x(n_frames - 1, n_frames)
    y0, y1 = trace_y(0.0), trace_y(1.0)
    out.append(f'<g class="axes" stroke="black" stroke-width="1">'
               f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y0)}"/>'
               f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0)}" y2="{_f(y1)}"/></g>')
    for v in (0.0, 0.5, 1.0):
        out.append(f'<text class="ytick" x="{_f(x0 - 6)}" y="{_f(trace_y(v) + 4)}" '
                   f'font-size="11" text-anchor="end">{v:.1f}</text>')
    out.append(f'<text class="xlabel" x="{_f((x0 + x1) / 2)}" y="{_f(HEIGHT - 8)}" font-size="12" '
               f'text-anchor="middle">{escape(str(opts.get("xlabel", "frame")))}</text>')
    for m in markers:
        xm = trace_x(m, n_frames)
        out.append(f'<line class="marker" x1="{_f(xm)}" y1="{_f(y0)}" x2="{_f(xm)}" y2="{_f(y1)}" '
                   f'stroke="#3b6fd4" stroke-width="1" stroke-dasharray="3,3"/>')
    for k, (name, vals) in enumerate(series.items()):
        col = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_f(trace_x(i, n_frames))},{_f(trace_y(vals[i]))}" for i in sorted(vals))
        out.append(f'<polyline class="series" data-index="{escape(name)}" fill="none" stroke="{col}" '
                   f'stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN_TOP + 10 + 16 * k
        lx = WIDTH - MARGIN_RIGHT + 12
        out.append(f'<line class="legend-key" x1="{_f(lx)}" y1="{_f(ly)}" x2="{_f(lx + 18)}" y2="{_f(ly)}" '
                   f'stroke="{col}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{_f(lx + 24)}" y="{_f(ly + 4)}" font-size="11">{escape(name)}</text>')
    if opts.get("title"):
        out.append(f'<text class="title" x="{_f(WIDTH / 2)}" y="14" font-size="13" '
                   f'text-anchor="middle">{escape(str(opts["title"]))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def scatter_limits(v: np.ndarray) -> tuple[float, float, float, float]:
    """Square data window centred on the data, 5% padding."""
    lo, hi = v.min(axis=0), v.max(axis=0)
    c = (lo + hi) / 2
    half = max(float(np.max(hi - lo)) / 2 * 1.05, 1e-12)
    return c[0] - half, c[0] + half, c[1] - half, c[1] + half


def scatter_xy(v: np.ndarray, limits) -> np.ndarray:
    xlo, xhi, ylo, yhi = limits
    side = SCATTER_SIZE - 2 * SCATTER_MARGIN
    px = SCATTER_MARGIN + side * (v[:, 0] - xlo) / (xhi - xlo)
    py = SCATTER_MARGIN + side * (1.0 - (v[:, 1] - ylo) / (yhi - ylo))
    return np.column_stack([px, py])


def loading_label(weights, names, top: int = 3) -> str:
    """The largest absolute loadings of one frame column, e.g. 'x5 0.71, x6 -0.70'."""
    w = np.asarray(weights, dtype=float)
    order = np.argsort(-np.abs(w), kind="stable")[:top]
    return ", ".join(f"{names[j]} {w[j]:.2f}" for j in order)


def render_scatter_svg(y, options: dict | None = None) -> str:
    """Scatterplot of a 2-column projection.

    options: radius, opacity, xlabel, ylabel, limits, frame + column_names
    (axis labels built from the frame's loadings), title.
    """
    opts = dict(options or {})
    v = as_xy(y)
    if not np.all(np.isfinite(v)):
        raise ShapeError("scatter input must be finite")
    if len(v) == 0:
        raise EmptyTrace("no points to plot")
    r = float(opts.get("radius", DEFAULT_RADIUS))
    alpha = float(opts.get("opacity", DEFAULT_OPACITY))
    limits = opts.get("limits") or scatter_limits(v)
    xlab, ylab = opts.get("xlabel", "P1"), opts.get("ylabel", "P2")
    if opts.get("frame") is not None:
        b = np.asarray(getattr(opts["frame"], "basis", opts["frame"]), dtype=float)
        names = opts.get("column_names") or [f"x{j + 1}" for j in range(b.shape[0])]
        xlab, ylab = loading_label(b[:, 0], names), loading_label(b[:, 1], names)
    pix = scatter_xy(v, limits)
    s = SCATTER_SIZE
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(s)}" height="{_f(s)}" viewBox="0 0 {_f(s)} {_f(s)}">',
        f'<rect x="0" y="0" width="{_f(s)}" height="{_f(s)}" fill="white"/>',
        f'<rect class="frame" x="{_f(SCATTER_MARGIN)}" y="{_f(SCATTER_MARGIN)}" '
        f'width="{_f(s - 2 * SCATTER_MARGIN)}" height="{_f(s - 2 * SCATTER_MARGIN)}" fill="none" stroke="black"/>',
        f'<g class="points" fill="black" fill-opacity="{alpha:.3f}">',
    ]
    out.extend(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="{_f(r)}"/>' for px, py in pix)
    out.append("</g>")
    out.append(f'<text class="xlabel" x="{_f(s / 2)}" y="{_f(s - 12)}" font-size="11" '
               f'text-anchor="middle">{escape(str(xlab))}</text>')
    out.append(f'<text class="ylabel" x="14" y="{_f(s / 2)}" font-size="11" text-anchor="middle" '
               f'transform="rotate(-90 14 {_f(s / 2)})">{escape(str(ylab))}</text>')
    if opts.get("title"):
        out.append(f'<text class="title" x="{_f(s / 2)}" y="20" font-size="13" '
                   f'text-anchor="middle">{escape(str(opts["title"]))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
