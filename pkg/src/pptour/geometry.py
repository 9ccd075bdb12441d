"""Projection planes: frames, projections, geodesics and plane distances.

A plane in p-space is represented by a p x 2 orthonormal basis (a
:class:`Frame`).  Only the column span matters for plane-level quantities
such as :func:`proj_dist`; the basis orientation matters for indexes that
are not rotation invariant.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegeneratePlane, ShapeError

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class DataMatrix:
    """n x p numeric table with column labels."""

    values: np.ndarray
    column_names: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise ShapeError(f"data must be 2-dimensional, got shape {v.shape}")
        n, p = v.shape
        if n < 3 or p < 2:
            raise ShapeError(f"need n >= 3 and p >= 2, got {n} x {p}")
        if not np.all(np.isfinite(v)):
            raise ShapeError("data contains non-finite entries")
        names = tuple(self.column_names) or tuple(f"x{j + 1}" for j in range(p))
        if len(names) != p:
            raise ShapeError(f"{len(names)} column names for {p} columns")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def columns(self, i: int, j: int) -> np.ndarray:
        """Return the n x 2 array of 0-based columns ``i`` and ``j``."""
        return self.values[:, [i, j]]


@dataclass(frozen=True)
class Frame:
    """p x 2 orthonormal basis of a projection plane."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 2:
            raise ShapeError(f"frame basis must be p x 2, got {b.shape}")
        gram = b.T @ b
        if np.max(np.abs(gram - np.eye(2))) > ORTHO_TOL:
            raise DegeneratePlane("frame columns are not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def p(self) -> int:
        return self.basis.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    @classmethod
    def axes(cls, p: int, i: int, j: int) -> "Frame":
        """Frame spanned by the 0-based coordinate axes ``i`` and ``j``."""
        b = np.zeros((p, 2))
        b[i, 0] = 1.0
        b[j, 1] = 1.0
        return cls(b)


@dataclass(frozen=True)
class ProjectedData:
    values: np.ndarray
    frame: Frame | None = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ShapeError(f"projected data must be n x 2, got {v.shape}")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.shape[0]


def as_xy(y) -> np.ndarray:
    """Accept ProjectedData or any n x 2 array-like and return a float array."""
    v = np.asarray(getattr(y, "values", y), dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise ShapeError(f"expected n x 2 projection, got shape {v.shape}")
    return v


def _polar(b: np.ndarray) -> np.ndarray:
    # nearest orthonormal matrix; leaves an already orthonormal basis unchanged
    u, _, vt = np.linalg.svd(b, full_matrices=False)
    return u @ vt


def orthonormalize(m) -> Frame:
    """Gram-Schmidt on the two columns of ``m``."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[1] != 2:
        raise ShapeError(f"expected p x 2 matrix, got {m.shape}")
    a, b = m[:, 0], m[:, 1]
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise DegeneratePlane("zero column")
    q1 = a / na
    v = b - (q1 @ b) * q1
    v = v - (q1 @ v) * q1
    nv = np.linalg.norm(v)
    if nv <= 1e-12 * nb:
        raise DegeneratePlane("columns are linearly dependent")
    return Frame(np.column_stack([q1, v / nv]))


def project(x: DataMatrix, f: Frame) -> ProjectedData:
    xv = getattr(x, "values", x)
    if xv.shape[1] != f.p:
        raise ShapeError(f"data has p={xv.shape[1]}, frame has p={f.p}")
    return ProjectedData(xv @ f.basis, f)


def _check_same_p(fa: Frame, fb: Frame):
    if fa.p != fb.p:
        raise ShapeError(f"frames live in different dimensions ({fa.p} vs {fb.p})")


def proj_dist(fa: Frame, fb: Frame) -> float:
    """Frobenius norm of the difference of the two orthogonal projectors."""
    _check_same_p(fa, fb)
    return float(np.linalg.norm(fa.projector - fb.projector))


def principal_angles(fa: Frame, fb: Frame) -> np.ndarray:
    """Principal angles between the two planes, ascending."""
    _check_same_p(fa, fb)
    a, b = fa.basis, fb.basis
    s = np.linalg.svd(a.T @ b, compute_uv=False)
    # sine-based angles are accurate for nearly identical planes
    resid = b - a @ (a.T @ b)
    s_perp = np.linalg.svd(resid, compute_uv=False)
    cos_angles = np.arccos(np.clip(s, -1.0, 1.0))
    sin_angles = np.arcsin(np.clip(np.sort(s_perp), 0.0, 1.0))
    return np.where(cos_angles < np.pi / 4, sin_angles, cos_angles)


def _geodesic_parts(fa: Frame, fb: Frame):
    a, b = fa.basis, fb.basis
    u, s, vt = np.linalg.svd(a.T @ b)
    a_al = a @ u
    b_al = b @ vt.T
    theta = np.arccos(np.clip(s, -1.0, 1.0))
    g = np.zeros_like(a_al)
    for k in range(2):
        w = b_al[:, k] - a_al @ (a_al.T @ b_al[:, k])
        nw = np.linalg.norm(w)
        if nw > 1e-12:
            g[:, k] = w / nw
            theta[k] = np.arctan2(nw, a_al[:, k] @ b_al[:, k])
        else:
            theta[k] = 0.0
    return a_al, g, theta, u


def geodesic_path(fa: Frame, fb: Frame, n_steps: int) -> list[Frame]:
    """Frames at equal angular increments along the geodesic from fa to fb.

    Matched principal directions rotate through their principal angles; the
    result is expressed in fa's basis orientation (no within-plane spin), so
    ``path[0]`` equals ``fa`` exactly.
    """
    _check_same_p(fa, fb)
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    if n_steps == 1:
        return [fa]
    a_al, g, theta, u = _geodesic_parts(fa, fb)
    frames = [fa]
    for s in np.linspace(0.0, 1.0, n_steps)[1:]:
        b = (a_al * np.cos(s * theta) + g * np.sin(s * theta)) @ u.T
        frames.append(Frame(_polar(b)))
    return frames


def tangent_direction(f: Frame, z) -> np.ndarray:
    """Project a p x 2 matrix onto the tangent space at ``f``, unit Frobenius norm."""
    z = np.asarray(z, dtype=float)
    h = z - f.basis @ (f.basis.T @ z)
    nh = np.linalg.norm(h)
    if nh == 0:
        raise DegeneratePlane("direction is tangent-free")
    return h / nh


def geodesic_step(f: Frame, h: np.ndarray, t: float) -> Frame:
    """Move ``f`` by arc length ``t`` along the geodesic with unit tangent ``h``.

    The basis is transported without within-plane spin, so composing two
    steps along the same tangent gives the same frame as one longer step.
    """
    u, s, vt = np.linalg.svd(h, full_matrices=False)
    b = (f.basis @ vt.T) * np.cos(s * t) + u * np.sin(s * t)
    return Frame(_polar(b @ vt))


def rotate_in_plane(f: Frame, angle: float) -> Frame:
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, s], [-s, c]])
    return Frame(_polar(f.basis @ rot))


def random_frame(p: int, rng: np.random.Generator) -> Frame:
    if p < 2:
        raise ShapeError("p must be at least 2")
    while True:
        try:
            return orthonormalize(rng.standard_normal((p, 2)))
        except DegeneratePlane:  # pragma: no cover - probability zero
            continue


def write_frame_csv(f: Frame, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["col1", "col2"])
        for row in f.basis:
            w.writerow([repr(float(v)) for v in row])


def read_frame_csv(path) -> Frame:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    body = rows[1:] if rows and not _is_number(rows[0][0]) else rows
    return Frame(np.array([[float(v) for v in r] for r in body]))


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def frames_from_axes(p: int, pairs: Sequence[tuple[int, int]]) -> list[Frame]:
    return [Frame.axes(p, i, j) for i, j in pairs]


def frame_from_stored(b) -> Frame:
    """Frame from a stored basis: kept bit-exact when already orthonormal,
    otherwise snapped to the nearest orthonormal basis."""
    b = np.asarray(b, dtype=float)
    try:
        return Frame(b)
    except DegeneratePlane:
        return Frame(_polar(b))


def read_frames(path: str | Path) -> list[Frame]:
    """Read every frame stored in a TourHistory-style frames.csv."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    frames = []
    for r in rows:
        keys = [k for k in r if k.startswith("b") and k[1:].isdigit()]
        p = len(keys) // 2
        vals = np.array([float(r[f"b{i + 1}{j + 1}"]) for i in range(p) for j in range(2)])
        frames.append(frame_from_stored(vals.reshape(p, 2)))
    return frames
