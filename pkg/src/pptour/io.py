"""CSV ingestion and numeric table output."""
from __future__ import annotations

import csv
import os
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .geometry import DataMatrix
from .simdata import minmax_scale, sphere_pca, standardize

SCALE_MODES = ("none", "standardize", "minmax", "sphere")


def parse_scale_mode(mode: str) -> tuple[str, int | None]:
    """'none' | 'standardize' | 'minmax' | 'sphere' | 'sphere:k'."""
    mode = (mode or "none").strip()
    name, _, arg = mode.partition(":")
    if name not in SCALE_MODES:
        raise ConfigError(f"unknown scale mode {mode!r}")
    if arg and name != "sphere":
        raise ConfigError(f"scale mode {name!r} takes no argument")
    k = None
    if arg:
        try:
            k = int(arg)
        except ValueError:
            raise ConfigError(f"sphere component count must be an integer, got {arg!r}") from None
    return name, k


def apply_scale(x: DataMatrix, mode: str) -> DataMatrix:
    name, k = parse_scale_mode(mode)
    if name == "none":
        return x
    if name == "standardize":
        return standardize(x)
    if name == "minmax":
        return minmax_scale(x)
    return sphere_pca(x, k)


def load_csv(path, drop_columns=(), scale_mode: str = "none") -> DataMatrix:
    """Read a headed numeric CSV, drop named columns, then scale.

    Empty cells are rejected rather than imputed.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    drop = list(drop_columns or ())
    unknown = [c for c in drop if c not in header]
    if unknown:
        raise DataError(f"unknown column(s) {unknown} in {path}")
    keep = [j for j, h in enumerate(header) if h not in drop]
    body = [r for r in rows[1:] if r]
    vals = np.empty((len(body), len(keep)))
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise DataError(f"row {i + 2} has {len(r)} fields, expected {len(header)}")
        for jj, j in enumerate(keep):
            cell = r[j].strip()
            try:
                vals[i, jj] = float(cell)
            except ValueError:
                raise DataError(f"non-numeric cell {cell!r} at row {i + 2}, column {header[j]!r}") from None
            if not np.isfinite(vals[i, jj]):
                raise DataError(f"non-finite cell {cell!r} at row {i + 2}, column {header[j]!r}")
    x = DataMatrix(vals, tuple(header[j] for j in keep))
    return apply_scale(x, scale_mode)


def write_csv(path, x: DataMatrix) -> None:
    """Write a DataMatrix with a header row; doubles are written round-trip exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(x.column_names)
        for row in x.values:
            w.writerow([repr(float(v)) for v in row])


def write_table(path, rows: list[dict], columns: list[str] | None = None) -> None:
    """Rows of dicts as CSV in a fixed column order; floats via repr."""
    columns = columns or (list(rows[0]) if rows else [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c, "")) for c in columns])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


@contextmanager
def staged_output(directory):
    """Yield a scratch directory; on success move its files into ``directory``.

    Files are moved one by one with an atomic rename, so a reader never sees a
    half-written artifact.  On failure the scratch directory is discarded.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    try:
        yield tmp
        for src in sorted(tmp.rglob("*")):
            if src.is_file():
                dst = out / src.relative_to(tmp)
                dst.parent.mkdir(parents=True, exist_ok=True)
                os.replace(src, dst)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
