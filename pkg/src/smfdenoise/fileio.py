"""Raster persistence: plain-text CSV and 16-bit big-endian binary PGM.

CSV rasters are one lattice row per line, '.' decimal separator, values
formatted to 9 significant digits; lines starting with '#' carry the
configuration echo and are ignored on read.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .lattice import Raster

__all__ = [
    "write_raster_csv",
    "read_raster_csv",
    "write_pgm16",
    "read_pgm16",
    "load_raster",
]

PGM_MAXVAL = 65535


def write_raster_csv(path, raster: Raster, comments: list[str] | None = None):
    path = Path(path)
    lines = []
    for c in comments or []:
        lines.append(f"# {c}")
    for row in raster.to_2d():
        lines.append(",".join(format(v, ".9g") for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_raster_csv(path) -> Raster:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged rows, widths {sorted(widths)}")
    return Raster.from_2d(np.array(rows))


def write_pgm16(path, raster: Raster):
    """Binary PGM, maxval 65535, big-endian, intensities mapped from [min, max]."""
    x = raster.to_2d()
    lo = x.min()
    hi = x.max()
    if hi > lo:
        q = np.round((x - lo) / (hi - lo) * PGM_MAXVAL).astype(">u2")
    else:
        q = np.zeros_like(x, dtype=">u2")
    header = f"P5\n{raster.n2} {raster.n1}\n{PGM_MAXVAL}\n".encode("ascii")
    Path(path).write_bytes(header + q.tobytes())


def read_pgm16(path) -> Raster:
    """Read a binary PGM (8- or 16-bit); returns raw sample values as floats."""
    blob = Path(path).read_bytes()
    m = re.match(rb"P5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(\d+)\s+(\d+)\s", blob)
    if not m:
        raise ValueError(f"{path}: not a binary PGM")
    n2, n1, maxval = (int(g) for g in m.groups())
    data = blob[m.end():]
    dtype = ">u2" if maxval > 255 else "u1"
    arr = np.frombuffer(data, dtype=dtype, count=n1 * n2)
    if arr.size != n1 * n2:
        raise ValueError(f"{path}: truncated pixel data")
    return Raster(n1, n2, arr.astype(np.float64))


def load_raster(path) -> Raster:
    """Dispatch on file suffix: .pgm is binary graymap, anything else CSV."""
    if str(path).lower().endswith(".pgm"):
        return read_pgm16(path)
    return read_raster_csv(path)
