"""Binary field snapshots and CSV series.

Snapshot layout (all little-endian):

    8 bytes  magic b"DYSNAP01"
    u32      format version (1)
    u32 nx, u32 ny
    f64 Lx, f64 Ly, f64 t
    nx*ny    (re, im) float64 pairs, x index slowest (array[ix, iy] in C order)

A line field is stored with ny = 1 and Ly as carried by its grid.
"""

from __future__ import annotations

import csv
import io
import math
import os
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .spectral import FieldState, make_grid, make_grid_1d

MAGIC = b"DYSNAP01"
VERSION = 1
_HEADER = struct.Struct("<IIIddd")


class SnapshotError(ValueError):
    """Malformed or incompatible snapshot file."""


def encode_snapshot(state: FieldState) -> bytes:
    state = state.physical()
    g = state.grid
    header = MAGIC + _HEADER.pack(VERSION, g.nx, g.ny, g.Lx, g.Ly, float(state.time))
    return header + np.ascontiguousarray(state.values, dtype="<c16").tobytes()


def decode_snapshot(data: bytes) -> FieldState:
    if len(data) < len(MAGIC) + _HEADER.size:
        raise SnapshotError("file too short for a snapshot header")
    if data[:len(MAGIC)] != MAGIC:
        raise SnapshotError("not a snapshot file (bad magic)")
    version, nx, ny, Lx, Ly, t = _HEADER.unpack_from(data, len(MAGIC))
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version} (reader knows {VERSION})")
    start = len(MAGIC) + _HEADER.size
    expected = nx * ny * 16
    if len(data) - start != expected:
        raise SnapshotError(f"payload has {len(data) - start} bytes, expected {expected}")
    grid = make_grid_1d(nx, Lx) if ny == 1 else make_grid(nx, ny, Lx, Ly)
    values = np.frombuffer(data, dtype="<c16", offset=start).reshape(nx, ny).astype(complex)
    return FieldState(grid, values, "physical", t)


def write_snapshot(state: FieldState, path) -> None:
    Path(path).write_bytes(encode_snapshot(state))


def read_snapshot(path) -> FieldState:
    return decode_snapshot(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# CSV


def format_value(v) -> str:
    """Locale-free text for one CSV cell; floats use the shortest round-trip form."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    Path(path).write_text(csv_text(header, rows), encoding="utf-8", newline="")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="")
    os.replace(tmp, path)
