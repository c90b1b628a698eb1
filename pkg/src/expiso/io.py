"""File formats: GridSet raster with JSON sidecar, CSV tables, JSON reports.

GridSet raster (all integers little-endian)::

    offset  size   field
    0       4      magic b"EXPG"
    4       2      version, uint16 (= 1)
    6       1      n, uint8
    7       1      flags, uint8: bit 0 includes_tail, bit 1 fill
    8       8      delta, float64
    16      8      x_max, float64
    24      4      cells per axis N, uint32
    28      4n     window origin, n x uint32
    28+4n   4n     window shape, n x uint32
    28+8n   ...    window occupancy, numpy.packbits of the C-order
                   boolean block (big bit order, zero padded to a byte)

Cells outside the window take the ``fill`` value.  The sidecar
``<path>.json`` repeats every header field under the same names.
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .grid import GridSet, GridSpec

MAGIC = b"EXPG"
VERSION = 1
_HEAD = struct.Struct("<4sHBBddI")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def header_fields(A: GridSet) -> dict:
    return {
        "format": "EXPG",
        "version": VERSION,
        "n": A.n,
        "delta": float(A.spec.delta),
        "x_max": float(A.spec.x_max),
        "cells": A.spec.cells,
        "includes_tail": A.includes_tail,
        "fill": A.fill,
        "origin": list(A.origin),
        "shape": list(A.block.shape),
    }


def write_gridset(A: GridSet, path) -> Path:
    path = Path(path)
    flags = (1 if A.includes_tail else 0) | (2 if A.fill else 0)
    head = _HEAD.pack(MAGIC, VERSION, A.n, flags, A.spec.delta, A.spec.x_max, A.spec.cells)
    dims = struct.pack(f"<{2 * A.n}I", *A.origin, *A.block.shape)
    body = np.packbits(A.block.ravel(order="C")).tobytes()
    path.write_bytes(head + dims + body)
    sidecar_path(path).write_text(json.dumps(header_fields(A), indent=2, sort_keys=True) + "\n")
    return path


def read_gridset(path) -> GridSet:
    data = Path(path).read_bytes()
    if len(data) < _HEAD.size:
        raise ValueError("file too short for a GridSet header")
    magic, version, n, flags, delta, x_max, cells = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError("not a GridSet raster (bad magic)")
    if version != VERSION:
        raise ValueError(f"unsupported GridSet version {version}")
    offset = _HEAD.size
    if len(data) < offset + 8 * n:
        raise ValueError("file too short for the window header")
    dims = struct.unpack_from(f"<{2 * n}I", data, offset)
    offset += 8 * n
    origin, shape = tuple(dims[:n]), tuple(dims[n:])
    spec = GridSpec(n, delta, x_max)
    if spec.cells != cells:
        raise ValueError("cell count does not match delta and x_max")
    count = int(np.prod(shape)) if shape else 0
    if len(data) - offset != (count + 7) // 8:
        raise ValueError("occupancy body has the wrong length")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8, offset=offset), count=count)
    block = bits.astype(bool).reshape(shape)
    return GridSet(spec, origin, block, fill=bool(flags & 2), includes_tail=bool(flags & 1))


def write_csv(rows, path, columns) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        write_csv_stream(rows, fh, columns)
    return path


def write_csv_stream(rows, stream, columns):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def profile_rows(profile) -> list[dict]:
    """``(t, f)`` rows of a diagonal profile."""
    return [{"t": float(t), "f": float(f)} for t, f in zip(profile.t_grid, profile.lengths)]


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
