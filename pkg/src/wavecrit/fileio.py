"""Snapshot and table files, always written via a temporary file and rename.

Binary snapshot layout (all little-endian):

    offset 0   int32    d
    offset 4   int32    n
    offset 8   float64  L
    offset 16  float64  n**d values, row-major (C order)
"""

import csv
import io
import json
import os
import struct
import tempfile
from contextlib import contextmanager

import numpy as np

from .spectral import GridSpec, RealField

HEADER = struct.Struct("<iid")


@contextmanager
def atomic_open(path, mode="w", **kw):
    """Yield a handle on a sibling temp file; rename onto ``path`` only on success."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=folder)
    try:
        with os.fdopen(fd, mode, **kw) as fh:
            yield fh
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_snapshot(f: RealField) -> bytes:
    g = f.grid
    return HEADER.pack(g.d, g.n, float(g.L)) + np.ascontiguousarray(f.values, dtype="<f8").tobytes()


def decode_snapshot(blob: bytes) -> RealField:
    if len(blob) < HEADER.size:
        raise ValueError("snapshot shorter than its header")
    d, n, L = HEADER.unpack_from(blob)
    grid = GridSpec(d, n, L)
    payload = blob[HEADER.size:]
    expected = 8 * n ** d
    if len(payload) != expected:
        raise ValueError(f"snapshot payload has {len(payload)} bytes, expected {expected}")
    return RealField(grid, np.frombuffer(payload, dtype="<f8").reshape(grid.shape).astype(float))


def write_snapshot(path, f: RealField):
    with atomic_open(path, "wb") as fh:
        fh.write(encode_snapshot(f))


def read_snapshot(path) -> RealField:
    with open(path, "rb") as fh:
        return decode_snapshot(fh.read())


def field_to_csv(f: RealField) -> str:
    """One row per lattice point: index columns, coordinates, value."""
    g = f.grid
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"i{a}" for a in range(g.d)] + [f"x{a}" for a in range(g.d)] + ["value"])
    for idx in np.ndindex(*g.shape):
        w.writerow(list(idx) + [repr(i * g.dx) for i in idx] + [repr(float(f.values[idx]))])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path, header, rows):
    with atomic_open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def write_json(path, obj):
    with atomic_open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    return str(o)
