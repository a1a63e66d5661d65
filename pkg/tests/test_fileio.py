import struct

import numpy as np
import pytest

from wavecrit import fileio
from wavecrit import spectral as sp
from wavecrit.spectral import GridSpec


def test_snapshot_roundtrip(tmp_path, rng):
    g = GridSpec(3, 8, 5.0)
    f = sp.random_field(g, rng)
    path = tmp_path / "snap.bin"
    fileio.write_snapshot(path, f)
    back = fileio.read_snapshot(path)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)


def test_snapshot_layout(rng):
    g = GridSpec(2, 4, 3.5)
    f = sp.random_field(g, rng)
    blob = fileio.encode_snapshot(f)
    assert struct.unpack_from("<iid", blob) == (2, 4, 3.5)
    assert len(blob) == 16 + 8 * 16
    data = np.frombuffer(blob[16:], dtype="<f8").reshape(4, 4)
    assert data[1, 2] == f.values[1, 2]
    with pytest.raises(ValueError):
        fileio.decode_snapshot(blob[:-8])
    with pytest.raises(ValueError):
        fileio.decode_snapshot(blob[:10])


def test_atomic_write_leaves_nothing_on_error(tmp_path):
    target = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        with fileio.atomic_open(target) as fh:
            fh.write("partial")
            raise RuntimeError("boom")
    assert list(tmp_path.iterdir()) == []


def test_atomic_write_keeps_old_file_on_error(tmp_path):
    target = tmp_path / "out.json"
    fileio.write_json(target, {"a": 1})
    with pytest.raises(TypeError):
        fileio.write_json(target, {"a": 1, 2: object(), "b": {1, 2}, None: 1})
    assert target.read_text().strip().startswith("{")
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_csv_roundtrip_is_exact(tmp_path):
    path = tmp_path / "t.csv"
    fileio.write_csv(path, ["k", "v"], [[0, 0.1], [1, 1 / 3]])
    header, rows = fileio.read_csv(path)
    assert header == ["k", "v"]
    assert float(rows[1][1]) == 1 / 3


def test_field_csv_rows():
    g = GridSpec(1, 4, 2.0)
    text = fileio.field_to_csv(sp.plane_mode(g, (1,)))
    lines = text.strip().split("\n")
    assert lines[0] == "i0,x0,value"
    assert len(lines) == 5
