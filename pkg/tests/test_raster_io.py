import json

import numpy as np
import pytest

from raf.io import atomic_write_text, read_points, write_json, write_points
from raf.raster import RasterGrid, raster_accumulate, read_pgm16


def test_empty_raster():
    g = raster_accumulate(np.zeros(0, complex), (-1, 1, -1, 1), 8)
    assert g.counts.shape == (8, 8) and g.counts.sum() == 0
    assert read_pgm16_bytes(g.to_pgm16()).max() == 0


def read_pgm16_bytes(b):
    parts = b.split(maxsplit=4)
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], ">u2").reshape(h, w)


def test_pixel_orientation():
    # row 0 is the top; columns run left to right
    g = raster_accumulate(np.array([-0.9 + 0.9j, 0.9 - 0.9j]), (-1, 1, -1, 1), 4)
    assert g.counts[0, 0] == 1 and g.counts[3, 3] == 1 and g.counts.sum() == 2


def test_outside_points_dropped():
    g = raster_accumulate(np.array([0.0, 5.0, 1.0 + 0j]), (-1, 1, -1, 1), 4)
    assert g.counts.sum() == 1  # the right edge is open


def test_rectangular_resolution():
    g = raster_accumulate(np.array([0.1 + 0.1j]), (0, 2, 0, 1), (20, 10))
    assert g.shape == (10, 20)


def test_resolution_cap():
    with pytest.raises(ValueError):
        raster_accumulate(np.zeros(1, complex), (0, 1, 0, 1), (1 << 14) + 1)


def test_merge_is_addition(rng):
    p = rng.normal(size=500) + 1j * rng.normal(size=500)
    w = (-2, 2, -2, 2)
    whole = raster_accumulate(p, w, 16)
    parts = raster_accumulate(p[:200], w, 16) + raster_accumulate(p[200:], w, 16)
    assert np.array_equal(whole.counts, parts.counts) and parts.samples == 2
    with pytest.raises(ValueError):
        whole + raster_accumulate(p, w, 8)


def test_pgm_round_trip(tmp_path, rng):
    p = rng.uniform(-3, 3, size=1000) + 1j * rng.uniform(-3, 3, size=1000)
    g = raster_accumulate(p, (-3, 3, -3, 3), (33, 17))
    path = tmp_path / "r.pgm"
    g.write(path)
    img = read_pgm16(path)
    assert img.shape == (17, 33)
    assert img.max() == 65535
    assert np.array_equal(img == 0, g.counts == 0)
    # log scale is monotone in the counts
    order = np.argsort(g.counts.ravel(), kind="stable")
    assert np.all(np.diff(img.ravel()[order].astype(int)) >= 0)
    side = json.loads((tmp_path / "r.pgm.json").read_text())
    assert side["width"] == 33 and side["height"] == 17 and side["total_hits"] == 1000


def test_points_round_trip(tmp_path, rng):
    p = rng.normal(size=77) + 1j * rng.normal(size=77)
    write_points(tmp_path / "p.bin", p, {"n": 3})
    q = read_points(tmp_path / "p.bin")
    assert np.array_equal(p, q)
    assert (tmp_path / "p.bin").stat().st_size == 77 * 16
    meta = json.loads((tmp_path / "p.bin.json").read_text())
    assert meta["count"] == 77 and meta["n"] == 3


def test_atomic_write_leaves_no_temp(tmp_path):
    atomic_write_text(tmp_path / "a.txt", "x")
    write_json(tmp_path / "b.json", {"k": 1})
    assert sorted(f.name for f in tmp_path.iterdir()) == ["a.txt", "b.json"]


def test_atomic_write_failure_keeps_old(tmp_path):
    target = tmp_path / "a.json"
    write_json(target, {"v": 1})
    with pytest.raises(TypeError):
        write_json(target, {"v": object()})
    assert json.loads(target.read_text()) == {"v": 1}
    assert sorted(f.name for f in tmp_path.iterdir()) == ["a.json"]


def test_raster_grid_mean():
    g = RasterGrid.empty((0, 1, 0, 1), 2)
    g.add([0.25 + 0.25j], samples=2)
    assert g.mean()[1, 0] == 0.5
