import numpy as np
import pytest

from dislosim.errors import ConfigError
from dislosim.grid import PeriodicCell
from dislosim.io import (read_curves, read_grid_snapshot, read_time_series,
                         write_curves, write_grid_snapshot, write_time_series)
from dislosim.measures import DislocationCurve, circle_loop


def test_curve_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    c1 = circle_loop(0.37, 17, rng.standard_normal(3), (0.25, -1.5, 0.0))
    c2 = DislocationCurve(rng.standard_normal((5, 3)),
                          np.array([0.0, 0.0, 1.0]), closed=False)
    path = tmp_path / "curves.txt"
    write_curves(path, [c1, c2])
    back = read_curves(path)
    assert len(back) == 2
    np.testing.assert_array_equal(back[0].vertices, c1.vertices)
    np.testing.assert_array_equal(back[0].burgers, c1.burgers)
    assert back[0].closed and not back[1].closed
    np.testing.assert_array_equal(back[1].vertices, c2.vertices)


def test_curve_bad_header_rejected(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("vertices 1 2 3\n0 0 0\n")
    with pytest.raises(ConfigError):
        read_curves(path)


def test_grid_snapshot_round_trip_bit_identical(tmp_path):
    cell = PeriodicCell((1.0, 2.0, 0.5), (16, 8, 12))
    rng = np.random.default_rng(2)
    field = rng.standard_normal(cell.shape)
    path = tmp_path / "snap.grid"
    write_grid_snapshot(path, cell, "eps_p", field)
    cell2, name, field2 = read_grid_snapshot(path)
    assert name == "eps_p"
    assert cell2.shape == cell.shape
    np.testing.assert_allclose(cell2.lengths, cell.lengths, rtol=1e-15)
    assert field2.tobytes() == field.tobytes()  # bit identical


def test_grid_snapshot_rewrite_identical_bytes(tmp_path):
    cell = PeriodicCell((1.0, 1.0, 1.0), (8, 8, 8))
    field = np.arange(512, dtype=float).reshape(cell.shape)
    p1, p2 = tmp_path / "a.grid", tmp_path / "b.grid"
    write_grid_snapshot(p1, cell, "f", field)
    write_grid_snapshot(p2, *read_grid_snapshot(p1))
    assert p1.read_bytes() == p2.read_bytes()


def test_grid_snapshot_bad_magic(tmp_path):
    path = tmp_path / "junk.grid"
    path.write_bytes(b"not-a-grid\n")
    with pytest.raises(ConfigError):
        read_grid_snapshot(path)


def test_grid_snapshot_truncated(tmp_path):
    cell = PeriodicCell((1.0, 1.0, 1.0), (8, 8, 8))
    path = tmp_path / "t.grid"
    write_grid_snapshot(path, cell, "f", np.zeros(cell.shape))
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    with pytest.raises(ConfigError):
        read_grid_snapshot(path)


def test_time_series_round_trip(tmp_path):
    rows = [(0.1 * k, np.pi * k, 1e-3 / (k + 1), 1e-12, 2.5) for k in range(5)]
    path = tmp_path / "series.csv"
    write_time_series(path, rows)
    back = read_time_series(path)
    assert back == [tuple(float(v) for v in r) for r in rows]


def test_time_series_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        read_time_series(path)
