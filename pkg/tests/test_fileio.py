"""Tests for raster persistence (CSV and binary PGM)."""

import numpy as np
import pytest

from smfdenoise.fileio import (
    load_raster,
    read_pgm16,
    read_raster_csv,
    write_pgm16,
    write_raster_csv,
)
from smfdenoise.lattice import Raster


class TestCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(50)
        r = Raster.from_2d(rng.standard_normal((4, 6)))
        path = tmp_path / "r.csv"
        write_raster_csv(path, r)
        back = read_raster_csv(path)
        assert (back.n1, back.n2) == (4, 6)
        np.testing.assert_allclose(back.data, r.data, rtol=1e-8)

    def test_comments_preserved_and_skipped(self, tmp_path):
        r = Raster.from_2d(np.eye(2))
        path = tmp_path / "r.csv"
        write_raster_csv(path, r, comments=["seed=3", "T=100"])
        text = path.read_text()
        assert text.startswith("# seed=3\n# T=100\n")
        np.testing.assert_array_equal(read_raster_csv(path).data, r.data)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2,3\n4,5\n")
        with pytest.raises(ValueError):
            read_raster_csv(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("# only a comment\n")
        with pytest.raises(ValueError):
            read_raster_csv(path)


class TestPgm:
    def test_round_trip_is_linear_map(self, tmp_path):
        x = np.array([[0.0, 0.5], [1.5, 2.0]])
        path = tmp_path / "r.pgm"
        write_pgm16(path, Raster.from_2d(x))
        back = read_pgm16(path).to_2d()
        # written values are (x - min) / (max - min) * 65535, rounded
        expected = np.round((x - x.min()) / (x.max() - x.min()) * 65535)
        np.testing.assert_array_equal(back, expected)

    def test_header_shape(self, tmp_path):
        path = tmp_path / "r.pgm"
        write_pgm16(path, Raster.from_2d(np.zeros((3, 5))))
        blob = path.read_bytes()
        assert blob.startswith(b"P5\n5 3\n65535\n")
        back = read_pgm16(path)
        assert (back.n1, back.n2) == (3, 5)

    def test_constant_raster_writes_zeros(self, tmp_path):
        path = tmp_path / "c.pgm"
        write_pgm16(path, Raster.from_2d(np.full((2, 2), 7.0)))
        np.testing.assert_array_equal(read_pgm16(path).data, 0.0)

    def test_eight_bit_pgm_accepted(self, tmp_path):
        path = tmp_path / "p8.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 10, 200, 255]))
        back = read_pgm16(path)
        np.testing.assert_array_equal(back.data, [0.0, 10.0, 200.0, 255.0])

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "t.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n\x00\x01")
        with pytest.raises(ValueError):
            read_pgm16(path)

    def test_not_pgm_rejected(self, tmp_path):
        path = tmp_path / "x.pgm"
        path.write_bytes(b"hello")
        with pytest.raises(ValueError):
            read_pgm16(path)


class TestLoadRaster:
    def test_dispatch_on_suffix(self, tmp_path):
        r = Raster.from_2d(np.arange(4.0).reshape(2, 2))
        csv_path = tmp_path / "a.csv"
        pgm_path = tmp_path / "a.pgm"
        write_raster_csv(csv_path, r)
        write_pgm16(pgm_path, r)
        assert load_raster(csv_path).n1 == 2
        assert load_raster(pgm_path).data.max() == 65535.0
