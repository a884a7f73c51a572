import numpy as np
import pandas as pd
import pytest

from imfid.errors import DataFileError
from imfid.im_core import contour_grid
from imfid.io import read_data, read_roulette, write_contour, write_sidecar
from imfid.models import GaussianLocation


class TestReadData:
    def test_roulette_in_radians(self):
        x = read_roulette()
        assert x.size == 9
        assert x[0] == pytest.approx(np.deg2rad(43.0))

    def test_radian_header(self, tmp_path):
        path = tmp_path / "rad.csv"
        path.write_text("angle_rad\n0.5\n1.5\n")
        assert np.array_equal(read_data(path), [0.5, 1.5])

    def test_headerless_column(self, tmp_path):
        path = tmp_path / "bare.csv"
        path.write_text("1.25\n-0.5\n3\n")
        assert np.array_equal(read_data(path), [1.25, -0.5, 3.0])

    def test_two_columns(self, tmp_path):
        path = tmp_path / "wide.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(DataFileError):
            read_data(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFileError):
            read_data(tmp_path / "missing.csv")


class TestWriters:
    def test_contour_csv_and_sidecar(self, tmp_path):
        grid = np.linspace(-3.0, 3.0, 61)
        contour = contour_grid(GaussianLocation(), np.array([0.25]), grid, 2000, seed=5)
        path = write_contour(contour, tmp_path / "c.csv")
        frame = pd.read_csv(path)
        assert np.array_equal(frame["theta"].to_numpy(), grid)
        assert np.array_equal(frame["pi"].to_numpy(), contour.values)
        meta = (tmp_path / "c.meta").read_text().splitlines()
        assert meta == sorted(meta)
        assert "seed=5" in meta
        assert "g=0.25" in meta

    def test_sidecar_skips_none(self, tmp_path):
        path = write_sidecar({"b": None, "a": [1.0, 2.5]}, tmp_path / "s.meta")
        assert path.read_text() == "a=1;2.5\n"
