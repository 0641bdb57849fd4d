"""Snapshot binary format and CSV series round trips."""

import numpy as np
import pytest

from hallmhd.io import (
    BadMagicError,
    SnapshotVersionError,
    TruncatedSnapshotError,
    read_series_csv,
    read_snapshot,
    snapshot_size,
    write_series_csv,
    write_snapshot,
)
from hallmhd.model import FieldState
from hallmhd.spectral import ScalarField, VectorField, build_grid


def random_physical_state(n=16, L=2 * np.pi, seed=0, time=1.25):
    grid = build_grid(n, L)
    rng = np.random.default_rng(seed)
    return FieldState(
        grid, time,
        ScalarField.from_physical(grid, rng.standard_normal(grid.shape)),
        VectorField.from_physical(grid, rng.standard_normal((3,) + grid.shape)),
        VectorField.from_physical(grid, rng.standard_normal((3,) + grid.shape)),
    )


class TestSnapshot:
    def test_round_trip_bitwise(self, tmp_path):
        state = random_physical_state()
        path = str(tmp_path / "state.hmhd")
        write_snapshot(state, path)
        back = read_snapshot(path)
        assert back.time == state.time
        assert back.grid.n == state.grid.n
        assert back.grid.box_length == state.grid.box_length
        assert np.array_equal(back.varrho.data, state.varrho.data)
        assert np.array_equal(back.u.data, state.u.data)
        assert np.array_equal(back.B.data, state.B.data)

    def test_rewrite_is_byte_identical(self, tmp_path):
        state = random_physical_state(seed=3)
        p1 = tmp_path / "a.hmhd"
        p2 = tmp_path / "b.hmhd"
        write_snapshot(state, str(p1))
        write_snapshot(read_snapshot(str(p1)), str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_size_formula(self, tmp_path):
        assert snapshot_size(32) == 1_835_036
        state = random_physical_state(n=32)
        path = tmp_path / "s.hmhd"
        write_snapshot(state, str(path))
        assert path.stat().st_size == 1_835_036

    def test_bad_magic(self, tmp_path):
        state = random_physical_state(n=8)
        path = tmp_path / "s.hmhd"
        write_snapshot(state, str(path))
        blob = bytearray(path.read_bytes())
        blob[:4] = b"XXXX"
        path.write_bytes(bytes(blob))
        with pytest.raises(BadMagicError):
            read_snapshot(str(path))

    def test_version_mismatch(self, tmp_path):
        state = random_physical_state(n=8)
        path = tmp_path / "s.hmhd"
        write_snapshot(state, str(path))
        blob = bytearray(path.read_bytes())
        blob[4] = 9
        path.write_bytes(bytes(blob))
        with pytest.raises(SnapshotVersionError):
            read_snapshot(str(path))

    def test_truncation(self, tmp_path):
        state = random_physical_state(n=8)
        path = tmp_path / "s.hmhd"
        write_snapshot(state, str(path))
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 17])
        with pytest.raises(TruncatedSnapshotError):
            read_snapshot(str(path))
        path.write_bytes(blob[:10])
        with pytest.raises(TruncatedSnapshotError):
            read_snapshot(str(path))

    def test_spectral_state_is_written_as_physical(self, tmp_path):
        state = random_physical_state(seed=5).to_spectral()
        path = str(tmp_path / "s.hmhd")
        write_snapshot(state, path)
        back = read_snapshot(path)
        want = state.to_physical()
        assert np.allclose(back.varrho.data, want.varrho.data, atol=1e-15)


class TestSeriesCsv:
    def test_empty_series_header_only(self, tmp_path):
        path = tmp_path / "s.csv"
        write_series_csv([], str(path))
        assert path.read_text() == "t\n"

    def test_two_samples_three_lines(self, tmp_path):
        path = tmp_path / "s.csv"
        rows = [{"t": 0.0, "norm": 1.0}, {"t": 0.5, "norm": 0.25}]
        write_series_csv(rows, str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert lines[0] == "t,norm"

    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(7)
        rows = [{"t": float(t), "a": float(rng.standard_normal()) * 1e-17,
                 "b": float(rng.standard_normal()) * 1e12}
                for t in np.linspace(0, 1, 20)]
        path = tmp_path / "s.csv"
        write_series_csv(rows, str(path))
        cols = read_series_csv(str(path))
        assert np.array_equal(cols["a"], np.array([r["a"] for r in rows]))
        assert np.array_equal(cols["b"], np.array([r["b"] for r in rows]))

    def test_t_column_first(self, tmp_path):
        path = tmp_path / "s.csv"
        write_series_csv([{"z": 1.0, "t": 0.0, "a": 2.0}], str(path))
        assert path.read_text().splitlines()[0] == "t,z,a"

    def test_schema_mismatch_rejected(self, tmp_path):
        rows = [{"t": 0.0, "a": 1.0}, {"t": 1.0, "b": 2.0}]
        with pytest.raises(ValueError):
            write_series_csv(rows, str(tmp_path / "s.csv"))

    def test_deterministic_bytes(self, tmp_path):
        rows = [{"t": 0.1, "x": np.pi}, {"t": 0.2, "x": np.e}]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_series_csv(rows, str(p1))
        write_series_csv(rows, str(p2))
        assert p1.read_bytes() == p2.read_bytes()
