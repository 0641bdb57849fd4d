"""CLI subcommand tests: exit codes, outputs, determinism."""

import json
import os

import numpy as np
import pytest

from hallmhd.cli import main
from hallmhd.io import read_series_csv, read_snapshot, write_series_csv

MINIMAL_CFG = """
grid.n = 16
grid.L = 6.283185307179586
params.mu = 1
params.nu = 0
initial.amplitude = 0.02
stepping.dt = 0.05
stepping.t_end = 0.3
stepping.snapshot_every = 0.15
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(MINIMAL_CFG)
    return str(path)


def read_summary(outdir):
    with open(os.path.join(outdir, "summary.json"), encoding="utf-8") as fh:
        return json.load(fh)


class TestFit:
    def make_series(self, tmp_path, exponent=-1.75, prefactor=5.0):
        t = np.linspace(0.0, 100.0, 300)
        rows = [{"t": float(ti), "norm": float(prefactor * (1 + ti) ** exponent)}
                for ti in t]
        path = tmp_path / "series.csv"
        write_series_csv(rows, str(path))
        return str(path)

    def test_synthetic_power_law(self, tmp_path, capsys):
        path = self.make_series(tmp_path)
        out = str(tmp_path / "out")
        code = main(["fit", "--input", path, "--window", "1", "50",
                     "--output", out, "--no-figures"])
        assert code == 0
        assert "-1.75" in capsys.readouterr().out
        summary = read_summary(out)
        assert summary["passed"]
        assert summary["slope"] == pytest.approx(-1.75, abs=1e-9)

    def test_missing_column_is_usage_error(self, tmp_path):
        path = self.make_series(tmp_path)
        code = main(["fit", "--input", path, "--column", "energy",
                     "--window", "1", "50", "--output", str(tmp_path / "o")])
        assert code == 2

    def test_bad_window_is_failure(self, tmp_path):
        path = self.make_series(tmp_path)
        out = str(tmp_path / "out")
        code = main(["fit", "--input", path, "--window", "99", "100",
                     "--output", out, "--no-figures"])
        assert code == 1
        assert not read_summary(out)["passed"]

    def test_figure_rendered(self, tmp_path):
        path = self.make_series(tmp_path)
        out = str(tmp_path / "out")
        assert main(["fit", "--input", path, "--window", "1", "50",
                     "--output", out]) == 0
        png = os.path.join(out, "fit.png")
        assert os.path.exists(png) and os.path.getsize(png) > 0


class TestIdentities:
    def test_passes_and_writes_outputs(self, tmp_path):
        out = str(tmp_path / "out")
        code = main(["identities", "--n", "16", "--seed", "7",
                     "--pairs", "4", "--output", out, "--no-figures"])
        assert code == 0
        cols = read_series_csv(os.path.join(out, "identities.csv"))
        assert len(cols["lorentz_residual"]) == 4
        assert np.max(cols["lorentz_residual"]) <= 1e-11

    def test_impossible_tolerance_fails(self, tmp_path):
        out = str(tmp_path / "out")
        code = main(["identities", "--n", "16", "--seed", "7", "--pairs", "2",
                     "--tolerance", "1e-30", "--output", out, "--no-figures"])
        assert code == 1


class TestLinearDecay:
    def test_b_component_fast(self, tmp_path):
        out = str(tmp_path / "out")
        code = main(["linear-decay", "--k", "0", "--component", "B",
                     "--samples", "12", "--output", out, "--no-figures"])
        assert code == 0
        summary = read_summary(out)
        assert summary["slope"] == pytest.approx(-0.75, abs=0.05)
        cols = read_series_csv(os.path.join(out, "decay.csv"))
        assert len(cols["norm"]) == 12

    def test_u_component_documented_example(self, tmp_path):
        out = str(tmp_path / "out")
        code = main(["linear-decay", "--k", "0", "--component", "u",
                     "--samples", "12", "--output", out, "--no-figures"])
        assert code == 0
        summary = read_summary(out)
        assert abs(summary["slope"] - (-0.75)) <= 0.05

    def test_bad_mu_is_usage_error(self, tmp_path):
        code = main(["linear-decay", "--mu", "0", "--output",
                     str(tmp_path / "o")])
        assert code == 2


class TestSimulate:
    def test_run_outputs_and_determinism(self, tmp_path, config_file):
        out1 = str(tmp_path / "run1")
        out2 = str(tmp_path / "run2")
        for out in (out1, out2):
            code = main(["simulate", "--config", config_file,
                         "--output", out, "--no-figures"])
            assert code == 0
        s1 = open(os.path.join(out1, "series.csv"), "rb").read()
        s2 = open(os.path.join(out2, "series.csv"), "rb").read()
        assert s1 == s2
        b1 = open(os.path.join(out1, "snapshot_0000.hmhd"), "rb").read()
        b2 = open(os.path.join(out2, "snapshot_0000.hmhd"), "rb").read()
        assert b1 == b2
        summary = read_summary(out1)
        assert summary["passed"]
        assert sorted(s["t"] for s in summary["snapshots"]) == pytest.approx(
            [0.0, 0.15, 0.3])

    def test_flag_overrides_dt(self, tmp_path, config_file):
        out = str(tmp_path / "out")
        code = main(["simulate", "--config", config_file, "--output", out,
                     "--stepping.dt", "0.1", "--no-figures"])
        assert code == 0
        cols = read_series_csv(os.path.join(out, "series.csv"))
        assert cols["t"][1] == pytest.approx(0.1)

    def test_snapshot_readable(self, tmp_path, config_file):
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", config_file, "--output", out,
                     "--no-figures"]) == 0
        state = read_snapshot(os.path.join(out, "snapshot_0000.hmhd"))
        assert state.grid.n == 16
        assert state.time == 0.0

    def test_figures_written(self, tmp_path, config_file):
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", config_file, "--output", out]) == 0
        for name in ("norms.png", "energy.png"):
            path = os.path.join(out, name)
            assert os.path.exists(path) and os.path.getsize(path) > 0

    def test_config_error_exit_code(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("grid.n = 24\ngrid.L = 1\nparams.mu = 1\nparams.nu = 0\n")
        code = main(["simulate", "--config", str(cfg),
                     "--output", str(tmp_path / "o")])
        assert code == 2


class TestEnergyAudit:
    def test_small_run_passes(self, tmp_path, config_file):
        out = str(tmp_path / "out")
        code = main(["energy-audit", "--config", config_file,
                     "--output", out, "--no-figures"])
        assert code == 0
        summary = read_summary(out)
        names = {c["name"] for c in summary["checks"]}
        assert {"e0_nonincreasing", "e1_nonincreasing",
                "functional_equivalence",
                "fourier_splitting_nonnegative"} <= names
        cols = read_series_csv(os.path.join(out, "energy.csv"))
        assert "fsm_res_R4_k2" in cols and "fsm_res_R5_k3" in cols
