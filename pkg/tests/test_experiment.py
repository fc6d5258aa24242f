import json
import math

import numpy as np
import pytest

from conftest import translating_gaussian
from quantile_motion.cli import EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK, main
from quantile_motion.density import DensitySeries, Grid1D, export_series, write_series
from quantile_motion.errors import ConfigurationError, FormatError
from quantile_motion.experiment import (RunConfig, compare, compare_many, exact_quantile,
                                        run_experiment, run_ingested)
from quantile_motion.presets import PRESETS
from quantile_motion.trajectory import Trajectory, read_trajectories, trajectories_to_csv
from quantile_motion.wavefunctions import FreeGaussian, HarmonicSuperposition


def traj(positions, times=None, **kw):
    positions = np.asarray(positions, float)
    times = np.arange(len(positions)) * 0.1 if times is None else times
    return Trajectory("t", times, positions, **kw)


class TestCompare:
    def test_identical(self):
        a = traj([0.0, 0.1, 0.3])
        assert compare(a, traj([0.0, 0.1, 0.3])).max_deviation == 0

    def test_constant_offset(self):
        r = compare(traj([0.0, 0.1, 0.3]), traj([0.25, 0.35, 0.55]))
        assert r.max_deviation == pytest.approx(0.25)
        np.testing.assert_allclose(r.entries[0].deviation, 0.25)

    def test_time_mismatch(self):
        with pytest.raises(ConfigurationError):
            compare(traj([0, 1, 2]), traj([0, 1, 2], times=np.array([0, 0.1, 0.25])))

    def test_threshold(self):
        r = compare(traj([0.0, 0.1]), traj([0.0, 0.2]), threshold=0.05)
        assert not r.passed
        r = compare(traj([0.0, 0.1]), traj([0.0, 0.12]), threshold=0.05)
        assert r.passed

    def test_two_dimensional_uses_max_norm(self):
        a = traj([[0, 0], [1, 1]])
        b = traj([[0, 0.1], [1.3, 1]])
        np.testing.assert_allclose(compare(a, b).entries[0].deviation, [0.1, 0.3])


class TestPresets:
    def test_harmonic(self):
        p = PRESETS["harmonic"]
        assert (p.model.omega, p.t_max, p.dt, p.dx, p.x_range) == (3.0, 3.0, 0.1, 0.2, (-5.0, 5.0))
        assert p.quantiles == tuple(k / 10 for k in range(1, 10))

    def test_two_slit(self):
        p = PRESETS["two-slit"]
        assert (p.dt, p.dx, p.t_max, p.x_range) == (2.5, 3.24169, 100.0, (-129.668, 129.668))
        assert p.dt == p.t_max / 40
        assert len(p.quantiles) >= 20

    def test_well(self):
        p = PRESETS["well-2d"]
        assert (p.model.L, p.dt, p.dx, p.ndim) == (1.0, 0.05, 1 / 30, 2)
        for x, y in p.starts:
            assert x + y == pytest.approx(0.5) and 0 < x < 0.5

    def test_free(self):
        p = PRESETS["free"]
        assert p.model.a == math.pi / 2 and (p.dt, p.dx, p.t_max) == (0.1, 0.2, 3.0)


class TestRunConfig:
    @pytest.mark.parametrize("q", [(0.5, 0.2), (0.2, 0.2), (0.0, 0.5), (0.5, 1.0)])
    def test_bad_quantiles(self, q):
        with pytest.raises(ConfigurationError):
            RunConfig.from_preset("harmonic", quantiles=q)

    def test_override_replaces_starts(self):
        c = RunConfig.from_preset("well-2d", quantiles=(0.3, 0.6))
        assert c.starts == () and c.quantiles == (0.3, 0.6)

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_preset("nope")


def test_harmonic_preset_within_threshold():
    r = run_experiment(RunConfig.from_preset("harmonic"))
    assert r.report.passed
    assert r.report.max_deviation <= 5e-2
    assert r.report.max_p_drift <= 1e-6


def test_grid_pairing_also_within_threshold():
    r = run_experiment(RunConfig.from_preset("harmonic", bohm_start="grid"))
    for q, b in zip(r.quantile, r.bohm):
        assert b.positions[0] == q.positions[0]
    assert r.report.max_deviation <= 5e-2


def test_exact_quantile_oracle():
    from statistics import NormalDist
    x = exact_quantile(FreeGaussian(), 0.8, -25, 25)
    assert x == pytest.approx(NormalDist(0, math.sqrt(1 / (2 * math.pi))).inv_cdf(0.8), abs=1e-10)


class TestIngested:
    def config(self, series, **kw):
        return RunConfig(name="ingest", x_min=series.grid.x_min, x_max=series.grid.x_max, **kw)

    def test_translating_straight_lines(self):
        s = translating_gaussian(v=0.5)
        r = run_ingested(s, self.config(s, quantiles=(0.2, 0.5, 0.8)))
        for tr in r.quantile:
            np.testing.assert_allclose(tr.positions - tr.positions[0], 0.5 * tr.times, atol=2e-3)
        assert r.report.max_p_drift <= 1e-6 and r.bohm is None

    def test_stationary(self, uniform_series):
        r = run_ingested(uniform_series, self.config(uniform_series, quantiles=(0.3,), starts=((0.6,),)))
        for tr in r.quantile:
            assert np.all(tr.positions == tr.positions[0])


class TestTrajectoryCsv:
    def test_round_trip(self):
        trs = [traj([0.1, 0.2, 1 / 3]), Trajectory("b", [0, 0.1, 0.2], [1e-17, 2.0, 3.0])]
        back = read_trajectories(__import__("io").StringIO(trajectories_to_csv(trs)))
        assert [b.label for b in back] == ["t", "b"]
        for a, b in zip(trs, back):
            np.testing.assert_array_equal(a.positions, b.positions)

    def test_two_d_header(self):
        text = trajectories_to_csv([traj([[0, 1], [2, 3]])])
        assert text.splitlines()[0] == "label,t,x,y"

    def test_bad_header(self):
        with pytest.raises(FormatError):
            read_trajectories(__import__("io").StringIO("a,b\n1,2\n"))


class TestCli:
    def test_presets_list(self, capsys):
        assert main(["presets", "list"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in ("harmonic", "free", "two-slit", "well-2d"):
            assert name in out

    def test_simulate_writes_files(self, tmp_path):
        out = tmp_path / "h"
        assert main(["simulate", "harmonic", "--output", str(out), "--write-density"]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] and report["max_deviation"] <= 5e-2
        assert report["parameters"]["model"]["omega"] == 3.0
        assert len(read_trajectories(out / "quantile.csv")) == 9
        assert (out / "density.csv").exists()

    def test_split_format(self, tmp_path):
        assert main(["simulate", "well-2d", "--output", str(tmp_path), "--format", "split"]) == EXIT_OK
        files = sorted(p.name for p in tmp_path.glob("quantile_*.csv"))
        assert len(files) == len(PRESETS["well-2d"].starts)
        assert read_trajectories(tmp_path / files[0])[0].ndim == 2

    def test_threshold_breach_exit_code(self):
        assert main(["simulate", "harmonic", "--threshold", "1e-6"]) == EXIT_CHECK_FAILED

    @pytest.mark.parametrize("argv", [["simulate", "harmonic", "--quantiles", "0.5,0.2"],
                                      ["simulate", "custom"],
                                      ["simulate", "custom", "--model", "free", "--param", "omega=1"],
                                      ["simulate", "harmonic", "--dx", "-1"],
                                      ["simulate", "free", "--x-min", "-1", "--x-max", "1"]])
    def test_validation_exit_code(self, argv, capsys):
        assert main(argv) == EXIT_INVALID
        assert "error:" in capsys.readouterr().err

    def test_argparse_errors_exit_2(self):
        with pytest.raises(SystemExit) as info:
            main(["simulate", "nonsense"])
        assert info.value.code == 2

    def test_custom(self, capsys):
        assert main(["simulate", "custom", "--model", "free", "--param", "a=1.0",
                     "--quantiles", "0.25,0.75", "--threshold", "0.05"]) == EXIT_OK
        assert "PASS" in capsys.readouterr().out

    def test_deterministic_across_workers(self, tmp_path):
        for w in ("1", "3"):
            assert main(["simulate", "two-slit", "--output", str(tmp_path / w), "--workers", w]) == EXIT_OK
        for name in ("quantile.csv", "bohm.csv", "report.json"):
            assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "3" / name).read_bytes()

    def test_compare_command(self, tmp_path):
        main(["simulate", "harmonic", "--output", str(tmp_path)])
        q, b = str(tmp_path / "quantile.csv"), str(tmp_path / "bohm.csv")
        assert main(["compare", q, b, "--threshold", "0.05", "--output", str(tmp_path / "c.json")]) == EXIT_OK
        assert json.loads((tmp_path / "c.json").read_text())["passed"]
        assert main(["compare", q, b, "--threshold", "1e-9"]) == EXIT_CHECK_FAILED

    def test_ingest_translating(self, tmp_path):
        path = tmp_path / "d.csv"
        write_series(translating_gaussian(v=0.5), path)
        out = tmp_path / "out"
        assert main(["ingest", str(path), "--quantiles", "0.3,0.7", "--output", str(out)]) == EXIT_OK
        for tr in read_trajectories(out / "quantile.csv"):
            np.testing.assert_allclose(tr.positions - tr.positions[0], 0.5 * tr.times, atol=2e-3)
        assert not (out / "bohm.csv").exists()

    def test_ingest_x0(self, tmp_path):
        path = tmp_path / "d.csv"
        write_series(translating_gaussian(v=0.0), path)
        assert main(["ingest", str(path), "--x0", "-1", "0.5"]) == EXIT_OK

    def test_ingest_conservation_failure(self, tmp_path):
        s = translating_gaussian(v=0.0, times=np.linspace(0, 1, 3))
        lines = export_series(s).splitlines()
        t, *vals = lines[-1].split(",")
        lines[-1] = ",".join([t] + [repr(1.01 * float(v)) for v in vals])
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(lines) + "\n")
        assert main(["ingest", str(path)]) == EXIT_INVALID

    def test_ingest_missing_file(self, tmp_path):
        assert main(["ingest", str(tmp_path / "missing.csv")]) == EXIT_INVALID
