import filecmp
import json

import numpy as np
import pytest

from gordon.cli import main
from gordon.grid import load_complex_csv, load_scalar_csv


def coarse(x0, x1, y0, y1, h=1 / 50):
    nx = int(round((x1 - x0) / h)) + 1
    ny = int(round((y1 - y0) / h)) + 1
    return json.dumps({"x0": x0, "x1": x1, "y0": y0, "y1": y1, "nx": nx, "ny": ny})


class TestFamilies:
    def test_list(self, capsys):
        assert main(["families", "list"]) == 0
        out = capsys.readouterr().out
        for fid in ("W_TAN_SPECIAL", "THETA_SQRT2", "U_EX2", "METRIC_SECTION3"):
            assert fid in out

    def test_list_json(self, capsys):
        assert main(["families", "list", "--json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 13
        assert {"id", "kind", "formula", "rectangle", "sign"} <= set(rows[0])

    def test_eval_scalar_round_trip(self, tmp_path, capsys):
        out = str(tmp_path / "w.csv")
        rc = main([
            "families", "eval", "--family", "W_TAN_SPECIAL", "--out", out,
            "--grid", coarse(-0.3, 0.3, -0.3, 0.3),
        ])
        assert rc == 0
        f = load_scalar_csv(out)
        i0 = f.grid.index_of_x(0.0)
        j0 = f.grid.index_of_y(0.0)
        assert f.values[i0, j0] == 0.0
        assert (tmp_path / "w.csv.grid.json").exists()

    def test_eval_metric_writes_components(self, tmp_path, capsys):
        out = str(tmp_path / "m")
        rc = main([
            "families", "eval", "--family", "METRIC_SECTION3", "--out", out,
            "--grid", coarse(0.05, 0.3, 0.05, 0.3),
        ])
        assert rc == 0
        for comp in ("E", "Fc", "G"):
            assert (tmp_path / f"m.{comp}.csv").exists()

    def test_unknown_family_is_config_error(self, capsys):
        assert main(["families", "eval", "--family", "NOPE", "--out", "/tmp/x.csv"]) == 2

    def test_unknown_subcommand_exits(self):
        with pytest.raises(SystemExit):
            main(["families", "frobnicate"])


class TestVerify:
    def test_sinh_family_passes(self, capsys):
        rc = main([
            "verify", "--family", "W_TAN_SPECIAL",
            "--grid", coarse(-0.3, 0.3, -0.3, 0.3), "--tol", "0.1",
        ])
        assert rc == 0
        assert "W_TAN_SPECIAL.sinh_residual" in capsys.readouterr().out

    def test_tolerance_failure_is_exit_one(self, capsys):
        rc = main([
            "verify", "--family", "W_TAN_SPECIAL",
            "--grid", coarse(-0.3, 0.3, -0.3, 0.3), "--tol", "1e-12",
        ])
        assert rc == 1
        assert "FAIL" in capsys.readouterr().out

    def test_bad_grid_json(self, capsys):
        rc = main(["verify", "--family", "W_TAN_SPECIAL", "--grid", "{not json"])
        assert rc == 2

    def test_bad_tol(self, capsys):
        rc = main([
            "verify", "--family", "W_TAN_SPECIAL",
            "--grid", coarse(-0.3, 0.3, -0.3, 0.3), "--tol", "-1",
        ])
        assert rc == 2

    def test_env_tolerance_override(self, capsys, monkeypatch):
        monkeypatch.setenv("GORDON_TOL", "1e-12")
        rc = main([
            "verify", "--family", "W_TAN_SPECIAL",
            "--grid", coarse(-0.3, 0.3, -0.3, 0.3),
        ])
        assert rc == 1  # the env tolerance is impossible at this spacing

    def test_json_report_deterministic(self, tmp_path, capsys):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        args = [
            "verify", "--family", "THETA_EX2",
            "--grid", coarse(-0.15, 0.15, -0.15, 0.15), "--tol", "0.1",
        ]
        assert main(args + ["--json", a]) == 0
        assert main(args + ["--json", b]) == 0
        assert filecmp.cmp(a, b, shallow=False)
        rep = json.loads((tmp_path / "a.json").read_text())
        assert rep["passed"] is True
        names = [c["name"] for c in rep["checks"]]
        assert names == sorted(names)


class TestBacklund:
    def test_t2w_run(self, tmp_path, capsys):
        out = str(tmp_path / "w.csv")
        rc = main([
            "backlund", "run", "--direction", "t2w", "--family", "THETA_EX2",
            "--w00", "0", "--out", out,
            "--grid", coarse(-0.15, 0.15, -0.15, 0.15, h=1 / 100), "--tol", "0.1",
        ])
        assert rc == 0
        w = load_scalar_csv(out)
        assert w.mask.any()
        text = capsys.readouterr().out
        assert "backlund.r1" in text and "backlund.r2" in text and "FAIL" not in text

    def test_w2t_needs_sinh_family(self, capsys):
        rc = main([
            "backlund", "run", "--direction", "w2t", "--family", "THETA_EX2",
            "--out", "/tmp/x.csv",
        ])
        assert rc == 2


class TestHarmonic:
    def test_build_then_verify(self, tmp_path, capsys):
        prefix = str(tmp_path / "map")
        rc = main([
            "harmonic", "build", "--pair", "W_SQRT2,THETA_SQRT2",
            "--R0", "0", "--S0", "0.5", "--out", prefix,
            "--grid", coarse(0.0, 0.6, -0.35, 0.35, h=0.025), "--tol", "0.1",
        ])
        assert rc == 0
        u = load_complex_csv(prefix + ".u.csv")
        assert np.all(u.im[u.mask] > 0)
        for name in ("I1", "I2", "I3", "I4"):
            assert (tmp_path / f"map.{name}.csv").exists()
        rep = json.loads((tmp_path / "map.report.json").read_text())
        assert rep["passed"] is True

        capsys.readouterr()
        rc = main(["harmonic", "verify", "--u", prefix + ".u.csv", "--tol", "0.1"])
        assert rc == 0
        assert "harmonic.hopf" in capsys.readouterr().out

    def test_build_rejects_bad_pair(self, capsys):
        rc = main([
            "harmonic", "build", "--pair", "THETA_SQRT2,W_SQRT2",
            "--out", "/tmp/x",
        ])
        assert rc == 2

    def test_verify_with_metric(self, tmp_path, capsys):
        # U_SQRT2 carries the plain half-plane weight, which is the one the
        # standalone verify applies
        out = str(tmp_path / "u.csv")
        rc = main([
            "families", "eval", "--family", "U_SQRT2", "--out", out,
            "--grid", coarse(0.05, 0.3, 0.05, 0.3, h=1 / 100),
        ])
        assert rc == 0
        capsys.readouterr()
        rc = main([
            "harmonic", "verify", "--u", out, "--metric", "METRIC_SECTION3",
            "--tol", "0.1",
        ])
        assert rc == 0
        text = capsys.readouterr().out
        assert "METRIC_SECTION3.curvature" in text

    def test_missing_file_is_config_error(self, capsys):
        assert main(["harmonic", "verify", "--u", "/nonexistent/u.csv"]) == 2


class TestAcceptanceCommand:
    def test_quick_smoke(self, tmp_path, capsys):
        rep_path = str(tmp_path / "acc.json")
        rc = main(["acceptance", "--quick", "--json", rep_path])
        assert rc == 0
        text = capsys.readouterr().out
        assert "elapsed:" in text
        rep = json.loads((tmp_path / "acc.json").read_text())
        assert rep["passed"] is True
        assert len(rep["checks"]) >= 30
