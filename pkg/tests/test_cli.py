import json

import numpy as np
import pytest

from nopivot import cli, dense, instances, verify
from nopivot.randgen import FiniteSet, Seed


class TestParser:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_hex_seed(self):
        parser = cli.build_parser()
        args = parser.parse_args(["--seed", "0x10", "verify", "tails"])
        assert args.seed == 16

    def test_delta_parsing(self):
        parser = cli.build_parser()
        args = parser.parse_args(["verify", "finite-set", "--delta", "0..4"])
        assert args.delta == FiniteSet((0, 1, 2, 3, 4))
        args = parser.parse_args(["verify", "finite-set", "--delta", "1,5,9"])
        assert args.delta == FiniteSet((1, 5, 9))


class TestExperimentCommand:
    def test_csv_output(self, capsys):
        code = cli.main(
            ["--seed", "21", "--trials", "3", "--dims", "16", "--format", "csv",
             "experiment", "--method", "gepp"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("dimension,iterations,min,max,mean,std,failures")
        assert out.splitlines()[1].startswith("16,0,")

    def test_json_to_file(self, tmp_path):
        target = tmp_path / "report.json"
        code = cli.main(
            ["--seed", "21", "--trials", "2", "--dims", "16", "--format", "json",
             "--out", str(target), "experiment", "--method", "genp"]
        )
        assert code == 0
        payload = json.loads(target.read_text())
        assert payload["master_seed"] == 21
        assert payload["rows"][0]["dimension"] == 16

    def test_plan_options(self, capsys):
        code = cli.main(
            ["--seed", "21", "--trials", "2", "--dims", "16", "--format", "csv",
             "experiment", "--method", "genp+plan", "--left", "circulant",
             "--right", "none", "--refine", "1"]
        )
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3  # header + two refinement levels


class TestVerifyCommand:
    def test_finite_set_passes(self, capsys):
        code = cli.main(["--seed", "3", "verify", "finite-set", "--k", "2", "--draws", "2000"])
        assert code == 0
        out = capsys.readouterr().out
        assert "nonsingular-frequency" in out
        assert "bound=" in out and "empirical=" in out and "margin=" in out

    def test_spectral_smoke(self, capsys):
        code = cli.main(["--seed", "3", "verify", "spectral", "--instances", "60", "--sizes", "8"])
        assert code == 0
        assert "product-lower-bound-left" in capsys.readouterr().out

    def test_safety_smoke(self, capsys):
        code = cli.main(["--seed", "3", "--trials", "3", "verify", "safety", "--n", "8"])
        assert code == 0

    def test_perturbation_smoke(self, capsys):
        code = cli.main(["--seed", "3", "--trials", "5", "verify", "perturbation"])
        assert code == 0

    def test_json_format(self, capsys):
        code = cli.main(["--seed", "3", "--format", "json",
                         "verify", "finite-set", "--k", "2", "--draws", "2000"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True

    def test_failing_report_exits_one(self, monkeypatch, capsys):
        failing = verify.VerificationReport(title="forced", seed=0)
        failing.checks.append(
            verify.BoundCheck("forced", {}, bound=0.0, empirical=1.0, margin=0.0, samples=1, passed=False)
        )
        monkeypatch.setattr(verify, "check_tail_bounds", lambda *a, **k: failing)
        code = cli.main(["verify", "tails"])
        assert code == 1
        assert "FAIL" in capsys.readouterr().out


class TestGenerateAndSolve:
    def test_generate_then_read(self, tmp_path, capsys):
        code = cli.main(
            ["--seed", "5", "--out", str(tmp_path), "generate", "--n", "16", "--h", "4", "--count", "2"]
        )
        assert code == 0
        listed = capsys.readouterr().out.splitlines()
        assert len(listed) == 2
        inst = instances.read_instance(listed[0])
        assert inst.n == 16 and inst.h == 4
        assert inst.matrix.shape == (16, 16)

    def test_solve_round_trip(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        g = rng.standard_normal((8, 8))
        a = g.T @ g + 8 * np.eye(8)
        b = rng.standard_normal(8)
        dense.write_matrix(a, tmp_path / "a.txt")
        dense.write_matrix(b[:, None], tmp_path / "b.txt")
        code = cli.main(
            ["--seed", "5", "solve", "--matrix", str(tmp_path / "a.txt"),
             "--rhs", str(tmp_path / "b.txt"), "--left", "none", "--right", "none",
             "--json", "--emit-solution"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["relative_residual"] <= 1e-10
        assert payload["failure"] is None
        x = np.array(payload["solution"])
        assert np.linalg.norm(a @ x - b) <= 1e-9

    def test_solve_failure_exits_one(self, tmp_path, capsys):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        b = np.ones(2)
        dense.write_matrix(a, tmp_path / "a.txt")
        dense.write_matrix(b[:, None], tmp_path / "b.txt")
        code = cli.main(
            ["solve", "--matrix", str(tmp_path / "a.txt"), "--rhs", str(tmp_path / "b.txt"),
             "--left", "none", "--right", "none"]
        )
        assert code == 1
        assert "failure" in capsys.readouterr().out

    def test_missing_file_exits_two(self, capsys):
        code = cli.main(["solve", "--matrix", "/nonexistent.txt", "--rhs", "/nonexistent.txt"])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_refinement_history(self, tmp_path, capsys):
        inst = instances.hard_matrix(Seed(6), 16, 4)
        dense.write_matrix(inst.matrix, tmp_path / "a.txt")
        dense.write_matrix(inst.rhs[:, None], tmp_path / "b.txt")
        code = cli.main(
            ["--seed", "6", "solve", "--matrix", str(tmp_path / "a.txt"),
             "--rhs", str(tmp_path / "b.txt"), "--refine", "2", "--json"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["residual_history"]) == 3
        assert payload["safety"]["growth_factor"] >= 1.0
