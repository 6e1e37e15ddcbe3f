"""Command-line harness: subcommands, file formats, byte-level determinism."""

import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from falqon_mst.cli import main
from falqon_mst.experiments import read_runs_csv

TRIANGLE = "0.0,1.0,2.0\n1.0,0.0,3.0\n2.0,3.0,0.0\n"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / "weights.csv"
    path.write_text(TRIANGLE)
    return str(path)


def make_data_dir(tmp_path, rows=16) -> str:
    """A manifest-backed toy corpus: two drifting 2-feature classes."""
    rng = np.random.default_rng(0)
    lines = []
    for i in range(rows):
        label = i % 2
        x = 1.0 + 0.35 * i + 0.05 * rng.standard_normal()
        y = 3.0 * label + 0.05 * rng.standard_normal()
        lines.append(f"{x:.4f},{y:.4f},{label}")
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    (data_dir / "toy.csv").write_text("\n".join(lines) + "\n")
    manifest = {
        "datasets": [
            {
                "name": "toy",
                "filename": "toy.csv",
                "label_column": 2,
                "expected_rows": rows,
                "expected_features": 2,
            }
        ]
    }
    (data_dir / "manifest.json").write_text(json.dumps(manifest))
    return str(data_dir)


def run_ok(runner, args, **kw):
    result = runner.invoke(main, args, catch_exceptions=False, **kw)
    assert result.exit_code == 0, result.output
    return result


class TestMstCommand:
    def test_triangle(self, runner, triangle_file):
        result = run_ok(runner, ["mst", "--weights", triangle_file])
        lines = result.output.strip().splitlines()
        assert lines[0].startswith("0 1") and lines[1].startswith("0 2")
        assert lines[-1] == "total 3.0"

    def test_rejects_non_square(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,1.0,2.0\n1.0,0.0,3.0\n")
        result = runner.invoke(main, ["mst", "--weights", str(path)])
        assert result.exit_code != 0
        assert "square" in result.output


class TestDecodeCommand:
    def test_all_zero_reports_missing_root(self, runner, triangle_file):
        result = run_ok(runner, ["decode", "--weights", triangle_file, "--bits", "0" * 9])
        payload = json.loads(result.output)
        assert payload["is_valid_tree"] is False
        assert any(v["term"] == 1 for v in payload["violations"])
        assert payload["root"] is None

    def test_valid_mst_encoding(self, runner, triangle_file):
        # root 0 at level 0; vertices 1, 2 at level 1; edges (0,1), (0,2)
        bits = ["0"] * 9
        for idx in (0, 3, 5, 6, 7):
            bits[idx] = "1"
        result = run_ok(runner, ["decode", "--weights", triangle_file, "--bits", "".join(bits)])
        payload = json.loads(result.output)
        assert payload["is_valid_tree"] is True
        assert payload["violations"] == []
        assert payload["edges"] == [[0, 1], [0, 2]]
        assert payload["energy"] == pytest.approx(0.1 * 3.0, abs=1e-12)

    def test_wrong_length_rejected(self, runner, triangle_file):
        result = runner.invoke(main, ["decode", "--weights", triangle_file, "--bits", "0101"])
        assert result.exit_code != 0
        assert "length" in result.output

    @pytest.mark.filterwarnings("ignore::falqon_mst.pubo.PenaltyBoundWarning")
    def test_polynomial_export(self, runner, triangle_file, tmp_path):
        from falqon_mst.pubo import BinaryPolynomial

        poly_path = tmp_path / "poly.txt"
        run_ok(runner, [
            "decode", "--weights", triangle_file, "--bits", "0" * 9,
            "--poly-out", str(poly_path),
        ])
        poly = BinaryPolynomial.from_text(poly_path.read_text())
        assert poly.degree == 5
        assert poly.terms[()] > 0  # boosted constant from the squared penalties


class TestTraceCommand:
    def test_two_vertex_toy_converges(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        out = tmp_path / "out"
        run_ok(runner, [
            "trace", "--dataset", "toy", "--data-dir", data_dir, "--indices", "0,1",
            "--layers", "500", "--out", str(out),
        ])
        rows = (out / "trace.csv").read_text().splitlines()
        assert rows[0] == "layer,beta,energy"
        assert len(rows) == 501
        energies = [float(r.split(",")[2]) for r in rows[1:]]
        result = json.loads((out / "result.json").read_text())
        assert energies[-1] < energies[0]  # below the uniform-state mean
        assert result["ground_energy"] <= energies[-1] + 1e-9
        decoded = json.loads((out / "decoded.json").read_text())
        assert set(decoded) >= {"bitstring", "edges", "violations", "energy", "prim_edges"}

    def test_single_layer_trace_has_default_beta(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        out = tmp_path / "single"
        run_ok(runner, [
            "trace", "--dataset", "toy", "--data-dir", data_dir, "--indices", "0,1",
            "--layers", "1", "--out", str(out),
        ])
        rows = (out / "trace.csv").read_text().splitlines()
        assert len(rows) == 2
        assert float(rows[1].split(",")[1]) == 0.0

    def test_seeded_draw_uses_four_samples(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        out = tmp_path / "seeded"
        run_ok(runner, [
            "trace", "--dataset", "toy", "--data-dir", data_dir, "--seed", "3",
            "--layers", "30", "--out", str(out),
        ])
        result = json.loads((out / "result.json").read_text())
        assert len(result["top_states"][0]["bitstring"]) == 18


class TestSuccessRateCommand:
    def test_outputs_and_determinism(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            run_ok(runner, [
                "success-rate", "--dataset", "toy", "--data-dir", data_dir,
                "--runs", "2", "--layers", "40", "--seed", "11", "--out", str(out),
            ])
            outs.append(out)
        bytes_a = (outs[0] / "runs.csv").read_bytes()
        assert bytes_a == (outs[1] / "runs.csv").read_bytes()
        assert (outs[0] / "report.json").read_bytes() == (outs[1] / "report.json").read_bytes()

        report = json.loads((outs[0] / "report.json").read_text())
        assert report["success_rate"] <= report["top_k_rate"]
        rows = read_runs_csv(outs[0] / "runs.csv")
        assert len(rows) == 2
        recomputed = sum(r["success"] == "true" for r in rows) / len(rows)
        assert recomputed == pytest.approx(report["success_rate"])

    def test_worker_count_does_not_change_bytes(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        outs = []
        for name, workers in (("w1", "1"), ("w2", "2")):
            out = tmp_path / name
            run_ok(runner, [
                "success-rate", "--dataset", "toy", "--data-dir", data_dir,
                "--runs", "2", "--layers", "30", "--seed", "5",
                "--workers", workers, "--out", str(out),
            ])
            outs.append(out)
        assert (outs[0] / "runs.csv").read_bytes() == (outs[1] / "runs.csv").read_bytes()
        assert (outs[0] / "report.json").read_bytes() == (outs[1] / "report.json").read_bytes()
        # wall-clock details are quarantined in metadata.json
        meta = json.loads((outs[1] / "metadata.json").read_text())
        assert meta["workers"] == 2

    def test_missing_dataset_flag(self, runner):
        result = runner.invoke(main, ["success-rate"])
        assert result.exit_code != 0


class TestAccuracyCommand:
    def test_tree_equal_runs_have_equal_accuracy(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        out = tmp_path / "acc"
        run_ok(runner, [
            "accuracy", "--dataset", "toy", "--data-dir", data_dir,
            "--runs", "3", "--layers", "40", "--seed", "2", "--out", str(out),
        ])
        rows = read_runs_csv(out / "runs.csv")
        assert len(rows) == 3
        for row in rows:
            if row["tree_equal"] == "true":
                assert row["prim_accuracy"] == row["falqon_pubo_accuracy"]
        report = json.loads((out / "report.json").read_text())
        assert set(report["mean_accuracy"]) == {"prim", "falqon-pubo"}
        for method, mean in report["mean_accuracy"].items():
            key = "prim_accuracy" if method == "prim" else "falqon_pubo_accuracy"
            assert mean == pytest.approx(sum(float(r[key]) for r in rows) / len(rows))

    def test_prim_only_method_selection(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        out = tmp_path / "prim_only"
        run_ok(runner, [
            "accuracy", "--dataset", "toy", "--data-dir", data_dir,
            "--runs", "4", "--methods", "prim", "--seed", "7", "--out", str(out),
        ])
        report = json.loads((out / "report.json").read_text())
        assert list(report["mean_accuracy"]) == ["prim"]
        rows = read_runs_csv(out / "runs.csv")
        assert all(r["falqon_pubo_accuracy"] == "" for r in rows)


class TestConfigFile:
    def test_flags_override_file(self, runner, tmp_path):
        data_dir = make_data_dir(tmp_path)
        cfg = {"dataset": "toy", "runs": 5, "layers": 30, "seed": 1, "data_dir": data_dir}
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "cfgout"
        run_ok(runner, [
            "success-rate", "--config", str(cfg_path), "--runs", "2", "--out", str(out),
        ])
        report = json.loads((out / "report.json").read_text())
        assert report["config"]["runs"] == 2  # flag wins
        assert report["config"]["layers"] == 30  # file value preserved
        assert len(report["run_seeds"]) == 2

    def test_env_var_data_dir(self, runner, tmp_path, triangle_file):
        data_dir = make_data_dir(tmp_path)
        result = run_ok(runner, ["datasets"], env={"FALQON_MST_DATA": data_dir})
        assert "toy: 16 samples" in result.output
