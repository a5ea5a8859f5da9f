import csv
import json

import numpy as np
import pytest

from torus_transfer import runs
from torus_transfer.cli import main

FAST = ["--iters", "30", "--lattice", "64", "--log-every", "10", "--eta", "1e-2"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def run_dir(tmp_path):
    out = tmp_path / "run"
    assert main(["optimize", *FAST, "--out", str(out)]) == 0
    return out


def test_optimize_artifacts(run_dir, capsys):
    names = {p.name for p in run_dir.iterdir()}
    assert {"config.json", "history.csv", "control.csv", "pushforward.csv",
            "summary.json", "manifest.json"} <= names
    assert len(read_csv(run_dir / "history.csv")) == 3
    control = read_csv(run_dir / "control.csv")
    assert len(control) == 64
    assert float(control[0]["t_start"]) == 0.0 and float(control[-1]["t_end"]) == pytest.approx(1.0)
    assert len(read_csv(run_dir / "pushforward.csv")) == 64
    summary = json.loads((run_dir / "summary.json").read_text())
    assert summary["gradient_evaluations"] == 30 and summary["aborted"] is False
    assert summary["mismatch"] == pytest.approx(np.sqrt(summary["transfer_term"]))
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert [e["command"] for e in manifest["entries"]] == ["optimize"]


def test_refuses_to_overwrite(run_dir):
    assert main(["optimize", *FAST, "--out", str(run_dir)]) == 2
    assert main(["optimize", *FAST, "--out", str(run_dir), "--force"]) == 0
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert len(manifest["entries"]) == 2


def test_config_round_trip_reproduces_history(run_dir, tmp_path):
    again = tmp_path / "again"
    assert main(["optimize", "--config", str(run_dir / "config.json"), "--out", str(again)]) == 0
    assert (run_dir / "history.csv").read_bytes() == (again / "history.csv").read_bytes()
    assert (run_dir / "control.csv").read_bytes() == (again / "control.csv").read_bytes()


def test_load_run(run_dir):
    config, control, summary = runs.load_run(run_dir)
    assert config.lattice_size == 64 and control.K == 64
    assert summary["seed"] == 0


def test_export_plots(run_dir):
    assert main(["export-plots", str(run_dir)]) == 0
    assert len(read_csv(run_dir / "states.csv")) > 0
    assert len(read_csv(run_dir / "controls.csv")) == 128
    flow = read_csv(run_dir / "flow.csv")
    assert len(flow) == 65 and len(flow[0]) - 1 <= 64
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["entries"][-1]["command"] == "export-plots"


@pytest.mark.parametrize("argv", [
    [],
    ["optimize", "--alpha", "-1"],
    ["optimize", "--target", "bogus"],
    ["optimize", "--target", "custom"],
    ["optimize", "--iters", "many"],
    ["sweep", "alpha"],
    ["sweep", "alpha", "1e-7", "1e-3"],
    ["sweep", "lattice", "628", "314"],
    ["verify", "gradient", "--grid", "64"],
    ["verify", "trotter", "--run", "x"],
    ["verify", "nothing"],
    ["export-plots", "/nonexistent/run"],
])
def test_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_sweep_alpha(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", "alpha", "1e-3", "1e-7", *FAST, "--out", str(out)]) == 0
    rows = read_csv(out / "sweep_alpha.csv")
    assert [float(r["alpha"]) for r in rows] == [1e-3, 1e-7]


def test_sweep_lattice(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", "lattice", "16", "32", "--iters", "5", "--out", str(out)]) == 0
    rows = read_csv(out / "sweep_lattice.csv")
    assert [int(r["lattice_size"]) for r in rows] == [16, 32]
    assert all(int(r["reference_size"]) == 128 for r in rows)


def test_verify_transfer_identity(tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "transfer", "--grid", "64", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] and {c["name"] for c in report["checks"]} == {"identity_transfer", "rotation_transfer"}


def test_verify_transfer_cross_validation(run_dir, tmp_path):
    out = tmp_path / "v"
    code = main(["verify", "transfer", "--run", str(run_dir), "--grid", "256", "--out", str(out)])
    report = json.loads((out / "report.json").read_text())
    (check,) = report["checks"]
    assert check["name"] == "cross_validation"
    assert code == (0 if check["passed"] else 1)


def test_aborted_run_exit_code(tmp_path):
    out = tmp_path / "abort"
    code = main(["optimize", "--method", "gd", "--metric", "euclidean", "--eta", "1e6",
                 "--iters", "5", "--lattice", "64", "--init-stddev", "0.5", "--out", str(out)])
    assert code == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["aborted"] is True
    assert json.loads((out / "manifest.json").read_text())["entries"][0]["exit_status"] == 3


def test_export_plots_large_lattice_and_ground(tmp_path):
    out = tmp_path / "g"
    assert main(["optimize", "--target", "ground", "--iters", "2", "--lattice", "1000", "--out", str(out)]) == 0
    assert main(["export-plots", str(out)]) == 0
    states = read_csv(out / "states.csv")
    assert len(states) == 1000
    assert all(r["achieved"] == r["initial"] for r in states)
    with open(out / "flow.csv") as fh:
        header = fh.readline().strip().split(",")
    assert header[0] == "t_k" and len(header) - 1 <= 64


def test_missing_config_file(tmp_path):
    assert main(["optimize", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2


def test_ground_run_cross_validates_to_zero(tmp_path, capsys):
    run = tmp_path / "ground"
    assert main(["optimize", "--target", "ground", "--iters", "3", "--out", str(run)]) == 0
    summary = json.loads((run / "summary.json").read_text())
    assert summary["mismatch"] == 0.0
    out = tmp_path / "v"
    assert main(["verify", "transfer", "--run", str(run), "--grid", "64", "--out", str(out)]) == 0
    (check,) = json.loads((out / "report.json").read_text())["checks"]
    assert check["grid_mismatch"] < 1e-13 and check["lattice_mismatch"] == 0.0


def test_history_row_count(run_dir):
    config = json.loads((run_dir / "config.json").read_text())
    rows = read_csv(run_dir / "history.csv")
    assert len(rows) == config["iterations"] // config["log_every"]
    assert list(rows[0]) == ["iteration", "total", "reg_term", "transfer_term", "grad_inf_norm"]
