import json
import subprocess
import sys

import numpy as np
import pytest

RUN = [sys.executable, "-m", "sidebandcat.cli"]


def run_cli(*args, cwd=None):
    return subprocess.run(RUN + list(args), capture_output=True, text=True, cwd=cwd)


def test_missing_n_exits_2(tmp_path):
    res = run_cli("prepare", "--out", str(tmp_path))
    assert res.returncode == 2
    assert "required" in res.stderr or "usage" in res.stderr.lower()


def test_unknown_flag_exits_2(tmp_path):
    res = run_cli("prepare", "--does-not-exist")
    assert res.returncode == 2


def test_prepare_outputs(tmp_path):
    res = run_cli("prepare", "--n", "2", "--phases", "0,0", "--samples", "1",
                  "--seed", "1", "--out", str(tmp_path))
    assert res.returncode == 0, res.stderr
    state = json.loads((tmp_path / "state.json").read_text())
    assert state["n_max"] == 32
    assert "config_hash" in state["meta"]
    csv_text = (tmp_path / "distribution.csv").read_text()
    assert csv_text.startswith("# config_hash=")
    assert (tmp_path / "distribution.png").exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["parity_g"] == 1.0
    assert summary["parity_e"] == -1.0


def test_prepare_n8_mean_near_four(tmp_path):
    res = run_cli("prepare", "--n", "8", "--seed", "7", "--samples", "256",
                  "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert 3.5 <= summary["mean_n"] <= 4.8


def test_reproducibility_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        res = run_cli("fringe", "--n", "2", "--samples", "4", "--grid", "16",
                      "--seed", "11", "--out", str(out), "--no-plot")
        assert res.returncode == 0, res.stderr
    for name in ("fringe.csv", "metrics.json", "spectrum.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_fringe_single_mode_full_dephase_zero_contrast(tmp_path):
    res = run_cli("fringe", "--n", "2", "--mode", "single", "--model", "full_dephase",
                  "--samples", "4", "--seed", "2", "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 0, res.stderr
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["axes"]["phi1"]["mean_contrast"] < 1e-10


def test_fringe_coarse_grid_aliasing_exit_2(tmp_path):
    res = run_cli("fringe", "--n", "2", "--samples", "2", "--grid", "8",
                  "--seed", "3", "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 2
    assert "too coarse" in res.stderr


def test_validate_quick(tmp_path):
    res = run_cli("validate", "--quick", "--out", str(tmp_path))
    assert res.returncode == 0, res.stdout + res.stderr
    assert "[PASS]" in res.stdout
    doc = json.loads((tmp_path / "validation.json").read_text())
    assert all(c["passed"] for c in doc["checks"])


def test_fit_round_trip_demo(tmp_path):
    res = run_cli("fit", "--n", "2", "--w", "0.9", "--shots", "0",
                  "--seed", "5", "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 0, res.stderr
    west = json.loads((tmp_path / "w_estimate.json").read_text())
    assert abs(west["w_hat"] - 0.9) < 0.02
    fit = json.loads((tmp_path / "phonon_fit.json").read_text())
    assert 0.9 <= sum(fit["probs"]) <= 1.05


def test_rabi_flop_then_fit_ingestion(tmp_path):
    res = run_cli("rabi-flop", "--n", "4", "--shots", "200", "--points", "160",
                  "--seed", "6", "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 0, res.stderr
    res = run_cli("fit", "--flop-csv", str(tmp_path / "rabi_flop.csv"),
                  "--out", str(tmp_path / "fitdir"), "--no-plot")
    assert res.returncode == 0, res.stderr
    fit = json.loads((tmp_path / "fitdir" / "phonon_fit.json").read_text())
    assert len(fit["probs"]) == 13


def test_fit_malformed_csv_names_line(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time_ms,pg,shots\n0.1,0.5,100\n0.2,broken,100\n")
    res = run_cli("fit", "--flop-csv", str(bad), "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 2
    assert ":3:" in res.stderr


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 2, "samples": 3, "seed": 9}))
    res = run_cli("prepare", "--config", str(cfg), "--out", str(tmp_path / "o1"), "--no-plot")
    assert res.returncode == 0, res.stderr
    # flag overrides the file value
    res = run_cli("prepare", "--config", str(cfg), "--n", "1", "--phases", "0",
                  "--out", str(tmp_path / "o2"), "--no-plot")
    assert res.returncode == 0, res.stderr
    dist = (tmp_path / "o2" / "distribution.csv").read_text().strip().splitlines()
    rows = [r for r in dist if not r.startswith("#")][1:]
    probs = np.array([float(r.split(",")[1]) for r in rows])
    assert probs[0] == pytest.approx(0.5)
    assert probs[1] == pytest.approx(0.5)


def test_sweep_instability_csv(tmp_path):
    res = run_cli("sweep-instability", "--method", "sideband", "--n", "2",
                  "--dphi", "0,0.4", "--samples", "4", "--grid", "8",
                  "--seed", "2", "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 0, res.stderr
    lines = (tmp_path / "instability.csv").read_text().strip().splitlines()
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "method,dphi,mean_contrast,mean_visibility,stderr"


def test_cat_visibility_outputs(tmp_path):
    res = run_cli("cat-visibility", "--weights", "0.5,0.9", "--out", str(tmp_path),
                  "--no-plot")
    assert res.returncode == 0, res.stderr
    lines = (tmp_path / "cat_metrics.csv").read_text().strip().splitlines()
    data = [l for l in lines if not l.startswith("#")][1:]
    first = data[0].split(",")
    assert float(first[4]) == pytest.approx(1.0)  # balanced visibility


def test_optimize_detection_outputs(tmp_path):
    res = run_cli("optimize-detection", "--n", "1", "--samples", "2", "--budget", "40",
                  "--grid", "8", "--seed", "4", "--out", str(tmp_path), "--no-plot")
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "detection_optimization.csv").exists()


def test_figures_rendered_by_default(tmp_path):
    res = run_cli("prepare", "--n", "1", "--phases", "0", "--samples", "1",
                  "--out", str(tmp_path))
    assert res.returncode == 0
    assert (tmp_path / "distribution.png").stat().st_size > 1000
