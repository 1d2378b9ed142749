#!/usr/bin/env python3
"""
Tests for the command line
"""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from config import THREADS_ENV
from grid_io import GridFile, read_convergence
from main import main


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)


def run(*args):
    return main([str(a) for a in args])


def test_no_command_shows_help(capsys):
    assert run() == 2
    assert "usage" in capsys.readouterr().out
    assert run("--banner") == 0


def test_unknown_flag_is_usage_error():
    assert run("invert", "--bogus") == 2


def test_forward_constant(tmp_path):
    out = tmp_path / "grid.csv"
    assert run("forward", "--phantom", "const1", "--nu-steps", 8, "--tau-steps", 8,
               "--circle-nodes", 16, "-o", out, "-q") == 0
    grid = GridFile(out).read()
    assert_allclose(grid.Ff, 1.0, atol=1e-14)
    sidecar = json.loads((tmp_path / "grid.json").read_text())
    assert sidecar["phantom"] == "const1"


def test_forward_cos3(tmp_path):
    out = tmp_path / "cos3.csv"
    assert run("forward", "--phantom", "cos3_nu", "-o", out) == 0
    grid = GridFile(out).read()
    assert grid.Cf.shape == (32, 64)
    assert_allclose(grid.Cf, 0.375 * np.sin(grid.nu_nodes)[:, None] ** 3 * np.ones((1, 64)), atol=1e-11)


def test_forward_json(tmp_path):
    out = tmp_path / "grid.json"
    assert run("forward", "--phantom", "mixed", "--nu-steps", 8, "--tau-steps", 8,
               "--format", "json", "-o", out) == 0
    assert np.array(json.loads(out.read_text())["Ff"]).shape == (8, 8)


def test_missing_source_is_usage_error(capsys):
    assert run("invert", "--n", 2) == 2
    assert "missing --phantom or --input" in capsys.readouterr().out
    assert run("forward") == 2


def test_invert_cos3(tmp_path):
    out = tmp_path / "report.json"
    assert run("invert", "--phantom", "cos3_nu", "--n", 2, "--nu-steps", 64, "--tau-steps", 16, "-o", out) == 0
    report = json.loads(out.read_text())
    assert report["estimate"] == pytest.approx(1.0, abs=1e-8)
    assert report["truth"] == pytest.approx(1.0)
    assert report["stop_reason"] == "fixed"


def test_invert_several_points_csv(tmp_path):
    out = tmp_path / "points.csv"
    assert run("invert", "--phantom", "const1", "--n", 5, "--nu-steps", 160, "--tau-steps", 16,
               "--point", "0,0,1", "--point", "1,0,0", "--format", "csv", "-o", out) == 0
    rows = np.genfromtxt(out, delimiter=",", names=True)
    assert_allclose(rows["estimate"], [1.0, 1.0], atol=1e-7)
    assert_allclose(rows["n_used"], [5, 5])


def test_invert_auto(tmp_path):
    out = tmp_path / "auto.json"
    assert run("invert", "--phantom", "cos3_nu", "--auto", "--nu-steps", 128, "--tau-steps", 16, "-o", out) == 0
    report = json.loads(out.read_text())
    assert report["stop_reason"] == "tolerance"
    assert report["n_used"] == 3


def test_invert_compute_error():
    assert run("invert", "--phantom", "const1", "--n", 5, "--nu-steps", 64, "--tau-steps", 16) == 3


def test_forward_then_invert(tmp_path):
    grid = tmp_path / "grid.csv"
    assert run("forward", "--phantom", "cos3_nu", "--nu-steps", 128, "--tau-steps", 64, "-o", grid) == 0
    out = tmp_path / "report.json"
    assert run("invert", "--input", grid, "--n", 2, "--nu-steps", 128, "--tau-steps", 64, "-o", out) == 0
    report = json.loads(out.read_text())
    assert report["estimate"] == pytest.approx(1.0, abs=1e-8)
    assert report["meta"]["source"] == "grid"
    assert report["truth"] is None


@pytest.mark.parametrize("kmax", [2, 3, 4])
def test_coeffs(tmp_path, kmax):
    out = tmp_path / "coeffs.json"
    assert run("coeffs", "--max", kmax, "-o", out) == 0
    data = json.loads(out.read_text())
    assert sorted(data["even"], key=int) == [str(2 * k) for k in range(1, kmax + 1)]
    assert data["metadata"]["identities"]["verified"] is True
    assert data["even"]["4"] == [[8, 1], [-24, 1]]


def test_coeffs_to_stdout(capsys):
    assert run("coeffs", "--max", 2, "--p-samples", 3) == 0
    out = capsys.readouterr().out
    assert '"even"' in out
    assert '"P"' in out


def test_coeffs_rejects_csv():
    assert run("coeffs", "--format", "csv") == 2


def test_verify_identities(tmp_path):
    out = tmp_path / "verify.json"
    assert run("verify", "--suite", "identities", "-o", out) == 0
    results = json.loads(out.read_text())
    assert results[0]["name"] == "identities"
    assert results[0]["passed"] is True


def test_verify_negative_control():
    assert run("verify", "--suite", "identities", "--corrupt", "2,1") == 1


def test_verify_theorem3():
    assert run("verify", "--suite", "theorem3", "--trials", 20) == 0


def test_convergence_csv(tmp_path):
    out = tmp_path / "conv.csv"
    assert run("convergence", "--phantom", "const1", "--n", 3, "--nu-steps", 128, "--tau-steps", 16,
               "-o", out) == 0
    rows = read_convergence(out)
    assert list(rows["n"]) == [1, 2, 3]
    assert_allclose(rows["abs_error"], 0.0, atol=1e-8)


def test_convergence_needs_n():
    assert run("convergence", "--phantom", "const1") == 2


def test_config_file(tmp_path):
    config = tmp_path / "run.env"
    config.write_text("phantom=cos3_nu\nn=2\nnu_steps=64\ntau_steps=16\n")
    out = tmp_path / "report.json"
    assert run("invert", "--config", config, "-o", out) == 0
    assert json.loads(out.read_text())["estimate"] == pytest.approx(1.0, abs=1e-8)


def test_forward_then_invert_auto_with_default_counts(tmp_path):
    grid = tmp_path / "grid.csv"
    assert run("forward", "--phantom", "cos3_nu", "-o", grid) == 0
    out = tmp_path / "report.json"
    assert run("invert", "--input", grid, "--auto", "-o", out) == 0
    report = json.loads(out.read_text())
    assert report["meta"]["nu_count"] == 640
    assert report["n_used"] > 1
    assert report["stop_reason"] != "profile_limit"
    assert report["estimate"] == pytest.approx(1.0, abs=1e-2)


def test_invert_from_grid_off_pole(tmp_path):
    grid = tmp_path / "grid.csv"
    assert run("forward", "--phantom", "cos3_nu", "--nu-steps", 128, "--tau-steps", 64, "-o", grid) == 0
    out = tmp_path / "report.json"
    assert run("invert", "--input", grid, "--point", "0.6,0,0.8", "--n", 2, "-o", out) == 0
    report = json.loads(out.read_text())
    assert report["estimate"] == pytest.approx(0.8 ** 3, abs=1e-6)
    assert report["meta"]["source"] == "grid"
    assert 0.0 < report["meta"]["interpolation_spread"] < 1e-2


def test_convergence_single_row_message(capsys):
    assert run("convergence", "--phantom", "cos3_nu", "--n", 1, "--nu-steps", 128, "--tau-steps", 16) == 0
    out = capsys.readouterr().out
    assert "Too few rows" in out
    assert "decreasing over" not in out
