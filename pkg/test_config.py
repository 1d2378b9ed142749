#!/usr/bin/env python3
"""
Tests for config
"""

import pytest

from config import THREADS_ENV, ConfigManager
from errors import ConfigError


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)


def test_forward_defaults():
    config = ConfigManager.build("forward", {"phantom": "const1"})
    assert (config.nu_steps, config.tau_steps) == (32, 64)
    assert config.format == "csv"
    assert config.pole == (0.0, 0.0, 1.0)
    assert config.circle_nodes == 256
    assert config.workers == 1


def test_invert_defaults():
    config = ConfigManager.build("invert", {"phantom": "cos3_nu", "n": 2, "point": None})
    assert config.points == ((0.0, 0.0, 1.0),)
    assert (config.nu_steps, config.tau_steps) == (640, 64)
    assert config.format == "json"
    assert config.kmax == 20
    assert config.cap == 20


def test_invert_with_input_uses_profile_defaults(tmp_path):
    grid = tmp_path / "grid.csv"
    grid.write_text("nu,tau,Ff,Cf,Sf\n")
    config = ConfigManager.build("invert", {"input": str(grid), "auto": True})
    assert config.nu_steps == 640
    assert config.tau_steps == 64
    config = ConfigManager.build("convergence", {"input": str(grid), "n": 3, "nu_steps": 128})
    assert config.nu_steps == 128
    assert config.tau_steps == 64


def test_points_are_normalized():
    config = ConfigManager.build("invert", {"phantom": "mixed", "n": 1, "point": ["0,0,2", "3,0,4"]})
    assert config.points == ((0.0, 0.0, 1.0), (0.6, 0.0, 0.8))


def test_config_file_and_flag_precedence(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("phantom=cos3_nu\nn=3\npoint=1,0,0\ntau_steps=32\n")
    config = ConfigManager.build("invert", {"n": 2}, str(path))
    assert config.phantom == "cos3_nu"
    assert config.n == 2
    assert config.points == ((1.0, 0.0, 0.0),)
    assert config.tau_steps == 32
    assert config.nu_steps == 640


def test_config_file_errors(tmp_path):
    path = tmp_path / "bad.env"
    path.write_text("phantom=const1\ncolour=red\n")
    with pytest.raises(ConfigError, match="colour"):
        ConfigManager.build("forward", {}, str(path))
    with pytest.raises(ConfigError):
        ConfigManager.build("forward", {}, str(tmp_path / "missing.env"))


def test_thread_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert ConfigManager.build("coeffs", {}).workers == 3
    for bad in ("0", "many"):
        monkeypatch.setenv(THREADS_ENV, bad)
        with pytest.raises(ConfigError):
            ConfigManager.thread_count()


@pytest.mark.parametrize("command, flags", [
    ("forward", {}),
    ("forward", {"phantom": "nope"}),
    ("invert", {"phantom": "const1"}),
    ("invert", {"phantom": "const1", "n": 2, "auto": True}),
    ("invert", {"phantom": "const1", "input": "grid.csv", "n": 2}),
    ("invert", {"phantom": "const1", "n": 21}),
    ("invert", {"phantom": "const1", "n": 2, "point": ["1,2"]}),
    ("invert", {"phantom": "const1", "auto": True, "tol": 0.0}),
    ("invert", {"input": "does-not-exist.csv", "n": 2}),
    ("convergence", {"phantom": "bump"}),
    ("forward", {"phantom": "const1", "nu_steps": 4}),
    ("forward", {"phantom": "const1", "circle_nodes": 255}),
    ("coeffs", {"format": "csv"}),
    ("coeffs", {"kmax": 0}),
    ("coeffs", {"kmax": 401}),
    ("verify", {"suite": "everything"}),
    ("verify", {"corrupt": "two"}),
    ("verify", {"trials": 0}),
    ("forward", {"phantom": "const1", "output": "/no/such/dir/grid.csv"}),
    ("scan", {}),
])
def test_invalid_settings(command, flags):
    with pytest.raises(ConfigError):
        ConfigManager.build(command, flags)


def test_cap_follows_small_tables():
    config = ConfigManager.build("coeffs", {"kmax": 2})
    assert config.cap == 2
    with pytest.raises(ConfigError):
        ConfigManager.build("invert", {"phantom": "const1", "auto": True, "kmax": 5, "cap": 6})


def test_verify_corrupt_pair():
    config = ConfigManager.build("verify", {"suite": "identities", "corrupt": "2,1"})
    assert config.corrupt == (2, 1)
    assert config.format == "json"
