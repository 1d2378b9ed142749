#!/usr/bin/env python3
"""
Tests for grid_io
"""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from coefficients import build_coeff_table
from errors import InvalidGrid
from grid_io import GRID_HEADER, GridFile, read_convergence, write_convergence, write_grid_json, write_reports
from inversion import FieldTransforms, convergence_report, reconstruct_at_point
from phantoms import bandlimited_random, const1, cos3_nu
from sphere_geom import NORTH, as_unit
from transforms import transform_grid


@pytest.fixture(scope="module")
def grid():
    return transform_grid(bandlimited_random(3, 1).field, as_unit([0.0, 0.6, 0.8]), 8, 16, M=64)


def test_grid_round_trip(tmp_path, grid):
    path = tmp_path / "grid.csv"
    GridFile(path).write(grid, {"phantom": "bandlimited_random:L=3,seed=1"})
    back = GridFile(path).read()
    for label in ("nu_nodes", "tau_nodes", "Ff", "Cf", "Sf"):
        assert_array_equal(getattr(back, label), getattr(grid, label))
    assert_allclose(back.pole, grid.pole, atol=1e-15)
    assert back.M == 64
    assert back.meta["phantom"] == "bandlimited_random:L=3,seed=1"


def test_grid_layout(tmp_path, grid):
    path = tmp_path / "grid.csv"
    GridFile(path).write(grid)
    lines = path.read_text().splitlines()
    assert lines[0] == GRID_HEADER
    assert len(lines) == 1 + 8 * 16
    first, second = (np.array(line.split(","), dtype=float) for line in lines[1:3])
    assert first[0] == second[0]
    assert second[1] > first[1]
    sidecar = json.loads((tmp_path / "grid.json").read_text())
    assert sidecar["nu_count"] == 8
    assert sidecar["tau_count"] == 16
    assert sidecar["columns"] == ["nu", "tau", "Ff", "Cf", "Sf"]


def test_grid_files_are_byte_stable(tmp_path, grid):
    GridFile(tmp_path / "a.csv").write(grid, {"phantom": "x"})
    GridFile(tmp_path / "b.csv").write(grid, {"phantom": "x"})
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_read_without_sidecar(tmp_path):
    grid = transform_grid(const1().field, NORTH, 8, 8, M=16)
    path = tmp_path / "plain.csv"
    GridFile(path).write(grid)
    (tmp_path / "plain.json").unlink()
    back = GridFile(path).read()
    assert_array_equal(back.pole, NORTH)
    assert back.Ff.shape == (8, 8)


def test_read_errors(tmp_path):
    with pytest.raises(InvalidGrid):
        GridFile(tmp_path / "missing.csv").read()
    bad = tmp_path / "bad.csv"
    bad.write_text("nu,tau,Ff\n0.1,0,1\n")
    with pytest.raises(InvalidGrid):
        GridFile(bad).read()
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("nu,tau,Ff,Cf,Sf\n0.1,0,1,0,0\n0.2,0,1,0,0\n0.2,3.14,1,0,0\n")
    with pytest.raises(InvalidGrid):
        GridFile(ragged).read()


def test_grid_json(tmp_path, grid):
    path = tmp_path / "grid.json"
    write_grid_json(grid, path, {"phantom": "p"})
    data = json.loads(path.read_text())
    assert np.array(data["Cf"]).shape == (8, 16)
    assert data["phantom"] == "p"


def test_report_writers(tmp_path):
    table = build_coeff_table(4)
    data = FieldTransforms(cos3_nu().field)
    reports = [reconstruct_at_point(table, data, p, n=2, nu_count=64, tau_count=16)
               for p in (NORTH, -NORTH)]
    single = tmp_path / "one.json"
    write_reports(reports[:1], single)
    assert json.loads(single.read_text())["n_used"] == 2
    many = tmp_path / "many.json"
    write_reports(reports, many)
    assert len(json.loads(many.read_text())) == 2
    csv = tmp_path / "many.csv"
    write_reports(reports, csv, "csv")
    rows = np.genfromtxt(csv, delimiter=",", names=True)
    assert rows["estimate"] == pytest.approx([1.0, -1.0], abs=1e-8)
    assert list(rows.dtype.names) == ["x", "y", "z", "n_used", "estimate", "even_estimate",
                                      "odd_estimate", "cauchy_gap"]


def test_convergence_writers(tmp_path):
    conv = convergence_report(build_coeff_table(4), FieldTransforms(const1().field), NORTH, 3,
                              truth=1.0, nu_count=128, tau_count=16)
    path = tmp_path / "conv.csv"
    write_convergence(conv, path)
    assert path.read_text().splitlines()[1].startswith("1,")
    rows = read_convergence(path)
    assert list(rows["n"]) == [1, 2, 3]
    assert rows["estimate"] == pytest.approx([1.0, 1.0, 1.0], abs=1e-9)
    write_convergence(conv, tmp_path / "conv.json", "json")
    assert json.loads((tmp_path / "conv.json").read_text())["stop_reason"] == "n_max"


def test_convergence_json_is_strict_without_truth(tmp_path):
    conv = convergence_report(build_coeff_table(4), FieldTransforms(const1().field), NORTH, 2,
                              nu_count=128, tau_count=16)
    path = tmp_path / "conv.json"
    write_convergence(conv, path, "json")

    def reject(token):
        raise ValueError(f"non-standard token {token}")

    data = json.loads(path.read_text(), parse_constant=reject)
    assert [row["abs_error"] for row in data["rows"]] == [None, None]
    assert np.isnan(conv.rows[0]["abs_error"])
