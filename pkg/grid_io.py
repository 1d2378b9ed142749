#!/usr/bin/env python3
"""
Grid I/O
Transform grids as CSV with a JSON sidecar, plus report, coefficient and convergence writers

Numbers are written with 17 significant digits so a written grid reads back bit for bit.
"""

from pathlib import Path

import numpy as np

from errors import InvalidGrid
from sphere_geom import NORTH
from transforms import TransformGrid
from utils import load_json, save_json

GRID_HEADER = "nu,tau,Ff,Cf,Sf"
REPORT_HEADER = "x,y,z,n_used,estimate,even_estimate,odd_estimate,cauchy_gap"
CONVERGENCE_HEADER = "n,estimate,abs_error,cauchy_gap"
FLOAT_FORMAT = "%.17g"
FORMAT_VERSION = 1


class GridFile:
    """A transform grid stored as ``name.csv`` with its sidecar ``name.json``"""

    def __init__(self, path):
        """
        Initialize the grid file

        Args:
            path: Path of the CSV file
        """
        self.path = Path(path)
        self.sidecar_path = self.path.with_suffix(".json")

    def write(self, grid, meta=None):
        """
        Write the grid rows (tau varying fastest) and the sidecar

        Args:
            grid: TransformGrid
            meta: Extra sidecar entries such as the phantom label
        """
        nu, tau = np.meshgrid(grid.nu_nodes, grid.tau_nodes, indexing="ij")
        table = np.column_stack([a.ravel() for a in (nu, tau, grid.Ff, grid.Cf, grid.Sf)])
        np.savetxt(self.path, table, fmt=FLOAT_FORMAT, delimiter=",", header=GRID_HEADER, comments="")
        sidecar = {
            "format_version": FORMAT_VERSION,
            "pole": grid.pole.tolist(),
            "nu_count": int(grid.nu_nodes.size),
            "tau_count": int(grid.tau_nodes.size),
            "M": int(grid.M),
            "columns": GRID_HEADER.split(","),
        }
        sidecar.update(meta or {})
        save_json(sidecar, self.sidecar_path)

    def read(self):
        """
        Read a grid back

        Without a sidecar the pole defaults to (0, 0, 1) and the node counts are taken
        from the distinct nu values.

        Returns:
            TransformGrid

        Raises:
            InvalidGrid: If the file is missing or its rows do not form a full grid
        """
        if not self.path.exists():
            raise InvalidGrid(f"grid file not found: {self.path}")
        try:
            table = np.loadtxt(self.path, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as exc:
            raise InvalidGrid(f"cannot parse {self.path}: {exc}") from exc
        if table.shape[1] != 5:
            raise InvalidGrid(f"{self.path} has {table.shape[1]} columns, expected 5 ({GRID_HEADER})")

        sidecar = load_json(self.sidecar_path) if self.sidecar_path.exists() else {}
        nu_count = int(sidecar.get("nu_count", np.unique(table[:, 0]).size))
        tau_count = int(sidecar.get("tau_count", table.shape[0] // max(nu_count, 1)))
        if nu_count * tau_count != table.shape[0]:
            raise InvalidGrid(f"{table.shape[0]} rows do not form a {nu_count}x{tau_count} grid")

        columns = [table[:, c].reshape(nu_count, tau_count) for c in range(5)]
        nu, tau = columns[0], columns[1]
        if np.any(nu != nu[:, :1]) or np.any(tau != tau[:1, :]):
            raise InvalidGrid(f"{self.path} rows are not ordered with tau varying fastest")
        return TransformGrid(
            pole=sidecar.get("pole", NORTH),
            nu_nodes=nu[:, 0],
            tau_nodes=tau[0],
            Ff=columns[2],
            Cf=columns[3],
            Sf=columns[4],
            M=int(sidecar.get("M", 256)),
            meta={k: v for k, v in sidecar.items() if k not in ("pole", "nu_count", "tau_count", "M")},
        )


def write_grid_json(grid, path, meta=None):
    """Grid as a single JSON document with nested row arrays"""
    data = {
        "format_version": FORMAT_VERSION,
        "pole": grid.pole.tolist(),
        "nu_nodes": grid.nu_nodes.tolist(),
        "tau_nodes": grid.tau_nodes.tolist(),
        "Ff": grid.Ff.tolist(),
        "Cf": grid.Cf.tolist(),
        "Sf": grid.Sf.tolist(),
        "M": int(grid.M),
    }
    data.update(meta or {})
    save_json(data, path)


def _report_row(report):
    return [*report.point, report.n_used, report.estimate, report.even_estimate,
            report.odd_estimate, report.cauchy_gap]


def write_reports(reports, path, fmt="json"):
    """
    Write reconstruction reports

    JSON holds a single object for one report and an array otherwise; CSV holds one
    line per reconstruction point.
    """
    if fmt == "csv":
        table = np.array([_report_row(r) for r in reports], dtype=float)
        np.savetxt(path, table, fmt=FLOAT_FORMAT, delimiter=",", header=REPORT_HEADER, comments="")
        return
    data = [r.to_dict() for r in reports]
    save_json(data[0] if len(data) == 1 else data, path)


def write_convergence(table, path, fmt="csv"):
    """Convergence rows as CSV (n, estimate, abs_error, cauchy_gap) or JSON with diagnostics"""
    if fmt == "json":
        save_json({
            "point": table.point,
            "rows": [{key: None if isinstance(value, float) and np.isnan(value) else value
                      for key, value in row.items()} for row in table.rows],
            "stop_reason": table.stop_reason,
            "gaps_decreasing": table.gaps_decreasing,
            "stagnated": table.stagnated,
            "meta": table.meta,
        }, path)
        return
    data = np.array([[r["n"], r["estimate"], r["abs_error"], r["cauchy_gap"]] for r in table.rows])
    np.savetxt(path, data, fmt=["%d", FLOAT_FORMAT, FLOAT_FORMAT, FLOAT_FORMAT],
               delimiter=",", header=CONVERGENCE_HEADER, comments="")


def read_convergence(path):
    """Rows of a convergence CSV as a structured array with named columns"""
    return np.genfromtxt(path, delimiter=",", names=True)
