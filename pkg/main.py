#!/usr/bin/env python3
"""
FunkInvert - Funk transform toolkit
Forward transforms of phantoms, coefficient tables, two-data inversion and invariant checks

Exit codes: 0 ok, 1 verification failure, 2 usage or configuration error, 3 compute error
"""

import argparse
import json
import sys

import numpy as np

from coefficients import DEFAULT_KMAX, build_coeff_table, coeff_table_to_dict, corrupt_table
from config import SUITES, ConfigManager
from errors import CoefficientOverflow, ConfigError, FunkError
from grid_io import GridFile, write_convergence, write_grid_json, write_reports
from inversion import TAIL_WINDOW, FieldTransforms, GridTransforms, convergence_report, reconstruct_points
from phantoms import get_phantom
from transforms import transform_grid
from utils import APP_NAME, display_banner, error, info, save_json, set_quiet, success, warn
from verify import Verifier, print_matrix

APP_VERSION = "1.0"

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_COMPUTE = 3

DEFAULT_GRID_OUTPUT = "funk_grid.csv"


class Application:
    """Command dispatcher"""

    def __init__(self):
        self.parser, self.subparsers = self.build_parser()

    def build_parser(self):
        """Create the argument parser and one sub-parser per command"""
        parser = argparse.ArgumentParser(
            prog="funkinvert",
            description=f"{APP_NAME} v{APP_VERSION} - Funk transform and two-data inversion on S^2",
        )
        parser.add_argument("--version", action="version", version=f"{APP_NAME} v{APP_VERSION}")
        parser.add_argument("--banner", action="store_true", help="Show the banner and exit")
        subparsers = parser.add_subparsers(dest="command", help="Command to execute")

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--config", help="key=value config file (flags override it)")
        common.add_argument("-o", "--output", help="Output file path")
        common.add_argument("--format", choices=("csv", "json"), help="Output format")
        common.add_argument("--circle-nodes", dest="circle_nodes", type=int,
                            help="Nodes per great circle (default: 256)")
        common.add_argument("-q", "--quiet", action="store_true", default=None, help="Hide progress lines")

        grid = argparse.ArgumentParser(add_help=False)
        grid.add_argument("--nu-steps", dest="nu_steps", type=int, help="Polar nodes in (0, pi/2]")
        grid.add_argument("--tau-steps", dest="tau_steps", type=int, help="Azimuth nodes in [0, 2 pi)")

        source = argparse.ArgumentParser(add_help=False)
        source.add_argument("--phantom", help="Phantom as name[:param=value,...]")
        source.add_argument("--input", help="Transform grid CSV written by forward")
        source.add_argument("--point", action="append", help="Reconstruction point x,y,z (repeatable)")
        source.add_argument("--max", dest="kmax", type=int, help=f"Coefficient table size (default: {DEFAULT_KMAX})")

        forward = subparsers.add_parser("forward", parents=[common, grid],
                                        help="Tabulate Ff, Cf, Sf of a phantom")
        forward.add_argument("--phantom", help="Phantom as name[:param=value,...]")
        forward.add_argument("--pole", help="Grid pole x,y,z (default: 0,0,1)")

        invert = subparsers.add_parser("invert", parents=[common, grid, source],
                                       help="Reconstruct point values")
        invert.add_argument("--n", type=int, help="Number of series terms")
        invert.add_argument("--auto", action="store_true", default=None, help="Stop on the Cauchy gap")
        invert.add_argument("--tol", type=float, help="Auto-mode tolerance (default: 1e-8)")
        invert.add_argument("--cap", type=int, help="Auto-mode term limit (default: 20)")

        coeffs = subparsers.add_parser("coeffs", parents=[common], help="Export the coefficient tables")
        coeffs.add_argument("--max", dest="kmax", type=int, help=f"Largest k (default: {DEFAULT_KMAX})")
        coeffs.add_argument("--p-samples", dest="p_samples", type=int,
                            help="Also sample P_n^0, P_n^1 at this many points")

        verify = subparsers.add_parser("verify", parents=[common, grid], help="Run the invariant suites")
        verify.add_argument("--suite", choices=SUITES, help="Suite to run (default: all)")
        verify.add_argument("--trials", type=int, help="Random trials per suite (default: 100)")
        verify.add_argument("--seed", type=int, help="Seed of the random draws (default: 0)")
        verify.add_argument("--max", dest="kmax", type=int, help=f"Coefficient table size (default: {DEFAULT_KMAX})")
        verify.add_argument("--corrupt", help=argparse.SUPPRESS)

        convergence = subparsers.add_parser("convergence", parents=[common, grid, source],
                                            help="Tabulate estimates against n")
        convergence.add_argument("--n", type=int, help="Largest n to report")
        convergence.add_argument("--stop-tol", dest="stop_tol", type=float,
                                 help="End the table at the first Cauchy gap below this")

        subs = {"forward": forward, "invert": invert, "coeffs": coeffs,
                "verify": verify, "convergence": convergence}
        return parser, subs

    def cmd_forward(self, config):
        """Write the Ff, Cf, Sf grid of a phantom"""
        phantom = get_phantom(config.phantom)
        info(f"Tabulating {phantom.label} on a {config.nu_steps}x{config.tau_steps} grid (M={config.circle_nodes})...")
        grid = transform_grid(phantom.field, np.array(config.pole), config.nu_steps, config.tau_steps,
                              config.circle_nodes, config.workers)
        output = config.output or (DEFAULT_GRID_OUTPUT if config.format == "csv" else "funk_grid.json")
        meta = {"phantom": phantom.label, "smoothness": phantom.field.smoothness}
        if config.format == "csv":
            GridFile(output).write(grid, meta)
        else:
            write_grid_json(grid, output, meta)
        success(f"Transform grid written to {output}")
        return EXIT_OK

    def _data_source(self, config):
        """Transform data, truth evaluator and profile grid counts of a run"""
        if config.input is not None:
            grid = GridFile(config.input).read()
            info(f"Loaded {grid.nu_nodes.size}x{grid.tau_nodes.size} grid from {config.input}")
            return GridTransforms(grid), None, config.nu_steps, config.tau_steps
        phantom = get_phantom(config.phantom)
        return FieldTransforms(phantom.field, M=config.circle_nodes), phantom.truth, config.nu_steps, config.tau_steps

    def cmd_invert(self, config):
        """Reconstruct f at each requested point"""
        table = build_coeff_table(config.kmax)
        data, truth, nu, tau = self._data_source(config)
        info(f"Reconstructing {len(config.points)} point(s) from {nu}x{tau} profiles...")
        reports = reconstruct_points(
            table, data, [np.array(p) for p in config.points], n=config.n,
            tol=config.tol if config.auto else None, cap=config.cap,
            nu_count=nu, tau_count=tau, workers=config.workers)
        for report in reports:
            if truth is not None:
                report.with_truth(float(truth(np.array(report.point))))
            line = (f"f({', '.join(f'{c:.6g}' for c in report.point)}) = {report.estimate:.15g} "
                    f"(n={report.n_used}, gap={report.cauchy_gap:.2e}, stop={report.stop_reason})")
            success(line)
            if report.stop_reason == "profile_limit" and report.cauchy_gap >= config.tol:
                warn(f"    profile too coarse for more terms; raise --nu-steps (gap {report.cauchy_gap:.2e})")
            if report.abs_error is not None:
                info(f"    error against truth {report.abs_error:.3e}")
        if config.output:
            write_reports(reports, config.output, config.format)
            success(f"Report written to {config.output}")
        return EXIT_OK

    def cmd_coeffs(self, config):
        """Export the exact coefficient tables"""
        table = build_coeff_table(config.kmax)
        data = coeff_table_to_dict(table, config.p_samples)
        verified = data["metadata"]["identities"]["verified"]
        (success if verified else warn)(
            f"Coefficient tables up to k={table.kmax}; identity sums {'verified' if verified else 'FAILED'}")
        if config.output:
            save_json(data, config.output)
            success(f"Coefficients written to {config.output}")
        else:
            print(json.dumps(data, indent=2, sort_keys=True))
        return EXIT_OK

    def cmd_verify(self, config):
        """Run the invariant suites; exit 1 on any failure"""
        table = build_coeff_table(config.kmax)
        if config.corrupt is not None:
            warn(f"Corrupting c_{config.corrupt[1]}({2 * config.corrupt[0]}) for a negative control")
            table = corrupt_table(table, *config.corrupt)
        verifier = Verifier(table, M=config.circle_nodes, trials=config.trials, seed=config.seed,
                            workers=config.workers,
                            **{k: v for k, v in (("nu_count", config.nu_steps), ("tau_count", config.tau_steps))
                               if v is not None})
        results = verifier.run(config.suite)
        passed = print_matrix(results)
        if config.output:
            save_json([{"name": r.name, "passed": r.passed, "checks": r.checks,
                        "failures": r.failures, "notes": r.notes} for r in results], config.output)
        if passed:
            success("All suites passed")
            return EXIT_OK
        error("Verification failed")
        return EXIT_VERIFY

    def cmd_convergence(self, config):
        """Tabulate estimate, error and Cauchy gap against n"""
        table = build_coeff_table(config.kmax)
        data, truth, nu, tau = self._data_source(config)
        point = np.array(config.points[0])
        known = float(truth(point)) if truth is not None else None
        conv = convergence_report(table, data, point, config.n, truth=known, stop_tol=config.stop_tol,
                                  nu_count=nu, tau_count=tau, workers=config.workers)
        for row in conv.rows:
            info(f"n={row['n']:>3}  estimate={row['estimate']:.15g}  "
                 f"error={row['abs_error']:.3e}  gap={row['cauchy_gap']:.3e}")
        if conv.gaps_decreasing:
            success(f"Cauchy gap decreasing over the last {min(TAIL_WINDOW, len(conv.rows))} rows")
        elif conv.stagnated:
            warn("Cauchy gap not decreasing over the last rows (stagnation flagged)")
        else:
            info("Too few rows to judge the Cauchy gap")
        if config.output:
            write_convergence(conv, config.output, config.format)
            success(f"Convergence table written to {config.output}")
        return EXIT_OK

    def run(self, argv=None):
        """
        Parse arguments, build the configuration and dispatch

        Returns:
            Exit code
        """
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

        if args.banner or args.command is None:
            display_banner()
            if args.command is None:
                self.parser.print_help()
                return EXIT_OK if args.banner else EXIT_USAGE

        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "banner")}
        try:
            config = ConfigManager.build(args.command, flags, args.config)
        except ConfigError as exc:
            print(self.subparsers[args.command].format_usage(), end="")
            error(str(exc))
            return EXIT_USAGE
        set_quiet(config.quiet)

        try:
            return getattr(self, f"cmd_{config.command}")(config)
        except CoefficientOverflow as exc:
            error(f"{exc} (k reached: {exc.k_reached})")
        except FunkError as exc:
            error(f"{type(exc).__name__}: {exc}")
        except OSError as exc:
            error(f"I/O error: {exc}")
        return EXIT_COMPUTE


def main(argv=None):
    """Entry point"""
    return Application().run(argv)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        error("Operation cancelled by user.")
        sys.exit(1)
