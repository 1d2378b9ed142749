#!/usr/bin/env python3
"""
Verification
Invariant suites over phantoms, coefficient tables, transforms and the inversion pipeline
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from coefficients import build_coeff_table, identity_failures
from inversion import DEFAULT_PROFILE_NU, DEFAULT_PROFILE_TAU, FieldTransforms, abar_via_ode, \
    abar_via_representation, point_profiles, reconstruct_at_pole
from phantoms import (
    bandlimited_random, cos3_nu, cos_nu, mixed, phantom_catalog, random_directions, verify_phantom,
)
from quadrature import DEFAULT_CIRCLE_NODES
from sphere_geom import NORTH, alpha_angle
from transforms import even_odd_split, recurrence_residual, rotate_weighted, transform_values, weighted_cos_about
from utils import error, info, success

SUITE_ORDER = ("phantoms", "identities", "theorem3", "recurrence", "oracle", "evenness")

THEOREM3_TOL = 1e-10
EVEN_TOL = 1e-12
ODD_FUNK_TOL = 1e-11
ORACLE_TOL = 1e-6
GROUPED_TOL = 1e-9
ORACLE_NMAX = 12
RECURRENCE_STEPS = (2e-2, 1e-2, 5e-3, 2.5e-3)
RECURRENCE_RATIO = (3.5, 4.5)
RECURRENCE_FLOOR = 1e-10


@dataclass
class SuiteResult:
    """Outcome of one suite"""

    name: str
    passed: bool
    checks: int = 0
    failures: list = dataclass_field(default_factory=list)
    notes: list = dataclass_field(default_factory=list)


class Verifier:
    """Runs the invariant suites against one coefficient table"""

    def __init__(self, table=None, M=DEFAULT_CIRCLE_NODES, trials=100, seed=0,
                 nu_count=DEFAULT_PROFILE_NU, tau_count=DEFAULT_PROFILE_TAU, workers=1):
        """
        Initialize the verifier

        Args:
            table: CoeffTable (built with kmax 20 when omitted)
            M: Circle nodes
            trials: Random pairs or directions per randomized suite
            seed: Seed of the random draws
            nu_count: Profile nodes for the oracle suite
            tau_count: Azimuth nodes for the oracle suite
            workers: Thread count for profile fills
        """
        self.table = table or build_coeff_table(20)
        self.M = M
        self.trials = trials
        self.seed = seed
        self.nu_count = nu_count
        self.tau_count = tau_count
        self.workers = workers

    def run(self, suite="all"):
        """
        Run one suite or all of them

        Returns:
            List of SuiteResult in SUITE_ORDER
        """
        names = SUITE_ORDER if suite == "all" else (suite,)
        results = []
        for name in names:
            info(f"Running {name} suite...")
            results.append(getattr(self, f"check_{name}")())
        return results

    def check_phantoms(self):
        result = SuiteResult("phantoms", True)
        for phantom in phantom_catalog():
            report = verify_phantom(phantom, M=self.M, samples=self.trials, seed=self.seed)
            result.checks += 1
            result.failures.extend(f"{report.name}: {f}" for f in report.failures)
        result.passed = not result.failures
        return result

    def check_identities(self):
        failures = identity_failures(self.table)
        result = SuiteResult("identities", not failures, checks=2 * self.table.kmax - 1)
        result.failures = [f"{family} k={k}: sum is {value}" for family, k, value in failures]
        return result

    def check_theorem3(self):
        """C_Omega f(omega) = cos(alpha) Cf + sin(alpha) Sf over random (Omega, omega)"""
        rng = np.random.default_rng(self.seed)
        result = SuiteResult("theorem3", True)
        worst = 0.0
        for phantom in (mixed(), bandlimited_random(3, 1)):
            Omegas = random_directions(self.trials, rng)
            omegas = random_directions(self.trials, rng)
            _, Cf, Sf = transform_values(phantom.field, omegas, NORTH, self.M)
            for Omega, omega, c, s in zip(Omegas, omegas, Cf, Sf):
                direct = weighted_cos_about(phantom.field, omega, Omega, self.M)
                rotated = rotate_weighted(c, s, alpha_angle(omega, Omega, NORTH))
                deviation = abs(direct - rotated)
                worst = max(worst, deviation)
                result.checks += 1
                if deviation > THEOREM3_TOL:
                    result.failures.append(f"{phantom.name}: deviation {deviation:.3g} at Omega={Omega.tolist()}")
        result.notes.append(f"{result.checks - len(result.failures)}/{result.checks} within {THEOREM3_TOL:g}, "
                            f"worst {worst:.3g}")
        result.passed = not result.failures
        return result

    def check_recurrence(self, nu=0.7, tau=0.4):
        """Central-difference residuals of the recurrences shrink by ~4 per halving of h"""
        result = SuiteResult("recurrence", True)
        low, high = RECURRENCE_RATIO
        for phantom in (mixed(), bandlimited_random(4, 1)):
            for n in (1, 2, 3):
                residuals = [abs(recurrence_residual(phantom.field, NORTH, n, nu, tau, h=h, M=self.M))
                             for h in RECURRENCE_STEPS]
                for coarse, fine in zip(residuals[:-1], residuals[1:]):
                    result.checks += 1
                    if fine < RECURRENCE_FLOOR:
                        break
                    ratio = coarse / fine
                    if not low <= ratio <= high:
                        result.failures.append(f"{phantom.label} n={n}: ratio {ratio:.3f} outside [{low}, {high}]")
                result.notes.append(f"{phantom.label} n={n}: " + ", ".join(f"{r:.2e}" for r in residuals))
        result.passed = not result.failures
        return result

    def check_oracle(self):
        """Representation vs direct integration of abar_n(pi/2), and grouped vs term-wise sums"""
        result = SuiteResult("oracle", True)
        nmax = min(ORACLE_NMAX, 2 * self.table.kmax)
        for phantom in (cos3_nu(), cos_nu(), mixed(), bandlimited_random(4, 1)):
            profiles = point_profiles(FieldTransforms(phantom.field, M=self.M), NORTH,
                                      self.nu_count, self.tau_count, self.workers)
            ode = abar_via_ode(profiles, nmax)[:, -1]
            for n in range(nmax + 1):
                value = abar_via_representation(self.table, profiles, n)
                result.checks += 1
                if abs(value - ode[n]) > ORACLE_TOL * (1.0 + abs(value)):
                    result.failures.append(
                        f"{phantom.label}: abar_{n} representation {value:.12g} vs ODE {ode[n]:.12g}")
            for n in range(1, nmax // 2 + 1):
                report = reconstruct_at_pole(self.table, profiles, n=n)
                result.checks += 1
                if abs(report.grouped_sum - report.partial_sums[-1]) > GROUPED_TOL:
                    result.failures.append(f"{phantom.label}: grouped sum differs at n={n}")
        result.passed = not result.failures
        return result

    def check_evenness(self):
        """Ff(omega) = Ff(-omega) and the Funk transform of the odd part vanishes"""
        rng = np.random.default_rng(self.seed)
        omegas = random_directions(self.trials, rng)
        result = SuiteResult("evenness", True)
        for phantom in (bandlimited_random(3, 1), mixed()):
            Ff = transform_values(phantom.field, omegas, NORTH, self.M)[0]
            Ff_anti = transform_values(phantom.field, -omegas, NORTH, self.M)[0]
            odd = transform_values(even_odd_split(phantom.field)[1], omegas, NORTH, self.M)[0]
            result.checks += 2
            if np.max(np.abs(Ff - Ff_anti)) > EVEN_TOL:
                result.failures.append(f"{phantom.label}: Ff(omega) != Ff(-omega)")
            if np.max(np.abs(odd)) > ODD_FUNK_TOL:
                result.failures.append(f"{phantom.label}: Funk transform of the odd part is not zero")
        result.passed = not result.failures
        return result


def print_matrix(results):
    """Print the pass/fail matrix"""
    width = max(len(r.name) for r in results)
    for r in results:
        line = f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  ({r.checks} checks)"
        if r.passed:
            success(line)
        else:
            error(line)
        for note in r.notes:
            info(f"    {note}")
        for failure in r.failures[:10]:
            error(f"    {failure}")
    return all(r.passed for r in results)
