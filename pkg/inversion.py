#!/usr/bin/env python3
"""
Inversion
Averaged profiles, averaged Fourier coefficients and point reconstruction from (Ff, Cf)

For a reconstruction point Omega the circles S_omega are parameterised by the polar
distance nu of omega from Omega and the azimuth tau. Averaging Ff and the weighted
transform C_Omega f over tau gives the profiles Fbar(nu), Cbar(nu); the averaged Fourier
coefficients abar_n(pi/2) of the restrictions then sum to 2 pi f(Omega).
"""

from dataclasses import asdict, dataclass, field as dataclass_field
from functools import cached_property

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import spsolve

from errors import DegenerateProjection, InsufficientProfile, NonuniformGrid, OutOfRange
from quadrature import (
    DEFAULT_CIRCLE_NODES, HALF_PI, ProfileGrid, cumulative_weighted_integral,
    spline_integral,
)
from sphere_geom import (
    DEGENERACY_TOL, NORTH, TWO_PI, alpha_angles, as_unit, polar_coordinates, sph_to_vec,
)
from transforms import map_rows, transform_nodes, transform_values

NODES_PER_HARMONIC = 16
DEFAULT_PROFILE_NU = 640
DEFAULT_PROFILE_TAU = 64
DEFAULT_AUTO_TOL = 1e-8
DEFAULT_AUTO_CAP = 20
JITTER_START = 1e-6
JITTER_LIMIT = 1e-2
TAIL_WINDOW = 5


@dataclass(frozen=True)
class AveragedProfiles:
    """
    Azimuthal averages of Ff and C_Omega f at polar distances nu in (0, pi/2]

    The node list must end at pi/2, where the series is evaluated.
    """

    nu_nodes: np.ndarray
    Fbar: np.ndarray
    Cbar: np.ndarray
    meta: dict = dataclass_field(default_factory=dict, compare=False)

    def __post_init__(self):
        nodes = np.asarray(self.nu_nodes, dtype=float)
        Fbar = np.asarray(self.Fbar, dtype=float)
        Cbar = np.asarray(self.Cbar, dtype=float)
        if not (nodes.shape == Fbar.shape == Cbar.shape) or nodes.ndim != 1:
            raise InsufficientProfile("profile nodes, Fbar and Cbar must have equal lengths")
        if not (np.all(np.isfinite(Fbar)) and np.all(np.isfinite(Cbar))):
            raise InsufficientProfile("averaged profiles contain non-finite values")
        if nodes.size < 2 or nodes[0] <= 0.0 or abs(nodes[-1] - HALF_PI) > 1e-12:
            raise InsufficientProfile("profile nodes must lie in (0, pi/2] and end at pi/2")
        for name, value in (("nu_nodes", nodes), ("Fbar", Fbar), ("Cbar", Cbar)):
            object.__setattr__(self, name, value)

    @property
    def size(self):
        return self.nu_nodes.size

    @property
    def F_half(self):
        return float(self.Fbar[-1])

    @property
    def C_half(self):
        return float(self.Cbar[-1])

    @cached_property
    def F_profile(self):
        return ProfileGrid(self.nu_nodes, self.Fbar)

    @cached_property
    def C_profile(self):
        # Cbar(0) = 0 is a known boundary value
        return ProfileGrid(np.concatenate(([0.0], self.nu_nodes)), np.concatenate(([0.0], self.Cbar)))

    def require(self, harmonic):
        """Raise InsufficientProfile when the nodes are too sparse for abar_harmonic"""
        needed = NODES_PER_HARMONIC * harmonic
        if self.size < needed:
            raise InsufficientProfile(
                f"harmonic {harmonic} needs at least {needed} profile nodes, have {self.size}")

    def max_harmonic(self):
        return self.size // NODES_PER_HARMONIC


def _azimuth_average(values):
    """Periodic trapezoid over the uniform tau axis (length 2 pi)"""
    values = np.asarray(values, dtype=float)
    return (TWO_PI / values.shape[-1]) * np.sum(values, axis=-1)


def _check_uniform(tau_nodes):
    count = np.size(tau_nodes)
    expected = TWO_PI * np.arange(count) / count
    if count < 1 or np.max(np.abs(np.asarray(tau_nodes) - expected)) > 1e-9:
        raise NonuniformGrid("tau nodes must be 2 pi j / T for j = 0..T-1")


def average_profiles(grid):
    """
    Fbar, Cbar of a transform grid about its own pole

    Args:
        grid: TransformGrid

    Returns:
        AveragedProfiles

    Raises:
        NonuniformGrid: If the tau nodes are not uniform over [0, 2 pi)
    """
    _check_uniform(grid.tau_nodes)
    return AveragedProfiles(
        grid.nu_nodes, _azimuth_average(grid.Ff), _azimuth_average(grid.Cf),
        meta={"source": "grid", "nu_count": grid.nu_nodes.size, "tau_count": grid.tau_nodes.size})


class FieldTransforms:
    """Transform data computed on demand from an analytic field"""

    kind = "field"

    def __init__(self, field, pole=NORTH, M=DEFAULT_CIRCLE_NODES):
        self.field = field
        self.pole = as_unit(pole)
        self.M = M

    def sample(self, omegas):
        """
        Ff, Cf, Sf relative to the data pole

        Returns:
            Tuple (Ff, Cf, Sf, spread) where spread is the interpolation spread (0 here)
        """
        Ff, Cf, Sf = transform_values(self.field, omegas, self.pole, self.M)
        return Ff, Cf, Sf, 0.0

    def direct_profiles(self, Omega, nu_count, tau_count):
        return None


class GridTransforms:
    """
    Transform data interpolated from a stored TransformGrid

    Cubic spline interpolation in (nu, tau) with periodic padding in tau; below the first
    stored nu the spline is extrapolated to the pole. The spline system is solved directly
    so the interpolant passes through the stored values. Circles with nu > pi/2 are read
    from their antipode:
    Ff(-w) = Ff(w), Cf(-w) = Cf(w), Sf(-w) = -Sf(w).
    """

    kind = "grid"
    PAD = 3

    def __init__(self, grid):
        _check_uniform(grid.tau_nodes)
        self.grid = grid
        self.pole = grid.pole
        pad = self.PAD
        tau = grid.tau_nodes
        tau_ext = np.concatenate((tau[-pad:] - TWO_PI, tau, tau[:pad] + TWO_PI))
        cubic = {"method": "cubic", "solver": spsolve} if grid.nu_nodes.size >= 4 else {"method": "linear"}
        self._interpolators = {}
        for label in ("Ff", "Cf", "Sf"):
            values = getattr(grid, label)
            padded = np.hstack((values[:, -pad:], values, values[:, :pad]))
            axes = (grid.nu_nodes, tau_ext)
            self._interpolators[label] = (
                RegularGridInterpolator(axes, padded, bounds_error=False, fill_value=None, **cubic),
                RegularGridInterpolator(axes, padded, method="linear", bounds_error=False, fill_value=None),
            )

    def sample(self, omegas):
        """
        Ff, Cf, Sf relative to the grid pole at arbitrary circle poles

        Returns:
            Tuple (Ff, Cf, Sf, spread) with spread = max |cubic - linear| over the samples
        """
        nu, tau = polar_coordinates(self.pole, omegas)
        flip = nu > HALF_PI
        nu = np.clip(np.where(flip, np.pi - nu, nu), 0.0, HALF_PI)
        tau = np.where(flip, np.mod(tau + np.pi, TWO_PI), tau)
        points = np.column_stack((np.ravel(nu), np.ravel(tau)))
        out, spread = [], 0.0
        for label in ("Ff", "Cf", "Sf"):
            smooth, rough = self._interpolators[label]
            values = smooth(points).reshape(nu.shape)
            spread = max(spread, float(np.max(np.abs(values - rough(points).reshape(nu.shape)))))
            out.append(values)
        out[2] = np.where(flip, -out[2], out[2])
        return out[0], out[1], out[2], spread

    def direct_profiles(self, Omega, nu_count, tau_count):
        """Exact averages when Omega is the grid pole and the node counts agree"""
        grid = self.grid
        if (np.array_equal(as_unit(Omega), grid.pole)
                and nu_count == grid.nu_nodes.size and tau_count == grid.tau_nodes.size):
            return average_profiles(grid)
        return None


def _jittered_circles(data, Omega, nu, tau_nodes):
    """Circle poles of one profile row, nudged in tau off the data pole axis"""
    taus = np.array(tau_nodes, dtype=float)
    omegas = sph_to_vec(Omega, nu, taus)
    bad = np.abs(omegas @ data.pole) >= 1.0 - DEGENERACY_TOL
    jittered = int(np.count_nonzero(bad))
    delta = JITTER_START
    while np.any(bad):
        if delta > JITTER_LIMIT:
            raise DegenerateProjection(f"could not move circle poles at nu={nu:.6g} off the data pole")
        taus = np.where(bad, taus + delta, taus)
        omegas = sph_to_vec(Omega, nu, taus)
        bad = np.abs(omegas @ data.pole) >= 1.0 - DEGENERACY_TOL
        delta *= 2.0
    return omegas, jittered


def point_profiles(data, Omega, nu_count=DEFAULT_PROFILE_NU, tau_count=DEFAULT_PROFILE_TAU, workers=1):
    """
    Omega-relative averaged profiles from pole-relative (Ff, Cf, Sf) data

    C_Omega f(omega) = cos(alpha) Cf(omega) + sin(alpha) Sf(omega), where alpha is the
    angle on S_omega from the projection of the data pole to the projection of Omega.
    When Omega is the data pole alpha is taken as exactly 0.

    Args:
        data: FieldTransforms or GridTransforms
        Omega: Reconstruction point
        nu_count: Profile nodes nu_i = (pi/2) i / nu_count
        tau_count: Azimuth nodes per profile node
        workers: Thread count for the row fill

    Returns:
        AveragedProfiles
    """
    Omega = as_unit(Omega)
    direct = data.direct_profiles(Omega, nu_count, tau_count)
    if direct is not None:
        return direct
    nu_nodes, tau_nodes = transform_nodes(nu_count, tau_count)
    at_pole = np.array_equal(Omega, data.pole)

    def fill_row(i):
        omegas, jittered = _jittered_circles(data, Omega, nu_nodes[i], tau_nodes)
        Ff, Cf, Sf, spread = data.sample(omegas)
        if at_pole:
            C_Omega = Cf
        else:
            alpha = alpha_angles(omegas, Omega, data.pole)
            C_Omega = np.cos(alpha) * Cf + np.sin(alpha) * Sf
        return _azimuth_average(Ff), _azimuth_average(C_Omega), spread, jittered

    rows = map_rows(fill_row, nu_count, workers)
    return AveragedProfiles(
        nu_nodes,
        np.array([row[0] for row in rows]),
        np.array([row[1] for row in rows]),
        meta={
            "source": data.kind,
            "nu_count": nu_count,
            "tau_count": tau_count,
            "interpolation_spread": max(row[2] for row in rows),
            "jittered_cells": sum(row[3] for row in rows),
        })


def abar_via_representation(table, profiles, n):
    """
    Averaged Fourier coefficient abar_n at pi/2 from the coefficient tables

    abar_0 = Fbar(pi/2), abar_1 = 2 Cbar(pi/2),
    abar_2k = 2 Fbar(pi/2) + integral sum_m c_m(2k) sin^{2m-1} u cos u Fbar(u) du,
    abar_{2k-1} = 2 Cbar(pi/2) + integral sum_m c_m(2k-1) sin^{2m} u cos u 2 Cbar(u) du

    Raises:
        OutOfRange: If n < 0 or n needs a row beyond the table
        InsufficientProfile: If the profile has fewer than 16 n nodes
    """
    if n < 0:
        raise OutOfRange(f"harmonic index must be >= 0, got {n}")
    profiles.require(n)
    if n == 0:
        return profiles.F_half
    if n == 1:
        return 2.0 * profiles.C_half
    k = (n + 1) // 2
    if k > table.kmax:
        raise OutOfRange(f"abar_{n} needs k={k} > kmax={table.kmax}")
    if n % 2 == 0:
        kernel = table.kernel(k, 0)
        weight = lambda u: kernel(np.sin(u)) * np.cos(u)
        return 2.0 * profiles.F_half + spline_integral(profiles.F_profile, weight)
    kernel = table.kernel(k, 1)
    weight = lambda u: 2.0 * kernel(np.sin(u)) * np.cos(u)
    return 2.0 * profiles.C_half + spline_integral(profiles.C_profile, weight)


def abar_via_ode(profiles, nmax):
    """
    Averaged coefficients abar_0..abar_nmax on the profile nodes by direct integration

    Iterates abar_{n+1}(nu) = abar_{n-1}(nu) - (2n / sin^{n+1} nu) integral_0^nu sin^n u cos u abar_{n-1}(u) du
    starting from 2 Fbar for the even chain and from abar_1 = 2 Cbar for the odd chain.
    Every abar_n with n >= 1 carries the boundary value abar_n(0) = 0 as a spline knot.

    Returns:
        Array of shape (nmax + 1, len(nu_nodes))
    """
    if nmax < 0:
        raise OutOfRange(f"nmax must be >= 0, got {nmax}")
    profiles.require(nmax)
    nodes = profiles.nu_nodes
    knotted = np.concatenate(([0.0], nodes))
    sines = np.sin(knotted[1:])
    rows = np.zeros((nmax + 1, nodes.size))
    rows[0] = profiles.Fbar
    if nmax >= 1:
        rows[1] = 2.0 * profiles.Cbar

    for start in (0, 1):
        previous = ProfileGrid(nodes, 2.0 * profiles.Fbar) if start == 0 else \
            ProfileGrid(knotted, np.concatenate(([0.0], rows[1])))
        for target in range(start + 2, nmax + 1, 2):
            order = target - 1
            G = cumulative_weighted_integral(previous, order).values
            G = G[-nodes.size:]
            below = previous.values[-nodes.size:]
            rows[target] = below - (2.0 * order / sines ** (order + 1)) * G
            previous = ProfileGrid(knotted, np.concatenate(([0.0], rows[target])))
    return rows


@dataclass
class ReconstructionReport:
    """Partial sums of the point-value series and their diagnostics"""

    point: list
    n_used: int
    partial_sums: list
    estimate: float
    even_estimate: float
    odd_estimate: float
    base_term: float
    odd_terms: list
    even_terms: list
    grouped_sum: float
    last_term: float
    cauchy_gap: float
    stop_reason: str
    truth: float = None
    abs_error: float = None
    meta: dict = dataclass_field(default_factory=dict)

    @property
    def gaps(self):
        sums = [self.base_term] + list(self.partial_sums)
        return [abs(b - a) for a, b in zip(sums[:-1], sums[1:])]

    def with_truth(self, truth):
        self.truth = float(truth)
        self.abs_error = abs(self.estimate - self.truth)
        return self

    def to_dict(self):
        data = asdict(self)
        data["cauchy_gaps"] = self.gaps
        return data


def grouped_partial_sum(table, profiles, n):
    """
    S_n = Fbar(pi/2) + n (2 Cbar(pi/2) + 2 Fbar(pi/2))
          + integral_0^{pi/2} [P_n^1(u) 2 Cbar(u) + P_n^0(u) Fbar(u)] cos u du
    """
    P1 = table.p_polynomial(n, 1)
    P0 = table.p_polynomial(n, 0)
    odd = spline_integral(
        profiles.C_profile, lambda u: 2.0 * P1(np.sin(u)) * np.cos(u))
    even = spline_integral(
        profiles.F_profile, lambda u: P0(np.sin(u)) * np.cos(u))
    return profiles.F_half + n * (2.0 * profiles.C_half + 2.0 * profiles.F_half) + odd + even


def reconstruct_at_pole(table, profiles, n=None, tol=None, cap=DEFAULT_AUTO_CAP, point=NORTH):
    """
    Reconstruct f at the profile pole from its averaged profiles

    S_j = Fbar(pi/2) + sum_{k<=j} (abar_{2k-1}(pi/2) + abar_{2k}(pi/2)) and the estimate
    is S_n / (2 pi). With n=None the series runs until |S_j - S_{j-1}| < tol or j
    reaches the cap, which is lowered to what the table and the profile density support.

    Args:
        table: CoeffTable
        profiles: AveragedProfiles
        n: Number of terms, or None for auto mode
        tol: Auto-mode Cauchy tolerance (default 1e-8)
        cap: Auto-mode term limit
        point: Reconstruction point recorded in the report

    Returns:
        ReconstructionReport
    """
    supported = min(table.kmax, profiles.max_harmonic() // 2)
    if n is not None:
        if not 1 <= n <= table.kmax:
            raise OutOfRange(f"n must lie in 1..{table.kmax}, got {n}")
        profiles.require(2 * n)
        limit, tol = n, None
    else:
        tol = DEFAULT_AUTO_TOL if tol is None else tol
        limit = min(cap, supported)
        if limit < 1:
            profiles.require(2)

    base = profiles.F_half
    sums, odd_terms, even_terms = [], [], []
    stop_reason = "fixed" if n is not None else "cap"
    previous = base
    for k in range(1, limit + 1):
        odd_terms.append(abar_via_representation(table, profiles, 2 * k - 1))
        even_terms.append(abar_via_representation(table, profiles, 2 * k))
        sums.append(previous + odd_terms[-1] + even_terms[-1])
        if tol is not None and abs(sums[-1] - previous) < tol:
            stop_reason = "tolerance"
            break
        previous = sums[-1]

    used = len(sums)
    if n is None and stop_reason == "cap" and limit < cap:
        stop_reason = "profile_limit" if limit == profiles.max_harmonic() // 2 else "kmax"
    return ReconstructionReport(
        point=as_unit(point).tolist(),
        n_used=used,
        partial_sums=sums,
        estimate=sums[-1] / TWO_PI,
        even_estimate=(base + sum(even_terms)) / TWO_PI,
        odd_estimate=sum(odd_terms) / TWO_PI,
        base_term=base,
        odd_terms=odd_terms,
        even_terms=even_terms,
        grouped_sum=grouped_partial_sum(table, profiles, used),
        last_term=abs(odd_terms[-1] + even_terms[-1]),
        cauchy_gap=abs(sums[-1] - (sums[-2] if used > 1 else base)),
        stop_reason=stop_reason,
        meta=dict(profiles.meta),
    )


def reconstruct_at_point(table, data, Omega, n=None, tol=None, cap=DEFAULT_AUTO_CAP,
                         nu_count=DEFAULT_PROFILE_NU, tau_count=DEFAULT_PROFILE_TAU, workers=1):
    """
    Reconstruct f(Omega) from pole-relative (Ff, Cf, Sf) data

    Builds the Omega-relative profiles with point_profiles and sums the series with
    reconstruct_at_pole.
    """
    profiles = point_profiles(data, Omega, nu_count, tau_count, workers)
    return reconstruct_at_pole(table, profiles, n=n, tol=tol, cap=cap, point=Omega)


def reconstruct_points(table, data, points, n=None, tol=None, cap=DEFAULT_AUTO_CAP,
                       nu_count=DEFAULT_PROFILE_NU, tau_count=DEFAULT_PROFILE_TAU, workers=1):
    """reconstruct_at_point for each point, in order"""
    return [reconstruct_at_point(table, data, p, n=n, tol=tol, cap=cap,
                                 nu_count=nu_count, tau_count=tau_count, workers=workers)
            for p in points]


@dataclass
class ConvergenceTable:
    """Estimates of the series for n = 1..n_max with convergence diagnostics"""

    point: list
    rows: list
    stop_reason: str
    gaps_decreasing: bool
    stagnated: bool
    meta: dict = dataclass_field(default_factory=dict)

    def column(self, name):
        return [row[name] for row in self.rows]


def convergence_report(table, data, Omega, n_max, truth=None, stop_tol=None,
                       nu_count=DEFAULT_PROFILE_NU, tau_count=DEFAULT_PROFILE_TAU, workers=1):
    """
    Estimate, error and Cauchy gap for every n up to n_max

    The partial sums are nested, so a single series evaluation yields the estimate
    for every n. With stop_tol the table ends at the first gap below it.

    Args:
        table: CoeffTable
        data: FieldTransforms or GridTransforms
        Omega: Reconstruction point
        n_max: Largest n (<= kmax)
        truth: Known f(Omega), or None
        stop_tol: Optional Cauchy stop tolerance

    Returns:
        ConvergenceTable
    """
    if not 1 <= n_max <= table.kmax:
        raise OutOfRange(f"n_max must lie in 1..{table.kmax}, got {n_max}")
    profiles = point_profiles(data, Omega, nu_count, tau_count, workers)
    report = reconstruct_at_pole(table, profiles, n=n_max, point=Omega)
    rows, stop_reason = [], "n_max"
    for j, (total, gap) in enumerate(zip(report.partial_sums, report.gaps), start=1):
        estimate = total / TWO_PI
        rows.append({
            "n": j,
            "estimate": estimate,
            "abs_error": float("nan") if truth is None else abs(estimate - truth),
            "cauchy_gap": gap,
        })
        if stop_tol is not None and gap < stop_tol:
            stop_reason = "tolerance"
            break

    gaps = [row["cauchy_gap"] for row in rows][-TAIL_WINDOW:]
    decreasing = len(gaps) > 1 and all(b < a for a, b in zip(gaps[:-1], gaps[1:]))
    return ConvergenceTable(
        point=as_unit(Omega).tolist(),
        rows=rows,
        stop_reason=stop_reason,
        gaps_decreasing=decreasing,
        stagnated=len(gaps) > 1 and not decreasing,
        meta=dict(profiles.meta),
    )
