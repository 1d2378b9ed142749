#!/usr/bin/env python3
"""
Transforms
Funk transform, the two weighted Funk transforms and Fourier analysis of circle restrictions

Every transform samples the restriction f_omega(phi) at the periodic nodes of the
quadrature module, with phi = 0 at the projection of the pole on S_omega.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from errors import (
    DegenerateProjection, FunkError, InvalidGrid, NonuniformGrid, OutOfDomain, TooFewNodes, TransformError,
)
from quadrature import DEFAULT_CIRCLE_NODES, PeriodicSamples, periodic_nodes, periodic_trapezoid
from sphere_geom import (
    NORTH, TWO_PI, GreatCircleFrame, as_unit, azimuth_basis, frame_vectors,
    great_circle_frame, polar_coordinates, sph_to_vec,
)

SMOOTHNESS_TAGS = ("continuous", "C1", "analytic")
MIN_GRID_COUNT = 8
DEFAULT_FD_STEP = 1e-3


class SphereField:
    """Deterministic real function on the unit sphere"""

    def __init__(self, evaluator, smoothness="analytic", name=None):
        """
        Initialize the field

        Args:
            evaluator: Vectorised map from points of shape (..., 3) to values of shape (...)
            smoothness: One of SMOOTHNESS_TAGS
            name: Optional label used in error messages
        """
        if smoothness not in SMOOTHNESS_TAGS:
            raise ValueError(f"unknown smoothness tag {smoothness!r}")
        self.evaluator = evaluator
        self.smoothness = smoothness
        self.name = name or "field"

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        return np.broadcast_to(np.asarray(self.evaluator(points), dtype=float), points.shape[:-1])

    def __repr__(self):
        return f"SphereField({self.name!r}, smoothness={self.smoothness!r})"

    @classmethod
    def from_grid(cls, nu_nodes, tau_nodes, values, pole=NORTH, smoothness="continuous", name="grid"):
        """
        Field interpolating samples on a (nu, tau) grid

        Bilinear in (nu, tau) with periodic wrap in tau. Rows at nu = 0 and nu = pi are
        collapsed to their mean so that the pole value does not depend on tau.

        Args:
            nu_nodes: Increasing polar angles covering [0, pi]
            tau_nodes: Uniform azimuths 2 pi j / T
            values: Array of shape (len(nu_nodes), len(tau_nodes))
            pole: Pole of the coordinates

        Returns:
            SphereField
        """
        nu_nodes = np.asarray(nu_nodes, dtype=float)
        tau_nodes = np.asarray(tau_nodes, dtype=float)
        values = np.array(values, dtype=float)
        if values.shape != (nu_nodes.size, tau_nodes.size):
            raise InvalidGrid(f"values shape {values.shape} does not match the node counts")
        if abs(nu_nodes[0]) > 1e-12 or abs(nu_nodes[-1] - np.pi) > 1e-12:
            raise InvalidGrid("grid-backed fields must cover nu in [0, pi]")
        _check_uniform_tau(tau_nodes)
        values[0, :] = values[0, :].mean()
        values[-1, :] = values[-1, :].mean()
        wrapped = np.hstack([values, values[:, :1]])
        interpolator = RegularGridInterpolator(
            (nu_nodes, np.append(tau_nodes, TWO_PI)), wrapped, method="linear")
        pole = as_unit(pole)

        def evaluate(points):
            nu, tau = polar_coordinates(pole, points)
            flat = np.column_stack([np.ravel(nu), np.ravel(tau)])
            return interpolator(flat).reshape(np.shape(nu))

        return cls(evaluate, smoothness=smoothness, name=name)


def _check_uniform_tau(tau_nodes):
    count = tau_nodes.size
    expected = TWO_PI * np.arange(count) / count
    if count < 1 or np.max(np.abs(tau_nodes - expected)) > 1e-9:
        raise NonuniformGrid("azimuth nodes must be 2 pi j / T, j = 0..T-1")


@dataclass(frozen=True)
class CircleRestriction:
    """Samples of f along S_omega at the periodic nodes"""

    frame: GreatCircleFrame
    samples: PeriodicSamples

    @property
    def phi(self):
        return periodic_nodes(self.samples.M)


@dataclass(frozen=True)
class FourierProfile:
    """
    Fourier coefficients of a restriction

    a[0] is the mean (= Ff); a[n], b[n] for n >= 1 use the 1/pi normalisation.
    b[0] is always 0 so both arrays are indexed by harmonic order.
    """

    a: np.ndarray
    b: np.ndarray

    @property
    def nmax(self):
        return self.a.size - 1


@dataclass(frozen=True)
class TransformGrid:
    """Ff, Cf, Sf sampled on a (nu, tau) grid relative to a pole"""

    pole: np.ndarray
    nu_nodes: np.ndarray
    tau_nodes: np.ndarray
    Ff: np.ndarray
    Cf: np.ndarray
    Sf: np.ndarray
    M: int = DEFAULT_CIRCLE_NODES
    meta: dict = dataclass_field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pole", as_unit(self.pole))
        shape = (np.size(self.nu_nodes), np.size(self.tau_nodes))
        for label in ("Ff", "Cf", "Sf"):
            values = np.asarray(getattr(self, label), dtype=float)
            if values.shape != shape:
                raise InvalidGrid(f"{label} has shape {values.shape}, expected {shape}")
            if not np.all(np.isfinite(values)):
                raise InvalidGrid(f"{label} contains non-finite values")
            object.__setattr__(self, label, values)
        object.__setattr__(self, "nu_nodes", np.asarray(self.nu_nodes, dtype=float))
        object.__setattr__(self, "tau_nodes", np.asarray(self.tau_nodes, dtype=float))


def map_rows(worker, count, workers=1):
    """
    Evaluate worker(i) for i in range(count), optionally on a thread pool

    Results come back in index order regardless of the worker count.
    """
    if workers is None or workers <= 1:
        return [worker(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=int(workers)) as pool:
        return list(pool.map(worker, range(count)))


def circle_samples(field, omegas, pole, M=DEFAULT_CIRCLE_NODES):
    """
    Restriction samples for many circles at once

    Args:
        field: SphereField
        omegas: Circle poles, shape (K, 3)
        pole: Direction fixing phi = 0
        M: Circle node count

    Returns:
        Array of shape (K, M)
    """
    phi = periodic_nodes(M)
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    e_ref, e_quad = frame_vectors(omegas, pole)
    points = (np.cos(phi)[None, :, None] * e_ref[:, None, :]
              + np.sin(phi)[None, :, None] * e_quad[:, None, :])
    return field(points)


def fourier_arrays(values, nmax):
    """
    Fourier coefficients of periodic samples along the last axis

    Returns:
        Tuple (a, b) with trailing dimension nmax + 1
    """
    values = np.asarray(values, dtype=float)
    M = values.shape[-1]
    if M < 2 * nmax + 2:
        raise TooFewNodes(f"{M} nodes cannot resolve harmonic {nmax}")
    phi = periodic_nodes(M)
    orders = np.arange(nmax + 1)
    cos_table = np.cos(np.outer(phi, orders))
    sin_table = np.sin(np.outer(phi, orders))
    a = (2.0 / M) * values @ cos_table
    b = (2.0 / M) * values @ sin_table
    a[..., 0] *= 0.5
    b[..., 0] = 0.0
    return a, b


def transform_values(field, omegas, pole, M=DEFAULT_CIRCLE_NODES):
    """
    Ff, Cf, Sf for many circle poles relative to one pole

    Returns:
        Tuple of three arrays, one value per row of omegas
    """
    samples = circle_samples(field, omegas, pole, M)
    phi = periodic_nodes(M)
    return (samples.mean(axis=-1),
            samples @ np.cos(phi) / M,
            samples @ np.sin(phi) / M)


def restrict(field, omega, pole, M=DEFAULT_CIRCLE_NODES):
    """
    Restriction of a field to S_omega

    Args:
        field: SphereField
        omega: Pole of the circle
        pole: Direction whose projection is phi = 0
        M: Node count

    Returns:
        CircleRestriction
    """
    frame = great_circle_frame(omega, pole)
    points = frame.point(periodic_nodes(M))
    return CircleRestriction(frame=frame, samples=PeriodicSamples(field(points)))


def funk(field, omega, pole=NORTH, M=DEFAULT_CIRCLE_NODES):
    """
    Funk transform: normalized mean of f over S_omega

    The mean does not depend on where phi = 0 sits, so when omega is parallel to the
    pole the azimuth basis of omega supplies the origin instead.
    """
    omega = as_unit(omega)
    try:
        restriction = restrict(field, omega, pole, M)
    except DegenerateProjection:
        restriction = restrict(field, omega, azimuth_basis(omega)[0], M)
    return float(periodic_trapezoid(restriction.samples) / TWO_PI)


def weighted_cos(field, omega, pole=NORTH, M=DEFAULT_CIRCLE_NODES):
    """Cf(omega): normalized integral of cos(phi) f_omega(phi)"""
    restriction = restrict(field, omega, pole, M)
    weighted = PeriodicSamples(np.cos(restriction.phi) * restriction.samples.values)
    return float(periodic_trapezoid(weighted) / TWO_PI)


def weighted_sin(field, omega, pole=NORTH, M=DEFAULT_CIRCLE_NODES):
    """Sf(omega): normalized integral of sin(phi) f_omega(phi)"""
    restriction = restrict(field, omega, pole, M)
    weighted = PeriodicSamples(np.sin(restriction.phi) * restriction.samples.values)
    return float(periodic_trapezoid(weighted) / TWO_PI)


def weighted_cos_about(field, omega, Omega, M=DEFAULT_CIRCLE_NODES):
    """C_Omega f(omega): weighted cosine transform with phi = 0 at the projection of Omega"""
    return weighted_cos(field, omega, Omega, M)


def rotate_weighted(Cf, Sf, alpha):
    """C_Omega f = cos(alpha) Cf + sin(alpha) Sf"""
    return np.cos(alpha) * Cf + np.sin(alpha) * Sf


def fourier_coeffs(field, omega, pole=NORTH, nmax=8, M=DEFAULT_CIRCLE_NODES):
    """
    Fourier coefficients of the restriction f_omega

    Raises:
        TooFewNodes: If M < 2 nmax + 2
    """
    if M < 2 * nmax + 2:
        raise TooFewNodes(f"M={M} cannot resolve harmonic {nmax}")
    restriction = restrict(field, omega, pole, M)
    a, b = fourier_arrays(restriction.samples.values, nmax)
    return FourierProfile(a=a, b=b)


def fourier_partial_sum(profile, phi=0.0):
    """Partial Fourier sum of a restriction at phi; phi = 0 gives f at the reference point"""
    orders = np.arange(profile.nmax + 1)
    phi = np.asarray(phi, dtype=float)[..., None]
    return np.sum(profile.a * np.cos(orders * phi) + profile.b * np.sin(orders * phi), axis=-1)


def even_odd_split(field):
    """
    Even and odd parts under the antipodal map

    Returns:
        Tuple (f_plus, f_minus) of SphereFields with f_plus + f_minus = f
    """
    def even(points):
        return 0.5 * (field(points) + field(-points))

    def odd(points):
        return 0.5 * (field(points) - field(-points))

    return (SphereField(even, field.smoothness, f"{field.name}+"),
            SphereField(odd, field.smoothness, f"{field.name}-"))


def transform_nodes(nu_count, tau_count):
    """nu_i = (pi/2) i / nu_count for i = 1..nu_count and tau_j = 2 pi j / tau_count"""
    if nu_count < MIN_GRID_COUNT or tau_count < MIN_GRID_COUNT:
        raise InvalidGrid(f"grid counts must be >= {MIN_GRID_COUNT}, got {nu_count}x{tau_count}")
    nu_nodes = 0.5 * np.pi * np.arange(1, nu_count + 1) / nu_count
    tau_nodes = TWO_PI * np.arange(tau_count) / tau_count
    return nu_nodes, tau_nodes


def transform_grid(field, pole=NORTH, nu_count=32, tau_count=64, M=DEFAULT_CIRCLE_NODES, workers=1):
    """
    Fill Ff, Cf, Sf on a (nu, tau) grid relative to a pole

    Args:
        field: SphereField
        pole: Pole of the grid
        nu_count: Polar nodes in (0, pi/2]
        tau_count: Azimuth nodes in [0, 2 pi)
        M: Circle nodes per cell
        workers: Thread count for the row fill

    Returns:
        TransformGrid
    """
    pole = as_unit(pole)
    nu_nodes, tau_nodes = transform_nodes(nu_count, tau_count)

    def fill_row(i):
        omegas = sph_to_vec(pole, nu_nodes[i], tau_nodes)
        try:
            row = transform_values(field, omegas, pole, M)
        except FunkError as exc:
            raise TransformError(f"row {i} (nu={nu_nodes[i]:.6g}) of {field.name}: {exc}") from exc
        for label, values in zip(("Ff", "Cf", "Sf"), row):
            bad = np.flatnonzero(~np.isfinite(values))
            if bad.size:
                j = int(bad[0])
                raise TransformError(
                    f"{label} not finite at cell ({i}, {j}), omega={omegas[j].tolist()} of {field.name}")
        return row

    rows = map_rows(fill_row, nu_count, workers)
    Ff, Cf, Sf = (np.vstack([row[k] for row in rows]) for k in range(3))
    return TransformGrid(pole=pole, nu_nodes=nu_nodes, tau_nodes=tau_nodes, Ff=Ff, Cf=Cf, Sf=Sf, M=M)


def recurrence_residual(field, pole, n, nu, tau, h=DEFAULT_FD_STEP, M=DEFAULT_CIRCLE_NODES):
    """
    Residual of the consistency recurrences for the Fourier coefficients

    n = 1:  a2' + 2 a2 cot(nu) - 2 a0' - (b2)_tau / sin(nu)
    n > 1:  a_{n+1}' - a_{n-1}' + (n+1) a_{n+1} cot(nu) + (n-1) a_{n-1} cot(nu)
            - ((b_{n+1})_tau + (b_{n-1})_tau) / sin(nu)

    Derivatives in nu and tau are central differences of step h.

    Raises:
        OutOfDomain: For non-differentiable fields, n < 1 or nu outside (h, pi/2 - h)
    """
    if field.smoothness not in ("C1", "analytic"):
        raise OutOfDomain(f"{field.name} is tagged {field.smoothness!r}, recurrences need C1")
    if n < 1:
        raise OutOfDomain(f"recurrence order must be >= 1, got {n}")
    if not (h < nu < 0.5 * np.pi - h):
        raise OutOfDomain(f"nu={nu} must lie in ({h}, pi/2 - {h})")
    stencil = np.array([[nu, tau], [nu + h, tau], [nu - h, tau], [nu, tau + h], [nu, tau - h]])
    omegas = sph_to_vec(pole, stencil[:, 0], stencil[:, 1])
    a, b = fourier_arrays(circle_samples(field, omegas, pole, M), n + 1)
    d_nu = (a[1] - a[2]) / (2.0 * h)
    d_tau_b = (b[3] - b[4]) / (2.0 * h)
    cot, sin = np.cos(nu) / np.sin(nu), np.sin(nu)
    hi, lo = n + 1, n - 1
    if n == 1:
        return float(d_nu[2] + 2.0 * a[0, 2] * cot - 2.0 * d_nu[0] - d_tau_b[2] / sin)
    return float(d_nu[hi] - d_nu[lo] + hi * a[0, hi] * cot + lo * a[0, lo] * cot
                 - (d_tau_b[hi] + d_tau_b[lo]) / sin)
