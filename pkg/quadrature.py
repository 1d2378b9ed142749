#!/usr/bin/env python3
"""
Quadrature
Periodic trapezoid rule for circle integrals and Gauss-Legendre rules for profile integrals
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import make_interp_spline

from errors import InvalidExponent, InvalidInterval, TooFewNodes

DEFAULT_CIRCLE_NODES = 256
DEFAULT_GL_ORDER = 128
POINTS_PER_INTERVAL = 8
SPLINE_DEGREE = 5
HALF_PI = 0.5 * np.pi


def periodic_nodes(M):
    """
    Equiangular circle nodes phi_j = -pi + 2 pi j / M

    Raises:
        TooFewNodes: If M < 4 or M is odd
    """
    M = int(M)
    if M < 4:
        raise TooFewNodes(f"periodic rule needs at least 4 nodes, got {M}")
    if M % 2:
        raise TooFewNodes(f"periodic rule needs an even node count, got {M}")
    return -np.pi + 2.0 * np.pi * np.arange(M) / M


@dataclass(frozen=True)
class PeriodicSamples:
    """Samples at periodic_nodes(M) along the last axis"""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        periodic_nodes(values.shape[-1] if values.ndim else 0)
        object.__setattr__(self, "values", values)

    @property
    def M(self):
        return self.values.shape[-1]


def periodic_trapezoid(samples):
    """
    (2 pi / M) * sum of samples over the last axis

    Exact for trigonometric polynomials of degree < M/2.
    """
    return (2.0 * np.pi / samples.M) * np.sum(samples.values, axis=-1)


@lru_cache(maxsize=32)
def _legendre_rule(order):
    knots, weights = np.polynomial.legendre.leggauss(order)
    knots.setflags(write=False)
    weights.setflags(write=False)
    return knots, weights


def gauss_legendre(a, b, order):
    """
    Gauss-Legendre knots and weights on [a, b]

    Args:
        a: Lower bound
        b: Upper bound
        order: Number of points

    Returns:
        Tuple (knots, weights)
    """
    if not a < b:
        raise InvalidInterval(f"empty interval [{a}, {b}]")
    if int(order) < 2:
        raise InvalidInterval(f"Gauss-Legendre order must be >= 2, got {order}")
    knots, weights = _legendre_rule(int(order))
    half = 0.5 * (b - a)
    return half * knots + 0.5 * (b + a), half * weights


def integrate_profile(f, a, b, order=DEFAULT_GL_ORDER):
    """
    Gauss-Legendre approximation of the integral of f over [a, b]

    Args:
        f: Vectorised real function
        a: Lower bound
        b: Upper bound
        order: Number of Gauss-Legendre points (default 128)

    Returns:
        Integral estimate as float
    """
    knots, weights = gauss_legendre(a, b, order)
    return float(weights @ np.asarray(f(knots), dtype=float))


@dataclass(frozen=True)
class ProfileGrid:
    """Values of a profile at strictly increasing nodes in [0, pi/2]"""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise TooFewNodes("profile nodes and values must be 1-d arrays of equal length")
        if nodes.size < 2:
            raise TooFewNodes("profile needs at least two nodes")
        if np.any(np.diff(nodes) <= 0.0):
            raise InvalidInterval("profile nodes must be strictly increasing")
        if nodes[0] < 0.0 or nodes[-1] > HALF_PI + 1e-12:
            raise InvalidInterval("profile nodes must lie in [0, pi/2]")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)


def profile_interpolant(profile):
    """Interpolating B-spline of a profile (quintic when enough nodes), extrapolating"""
    degree = min(SPLINE_DEGREE, profile.nodes.size - 1)
    return make_interp_spline(profile.nodes, profile.values, k=degree)


def interval_rule(nodes):
    """
    Composite Gauss-Legendre rule on [0, nodes[-1]] split at the profile nodes

    Each interval (including [0, nodes[0]] when nodes[0] > 0) gets POINTS_PER_INTERVAL
    points.

    Returns:
        Tuple (points, weights) of shape (intervals, POINTS_PER_INTERVAL)
    """
    nodes = np.asarray(nodes, dtype=float)
    edges = nodes if nodes[0] == 0.0 else np.concatenate(([0.0], nodes))
    left, right = edges[:-1], edges[1:]
    knots, weights = _legendre_rule(POINTS_PER_INTERVAL)
    half = 0.5 * (right - left)
    points = (0.5 * (right + left))[:, None] + half[:, None] * knots
    return points, half[:, None] * weights


def spline_integral(profile, weight):
    """
    Integral over [0, nodes[-1]] of weight(u) times the interpolated profile

    Args:
        profile: ProfileGrid
        weight: Vectorised weight function

    Returns:
        Integral estimate as float
    """
    spline = profile_interpolant(profile)
    points, weights = interval_rule(profile.nodes)
    return float(np.sum(weights * weight(points) * spline(points)))


def cumulative_weighted_integral(profile, m):
    """
    G(nu) = integral over [0, nu] of sin^m u cos u profile(u) du at every profile node

    The profile is interpolated by profile_interpolant and integrated with the
    composite rule of interval_rule; the first interval starts at 0 (extrapolating
    when nodes[0] > 0).

    Args:
        profile: ProfileGrid
        m: Weight exponent (>= 0)

    Returns:
        ProfileGrid of G on the same nodes
    """
    if m < 0:
        raise InvalidExponent(f"weight exponent must be >= 0, got {m}")
    spline = profile_interpolant(profile)
    points, weights = interval_rule(profile.nodes)
    integrand = np.sin(points) ** m * np.cos(points) * spline(points)
    totals = np.cumsum(np.sum(weights * integrand, axis=1))
    if profile.nodes[0] == 0.0:
        totals = np.concatenate(([0.0], totals))
    return ProfileGrid(profile.nodes, totals)
