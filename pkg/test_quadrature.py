#!/usr/bin/env python3
"""
Tests for quadrature
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import InvalidExponent, InvalidInterval, TooFewNodes
from quadrature import (
    HALF_PI, PeriodicSamples, ProfileGrid, cumulative_weighted_integral, gauss_legendre,
    integrate_profile, periodic_nodes, periodic_trapezoid, spline_integral,
)


def samples_of(f, M):
    return PeriodicSamples(f(periodic_nodes(M)))


def test_periodic_nodes():
    nodes = periodic_nodes(8)
    assert nodes[0] == -np.pi
    assert_allclose(np.diff(nodes), 2 * np.pi / 8)
    for bad in (2, 7):
        with pytest.raises(TooFewNodes):
            periodic_nodes(bad)


def test_periodic_trapezoid_examples():
    assert periodic_trapezoid(samples_of(np.ones_like, 8)) == pytest.approx(2 * np.pi, abs=1e-15)
    assert abs(periodic_trapezoid(samples_of(np.cos, 16))) < 1e-14
    assert periodic_trapezoid(samples_of(lambda p: np.cos(p) ** 2, 16)) == pytest.approx(np.pi, abs=1e-13)


def test_periodic_trapezoid_exact_below_half_m():
    M = 32
    for k in range(1, M // 2):
        assert abs(periodic_trapezoid(samples_of(lambda p: np.cos(k * p), M))) < 1e-13
        assert abs(periodic_trapezoid(samples_of(lambda p: np.sin(k * p), M))) < 1e-13


def test_periodic_samples_validation():
    with pytest.raises(TooFewNodes):
        PeriodicSamples(np.ones(5))
    assert PeriodicSamples(np.ones((3, 8))).M == 8


def test_integrate_profile_examples():
    assert integrate_profile(lambda u: np.sin(u) ** 5 * np.cos(u), 0.0, HALF_PI) == pytest.approx(1 / 6, abs=1e-12)
    assert integrate_profile(np.cos, 0.0, HALF_PI) == pytest.approx(1.0, abs=1e-13)
    value = integrate_profile(lambda u: np.sin(u) ** 2 * np.sin(u) ** 3 * np.cos(u), 0.0, HALF_PI)
    assert value == pytest.approx(1 / 6, abs=1e-12)


def test_integrate_profile_errors():
    with pytest.raises(InvalidInterval):
        integrate_profile(np.cos, 1.0, 1.0)
    with pytest.raises(InvalidInterval):
        gauss_legendre(0.0, 1.0, 1)


def test_gauss_legendre_polynomial_exactness():
    knots, weights = gauss_legendre(0.0, 2.0, 4)
    for degree in range(8):
        assert weights @ knots ** degree == pytest.approx(2.0 ** (degree + 1) / (degree + 1), rel=1e-13)


def test_profile_grid_validation():
    with pytest.raises(TooFewNodes):
        ProfileGrid([0.1], [1.0])
    with pytest.raises(InvalidInterval):
        ProfileGrid([0.2, 0.1], [1.0, 1.0])
    with pytest.raises(InvalidInterval):
        ProfileGrid([0.0, 2.0], [1.0, 1.0])


def test_cumulative_integral_examples():
    nodes = HALF_PI * np.arange(1, 129) / 128
    ones = cumulative_weighted_integral(ProfileGrid(nodes, np.ones_like(nodes)), 1)
    assert_allclose(ones.values, np.sin(nodes) ** 2 / 2, atol=1e-8)
    zeros = cumulative_weighted_integral(ProfileGrid(nodes, np.zeros_like(nodes)), 3)
    assert_allclose(zeros.values, 0.0, atol=0.0)
    cubes = cumulative_weighted_integral(ProfileGrid(nodes, np.sin(nodes) ** 3), 2)
    assert_allclose(cubes.values, np.sin(nodes) ** 6 / 6, atol=1e-8)


def test_cumulative_integral_with_zero_node():
    nodes = HALF_PI * np.arange(0, 65) / 64
    result = cumulative_weighted_integral(ProfileGrid(nodes, np.cos(nodes)), 0)
    assert result.values[0] == 0.0
    # integral of cos^2 u over [0, nu]
    assert_allclose(result.values, nodes / 2 + np.sin(2 * nodes) / 4, atol=1e-9)


def test_cumulative_integral_monotone_for_positive_profile():
    nodes = HALF_PI * np.arange(1, 101) / 100
    result = cumulative_weighted_integral(ProfileGrid(nodes, 1.0 + nodes ** 2), 2)
    assert np.all(np.diff(result.values) > 0.0)


def test_cumulative_integral_negative_exponent():
    nodes = np.linspace(0.1, HALF_PI, 10)
    with pytest.raises(InvalidExponent):
        cumulative_weighted_integral(ProfileGrid(nodes, nodes), -1)


def test_spline_integral_matches_closed_form():
    nodes = HALF_PI * np.arange(1, 257) / 256
    profile = ProfileGrid(nodes, np.sin(nodes) ** 3)
    value = spline_integral(profile, lambda u: np.sin(u) ** 2 * np.cos(u))
    assert value == pytest.approx(1 / 6, abs=1e-11)
