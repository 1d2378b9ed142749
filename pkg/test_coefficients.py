#!/usr/bin/env python3
"""
Tests for coefficients
"""

import json
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from coefficients import (
    build_coeff_table, coeff_table_to_dict, corrupt_table, eval_P, identity_failures, identity_sums,
    to_chebyshev_exact,
)
from errors import CoefficientOverflow, OutOfRange


@pytest.fixture(scope="module")
def table():
    return build_coeff_table(20)


def test_first_rows(table):
    assert table.even_row(1) == (Fraction(-4),)
    assert table.even_row(2) == (Fraction(8), Fraction(-24))
    assert table.even_row(3) == (Fraction(-12), Fraction(96), Fraction(-120))
    assert table.odd_row(1) == ()
    assert table.odd_row(2) == (Fraction(-4),)
    assert table.odd_row(3) == (Fraction(12), Fraction(-24))


def test_row_lengths(table):
    for k in range(1, table.kmax + 1):
        assert len(table.even_row(k)) == k
        assert len(table.odd_row(k)) == k - 1


def test_identities_hold_exactly(table):
    sums = identity_sums(table)
    assert set(sums["even"]) == set(range(1, 21))
    assert set(sums["odd"]) == set(range(2, 21))
    assert all(value == -2 for value in sums["even"].values())
    assert all(value == -1 for value in sums["odd"].values())
    assert identity_failures(table) == []


def test_kmax_one():
    small = build_coeff_table(1)
    assert small.even == ((Fraction(-4),),)
    assert small.odd == ((),)
    assert identity_failures(small) == []


@pytest.mark.parametrize("kmax", [0, -3, 401])
def test_kmax_out_of_range(kmax):
    with pytest.raises(OutOfRange):
        build_coeff_table(kmax)


def test_row_access_out_of_range(table):
    with pytest.raises(OutOfRange):
        table.even_row(21)
    with pytest.raises(OutOfRange):
        table.odd_row(0)


def test_overflow_reports_row():
    with pytest.raises(CoefficientOverflow) as info:
        build_coeff_table(5, magnitude_limit=100)
    assert info.value.k_reached == 3


def test_kernels(table):
    s = np.linspace(0.0, 1.0, 11)
    assert_allclose(table.kernel(1, 0)(s), -4.0 * s, atol=1e-14)
    assert_allclose(table.kernel(2, 0)(s), 8.0 * s - 24.0 * s ** 3, atol=1e-13)
    assert_allclose(table.kernel(2, 1)(s), -4.0 * s ** 2, atol=1e-14)
    assert_allclose(table.kernel(1, 1)(s), 0.0, atol=0.0)
    assert table.kernel(2, 0).domain.tolist() == [0.0, 1.0]


def test_chebyshev_conversion_is_exact():
    assert to_chebyshev_exact({1: Fraction(1)}) == [Fraction(1, 2), Fraction(1, 2)]
    assert to_chebyshev_exact({2: Fraction(1)}) == [Fraction(3, 8), Fraction(1, 2), Fraction(1, 8)]
    assert to_chebyshev_exact({}) == [Fraction(0)]


@pytest.mark.parametrize("k", [15, 20])
@pytest.mark.parametrize("parity", [0, 1])
def test_kernels_hold_precision_at_large_k(table, k, parity):
    row = table.even_row(k) if parity == 0 else table.odd_row(k)
    offset = -1 if parity == 0 else 0
    kernel = table.kernel(k, parity)
    for i in range(9):
        s = Fraction(i, 8)
        exact = float(sum(c * s ** (2 * m + offset) for m, c in enumerate(row, start=1)))
        assert kernel(float(s)) == pytest.approx(exact, abs=1e-9 * (1.0 + abs(exact)))


def test_eval_P(table):
    u = np.linspace(0.0, np.pi / 2, 11)
    s = np.sin(u)
    assert_allclose(eval_P(table, 1, u, 1), 0.0, atol=0.0)
    assert_allclose(eval_P(table, 2, u, 1), -4.0 * s ** 2, atol=1e-14)
    assert_allclose(eval_P(table, 1, u, 0), -4.0 * s, atol=1e-14)
    assert_allclose(eval_P(table, 2, u, 0), -4.0 * s + 8.0 * s - 24.0 * s ** 3, atol=1e-13)
    assert_allclose(eval_P(table, 3, u, 1), -4.0 * s ** 2 + 12.0 * s ** 2 - 24.0 * s ** 4, atol=1e-13)
    assert isinstance(eval_P(table, 2, 0.3, 0), float)


def test_eval_P_errors(table):
    with pytest.raises(OutOfRange):
        eval_P(table, 21, 0.5, 0)
    with pytest.raises(OutOfRange):
        eval_P(table, 2, 2.0, 0)
    with pytest.raises(OutOfRange):
        eval_P(table, 2, 0.5, 2)


def test_p_polynomial_matches_kernel_sum(table):
    s = np.linspace(0.0, 1.0, 17)
    for parity in (0, 1):
        total = sum(table.kernel(k, parity)(s) for k in range(1, 7))
        assert_allclose(table.p_polynomial(6, parity)(s), total, rtol=1e-12, atol=1e-12)


def test_corrupt_table_breaks_identity(table):
    broken = corrupt_table(table, 2, 1)
    assert broken.even_row(2) == (Fraction(9), Fraction(-24))
    assert table.even_row(2) == (Fraction(8), Fraction(-24))
    assert identity_failures(broken) == [("even", 2, Fraction(-3, 2))]
    with pytest.raises(OutOfRange):
        corrupt_table(table, 2, 3)


def test_export_dict(table):
    data = coeff_table_to_dict(build_coeff_table(3))
    assert data["even"] == {"2": [[-4, 1]], "4": [[8, 1], [-24, 1]], "6": [[-12, 1], [96, 1], [-120, 1]]}
    assert data["odd"] == {"3": [[-4, 1]], "5": [[12, 1], [-24, 1]]}
    identities = data["metadata"]["identities"]
    assert data["metadata"]["kmax"] == 3
    assert identities["verified"] is True
    assert identities["even"]["6"] == [-2, 1]
    assert identities["odd"]["5"] == [-1, 1]
    assert "P" not in data
    json.dumps(data)


def test_export_with_samples(table):
    data = coeff_table_to_dict(build_coeff_table(2), p_samples=5)
    assert len(data["P"]["u"]) == 5
    assert data["P"]["u"][-1] == pytest.approx(np.pi / 2)
    assert data["P"]["P0"]["1"][-1] == pytest.approx(-4.0)
    assert data["P"]["P1"]["2"][-1] == pytest.approx(-4.0)


def test_export_flags_corruption(table):
    data = coeff_table_to_dict(corrupt_table(build_coeff_table(3), 3, 2))
    assert data["metadata"]["identities"]["verified"] is False
