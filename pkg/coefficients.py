#!/usr/bin/env python3
"""
Coefficients
Exact rational coefficient tables c_m(2k), c_m(2k-1) and the polynomials P_n^0, P_n^1

The even row c(2k) carries the kernel of the averaged coefficient a_{2k}:
    abar_{2k}(nu) = 2 abar_0(nu) + integral_0^nu sum_m c_m(2k) (sin^{2m-1} u / sin^{2k} nu) cos u abar_0(u) du
and the odd row c(2k-1) the kernel of a_{2k-1}:
    abar_{2k-1}(nu) = abar_1(nu) + integral_0^nu sum_m c_m(2k-1) (sin^{2m} u / sin^{2k-1} nu) cos u abar_1(u) du
"""

import sys
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from errors import CoefficientOverflow, OutOfRange

DEFAULT_KMAX = 20
MAX_KMAX = 400
FLOAT_LIMIT = sys.float_info.max


@dataclass(frozen=True)
class CoeffTable:
    """
    Immutable coefficient table

    even[k - 1] holds (c_1(2k), ..., c_k(2k)) for k = 1..kmax.
    odd[k - 1] holds (c_1(2k-1), ..., c_{k-1}(2k-1)); the k = 1 row is empty.
    """

    even: tuple
    odd: tuple
    kmax: int

    def even_row(self, k):
        self._check_k(k)
        return self.even[k - 1]

    def odd_row(self, k):
        self._check_k(k)
        return self.odd[k - 1]

    def _check_k(self, k):
        if not 1 <= k <= self.kmax:
            raise OutOfRange(f"k={k} outside the table range 1..{self.kmax}")

    def kernel(self, k, parity):
        """
        Single-term kernel as a Chebyshev series in s = sin u on [0, 1]

        parity 0: sum_m c_m(2k) s^{2m-1}; parity 1: sum_m c_m(2k-1) s^{2m}

        The monomial coefficients grow like 4^k and cancel in floating point, so the
        exact polynomial is converted to the Chebyshev basis before rounding.

        Returns:
            numpy.polynomial.Chebyshev with domain [0, 1]
        """
        row = self.even_row(k) if parity == 0 else self.odd_row(k)
        return _to_chebyshev(_exact_terms(row, parity))

    def p_polynomial(self, n, parity):
        """P_n^parity as a Chebyshev series in sin u, summed exactly before conversion"""
        if not 0 <= n <= self.kmax:
            raise OutOfRange(f"n={n} outside the table range 0..{self.kmax}")
        exact = {}
        for k in range(1, n + 1):
            row = self.even_row(k) if parity == 0 else self.odd_row(k)
            for power, value in _exact_terms(row, parity).items():
                exact[power] = exact.get(power, Fraction(0)) + value
        return _to_chebyshev(exact)


def _exact_terms(row, parity):
    if parity not in (0, 1):
        raise OutOfRange(f"parity must be 0 or 1, got {parity}")
    offset = -1 if parity == 0 else 0
    return {2 * m + offset: c for m, c in enumerate(row, start=1)}


def _times_s(series):
    """Exact product of a Chebyshev series in x = 2 s - 1 with s = (x + 1) / 2"""
    shifted = [Fraction(0)] * (len(series) + 1)
    for j, value in enumerate(series):
        if j == 0:
            shifted[1] += value
        else:
            shifted[j + 1] += value / 2
            shifted[j - 1] += value / 2
    return [(a + b) / 2 for a, b in zip(shifted, series + [Fraction(0)])]


def to_chebyshev_exact(exact):
    """
    Exact Chebyshev coefficients on s in [0, 1] of a polynomial given as {power: Fraction}

    Horner's scheme in the Chebyshev basis: p(s) = (...(p_d s + p_{d-1}) s + ...) s + p_0.
    """
    degree = max(exact, default=0)
    series = [Fraction(exact.get(degree, 0))]
    for power in range(degree - 1, -1, -1):
        series = _times_s(series)
        series[0] += exact.get(power, 0)
    return series


def _to_chebyshev(exact):
    coeffs = [float(c) for c in to_chebyshev_exact(exact)]
    return np.polynomial.Chebyshev(coeffs, domain=[0.0, 1.0])


def _check_magnitude(row, k, limit):
    for value in row:
        if abs(value) > limit:
            raise CoefficientOverflow(k, f"coefficient magnitude exceeds {limit:.3g} at k={k}")


def build_coeff_table(kmax=DEFAULT_KMAX, magnitude_limit=FLOAT_LIMIT):
    """
    Build the coefficient tables by exact rational recursion

    even: c_m(2k+2) = c_m(2k) (1 - (4k+2)/(2k-2m+2)) for m <= k,
          c_{k+1}(2k+2) = -2(4k+2) + (4k+2) sum_m c_m(2k)/(2k-2m+2), c_1(2) = -4
    odd:  c_m(2k+1) = c_m(2k-1) (1 - 4k/(2k-2m)) for m <= k-1,
          c_k(2k+1) = -4k + 4k sum_m c_m(2k-1)/(2k-2m), c_1(3) = -4

    Args:
        kmax: Largest k (rows c(2), ..., c(2 kmax) and c(1), ..., c(2 kmax - 1))
        magnitude_limit: Largest admissible |c_m|; defaults to the float range

    Returns:
        CoeffTable

    Raises:
        OutOfRange: If kmax < 1 or kmax > MAX_KMAX
        CoefficientOverflow: If a coefficient exceeds magnitude_limit
    """
    kmax = int(kmax)
    if not 1 <= kmax <= MAX_KMAX:
        raise OutOfRange(f"kmax must lie in 1..{MAX_KMAX}, got {kmax}")

    even = [(Fraction(-4),)]
    _check_magnitude(even[0], 1, magnitude_limit)
    for k in range(1, kmax):
        prev = even[-1]
        step = Fraction(4 * k + 2)
        row = [c * (1 - step / (2 * k - 2 * m + 2)) for m, c in enumerate(prev, start=1)]
        tail = sum((c / (2 * k - 2 * m + 2) for m, c in enumerate(prev, start=1)), Fraction(0))
        row.append(-2 * step + step * tail)
        _check_magnitude(row, k + 1, magnitude_limit)
        even.append(tuple(row))

    odd = [()]
    for k in range(1, kmax):
        prev = odd[-1]
        step = Fraction(4 * k)
        row = [c * (1 - step / (2 * k - 2 * m)) for m, c in enumerate(prev, start=1)]
        tail = sum((c / (2 * k - 2 * m) for m, c in enumerate(prev, start=1)), Fraction(0))
        row.append(-step + step * tail)
        _check_magnitude(row, k + 1, magnitude_limit)
        odd.append(tuple(row))

    return CoeffTable(even=tuple(even), odd=tuple(odd), kmax=kmax)


def identity_sums(table):
    """
    Exact identity sums for every row

    Returns:
        Dict with "even": {k: sum_m c_m(2k)/(2m)} (target -2) and
        "odd": {k: sum_m c_m(2k-1)/(2m+2)} for k >= 2 (target -1)
    """
    even = {k: sum((c / (2 * m) for m, c in enumerate(table.even_row(k), start=1)), Fraction(0))
            for k in range(1, table.kmax + 1)}
    odd = {k: sum((c / (2 * m + 2) for m, c in enumerate(table.odd_row(k), start=1)), Fraction(0))
           for k in range(2, table.kmax + 1)}
    return {"even": even, "odd": odd}


def identity_failures(table):
    """List of (family, k, value) rows that miss their exact target"""
    sums = identity_sums(table)
    targets = {"even": Fraction(-2), "odd": Fraction(-1)}
    return [(family, k, value)
            for family, rows in sums.items()
            for k, value in rows.items()
            if value != targets[family]]


def eval_P(table, n, u, parity):
    """
    Evaluate P_n^0 (parity 0) or P_n^1 (parity 1) at u

    P_n^1(u) = sum_{k<=n} sum_{m<k} c_m(2k-1) sin^{2m} u
    P_n^0(u) = sum_{k<=n} sum_{m<=k} c_m(2k) sin^{2m-1} u

    Raises:
        OutOfRange: If n > kmax, the parity is not 0/1 or u is outside [0, pi/2]
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < -1e-12) or np.any(u_arr > 0.5 * np.pi + 1e-12):
        raise OutOfRange("P polynomials are evaluated on [0, pi/2]")
    if parity not in (0, 1):
        raise OutOfRange(f"parity must be 0 or 1, got {parity}")
    values = table.p_polynomial(n, parity)(np.sin(u_arr))
    return float(values) if np.ndim(values) == 0 else values


def corrupt_table(table, k, m, delta=Fraction(1)):
    """Copy of the table with c_m(2k) shifted by delta; negative control for the verify suites"""
    row = list(table.even_row(k))
    if not 1 <= m <= len(row):
        raise OutOfRange(f"m={m} outside 1..{len(row)} for k={k}")
    row[m - 1] += Fraction(delta)
    even = table.even[:k - 1] + (tuple(row),) + table.even[k:]
    return replace(table, even=even)


def _pair(value):
    return [value.numerator, value.denominator]


def coeff_table_to_dict(table, p_samples=0):
    """
    JSON-ready export with exact numerator/denominator pairs

    Args:
        table: CoeffTable
        p_samples: When positive, also evaluate P_n^0 and P_n^1 for n = 1..kmax on this
            many equispaced u in [0, pi/2]

    Returns:
        Dict with "even", "odd" and "metadata" (plus "P" when sampled)
    """
    sums = identity_sums(table)
    failures = identity_failures(table)
    data = {
        "even": {str(2 * k): [_pair(c) for c in table.even_row(k)] for k in range(1, table.kmax + 1)},
        "odd": {str(2 * k - 1): [_pair(c) for c in table.odd_row(k)] for k in range(2, table.kmax + 1)},
        "metadata": {
            "kmax": table.kmax,
            "identities": {
                "even": {str(2 * k): _pair(v) for k, v in sums["even"].items()},
                "odd": {str(2 * k - 1): _pair(v) for k, v in sums["odd"].items()},
                "even_target": [-2, 1],
                "odd_target": [-1, 1],
                "verified": not failures,
            },
        },
    }
    if p_samples:
        u = np.linspace(0.0, 0.5 * np.pi, int(p_samples))
        data["P"] = {
            "u": u.tolist(),
            "P0": {str(n): eval_P(table, n, u, 0).tolist() for n in range(1, table.kmax + 1)},
            "P1": {str(n): eval_P(table, n, u, 1).tolist() for n in range(1, table.kmax + 1)},
        }
    return data
