#!/usr/bin/env python3
"""
Phantoms
Analytic test functions with known point values and closed-form transforms

Closed forms are relative to the north pole (0, 0, 1). s = sin(nu) is the sine of the
polar distance of omega from the pole.
"""

from dataclasses import dataclass, field as dataclass_field
from itertools import product

import numpy as np
from scipy.special import ive

from errors import FunkError, PhantomError, UnknownPhantom
from quadrature import DEFAULT_CIRCLE_NODES
from sphere_geom import NORTH, as_unit, frame_vectors, parse_unit_vector, polar_coordinates
from transforms import SphereField, circle_samples, even_odd_split, fourier_arrays, transform_values

DEFAULT_BUMP_WIDTH = 0.5
DEFAULT_BAND_LIMIT = 3
DEFAULT_SEED = 1

FIELD_TOL = 1e-14
TRANSFORM_TOL = 1e-11
BAND_TOL = 1e-10


@dataclass(frozen=True)
class Phantom:
    """Test function, an independent exact evaluator and optional closed-form transforms"""

    name: str
    field: SphereField
    truth: object
    known_transforms: dict = dataclass_field(default_factory=dict)
    band_limit: int = None
    parity: str = None
    params: dict = dataclass_field(default_factory=dict)

    @property
    def label(self):
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={_format_param(v)}" for k, v in self.params.items())


def _format_param(value):
    if isinstance(value, np.ndarray):
        return ",".join(f"{c:g}" for c in value)
    return str(value)


def _sin_nu(omegas):
    z = np.asarray(omegas, dtype=float)[..., 2]
    return np.sqrt(np.clip(1.0 - z * z, 0.0, None))


def _zeros(omegas):
    return np.zeros(np.shape(omegas)[:-1])


def _polar(points):
    return polar_coordinates(NORTH, points)


def const1():
    return Phantom(
        name="const1",
        field=SphereField(lambda p: np.ones(p.shape[:-1]), "analytic", "const1"),
        truth=lambda p: np.ones(np.shape(p)[:-1]),
        known_transforms={"Ff": lambda w: np.ones(np.shape(w)[:-1]), "Cf": _zeros, "Sf": _zeros},
        band_limit=0,
        parity="even",
    )


def cos_nu():
    return Phantom(
        name="cos_nu",
        field=SphereField(lambda p: p[..., 2], "analytic", "cos_nu"),
        truth=lambda p: np.cos(_polar(p)[0]),
        known_transforms={"Ff": _zeros, "Cf": lambda w: 0.5 * _sin_nu(w), "Sf": _zeros},
        band_limit=1,
        parity="odd",
    )


def cos3_nu():
    return Phantom(
        name="cos3_nu",
        field=SphereField(lambda p: p[..., 2] ** 3, "analytic", "cos3_nu"),
        truth=lambda p: np.cos(_polar(p)[0]) ** 3,
        known_transforms={"Ff": _zeros, "Cf": lambda w: 0.375 * _sin_nu(w) ** 3, "Sf": _zeros},
        band_limit=3,
        parity="odd",
    )


def even_harm2():
    return Phantom(
        name="even_harm2",
        field=SphereField(lambda p: 1.5 * p[..., 2] ** 2 - 0.5, "analytic", "even_harm2"),
        truth=lambda p: 1.5 * np.cos(_polar(p)[0]) ** 2 - 0.5,
        known_transforms={"Ff": lambda w: (3.0 * _sin_nu(w) ** 2 - 2.0) / 4.0, "Cf": _zeros, "Sf": _zeros},
        band_limit=2,
        parity="even",
    )


def mixed():
    def evaluate(p):
        z = p[..., 2]
        return 1.0 + z + 1.5 * z * z - 0.5

    def truth(p):
        c = np.cos(_polar(p)[0])
        return 1.0 + c + 1.5 * c ** 2 - 0.5

    return Phantom(
        name="mixed",
        field=SphereField(evaluate, "analytic", "mixed"),
        truth=truth,
        known_transforms={
            "Ff": lambda w: 1.0 + (3.0 * _sin_nu(w) ** 2 - 2.0) / 4.0,
            "Cf": lambda w: 0.5 * _sin_nu(w),
            "Sf": _zeros,
        },
        band_limit=2,
    )


def monomial_exponents(L):
    """Exponents (i, j, k) with i + j + k <= L in lexicographic order"""
    return [e for e in product(range(L + 1), repeat=3) if sum(e) <= L]


def bandlimited_random(L=DEFAULT_BAND_LIMIT, seed=DEFAULT_SEED):
    """
    Random polynomial sum c_(ijk) x^i y^j z^k over i + j + k <= L

    Coefficients are numpy.random.default_rng(seed).standard_normal(count) assigned to
    the exponents of monomial_exponents(L) in order, so the phantom is reproducible.
    """
    L, seed = int(L), int(seed)
    if L < 0:
        raise PhantomError(f"band limit must be >= 0, got {L}")
    exponents = np.array(monomial_exponents(L))
    coefficients = np.random.default_rng(seed).standard_normal(len(exponents))

    def evaluate(p):
        powers = p[..., None, :] ** exponents
        return np.prod(powers, axis=-1) @ coefficients

    def truth(p):
        nu, tau = _polar(p)
        xyz = np.stack((np.sin(nu) * np.cos(tau), np.sin(nu) * np.sin(tau), np.cos(nu)), axis=-1)
        return evaluate(xyz)

    return Phantom(
        name="bandlimited_random",
        field=SphereField(evaluate, "analytic", f"bandlimited_random(L={L}, seed={seed})"),
        truth=truth,
        band_limit=L,
        params={"L": L, "seed": seed},
    )


def bump(center=NORTH, width=DEFAULT_BUMP_WIDTH):
    """
    Smooth bump exp(-(1 - <omega, c>) / w^2), not band-limited

    With r = sqrt(1 - <c, omega>^2) and phi_0 the angle of the projection of c on S_omega:
        Ff = exp(-(1 - r)/w^2) ive(0, r/w^2)
        Cf = exp(-(1 - r)/w^2) ive(1, r/w^2) cos(phi_0), Sf likewise with sin(phi_0)
    """
    center = as_unit(center)
    width = float(width)
    if not width > 0.0:
        raise PhantomError(f"bump width must be positive, got {width}")
    scale = 1.0 / width ** 2

    def evaluate(p):
        return np.exp(-(1.0 - p @ center) * scale)

    def truth(p):
        nu, tau = _polar(p)
        c_nu, c_tau = _polar(center)
        cosine = np.cos(nu) * np.cos(c_nu) + np.sin(nu) * np.sin(c_nu) * np.cos(tau - c_tau)
        return np.exp(-(1.0 - cosine) * scale)

    def radius(w):
        return np.sqrt(np.clip(1.0 - (np.asarray(w) @ center) ** 2, 0.0, None))

    def funk_closed(w):
        r = radius(w)
        return np.exp(-(1.0 - r) * scale) * ive(0, r * scale)

    def weighted(w, component):
        r = radius(w)
        e_ref, e_quad = frame_vectors(w, NORTH)
        phi0 = np.arctan2(e_quad @ center, e_ref @ center)
        trig = np.cos(phi0) if component == "Cf" else np.sin(phi0)
        return np.exp(-(1.0 - r) * scale) * ive(1, r * scale) * trig

    return Phantom(
        name="bump",
        field=SphereField(evaluate, "analytic", f"bump(w={width:g})"),
        truth=truth,
        known_transforms={
            "Ff": funk_closed,
            "Cf": lambda w: weighted(w, "Cf"),
            "Sf": lambda w: weighted(w, "Sf"),
        },
        params={"center": center, "width": width},
    )


REGISTRY = {
    "const1": (const1, {}),
    "cos_nu": (cos_nu, {}),
    "cos3_nu": (cos3_nu, {}),
    "even_harm2": (even_harm2, {}),
    "mixed": (mixed, {}),
    "bandlimited_random": (bandlimited_random, {"L": int, "seed": int}),
    "bump": (bump, {"center": parse_unit_vector, "width": float}),
}


def phantom_catalog():
    """Every registered phantom with default parameters"""
    return [factory() for factory, _ in REGISTRY.values()]


def parse_phantom_spec(text):
    """
    Split ``name[:param=value,...]`` into a name and raw parameter strings

    Comma-separated tokens without '=' extend the previous value, so vector
    parameters can be written as ``center=0,0,1``.
    """
    name, _, rest = text.strip().partition(":")
    params = {}
    last = None
    for token in filter(None, (t.strip() for t in rest.split(","))):
        if "=" in token:
            key, _, value = token.partition("=")
            last = key.strip()
            params[last] = value.strip()
        elif last is None:
            raise PhantomError(f"parameter {token!r} has no name in {text!r}")
        else:
            params[last] += "," + token
    return name.strip(), params


def get_phantom(text):
    """
    Resolve a phantom from its CLI form

    Args:
        text: ``name`` or ``name:param=value,...``

    Returns:
        Phantom

    Raises:
        UnknownPhantom: If no phantom has this name
        PhantomError: If a parameter is unknown or cannot be parsed
    """
    name, raw = parse_phantom_spec(text)
    if name not in REGISTRY:
        raise UnknownPhantom(f"unknown phantom {name!r}; choose from {', '.join(REGISTRY)}")
    factory, parsers = REGISTRY[name]
    kwargs = {}
    for key, value in raw.items():
        if key not in parsers:
            raise PhantomError(f"phantom {name!r} takes no parameter {key!r}")
        try:
            kwargs[key] = parsers[key](value)
        except (FunkError, ValueError) as exc:
            raise PhantomError(f"bad value {value!r} for {name}.{key}: {exc}") from exc
    return factory(**kwargs)


@dataclass
class PhantomReport:
    """Deviations measured by verify_phantom"""

    name: str
    field_deviation: float
    transform_deviation: dict
    odd_funk: float
    band_deviation: float
    failures: list

    @property
    def passed(self):
        return not self.failures


def random_directions(count, rng):
    """Uniformly distributed unit vectors, shape (count, 3)"""
    v = rng.standard_normal((count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def verify_phantom(phantom, M=DEFAULT_CIRCLE_NODES, samples=100, seed=0):
    """
    Check a phantom against its truth and closed forms

    Compares the field with the truth evaluator at random points, the quadrature
    transforms with known_transforms at random circle poles, confirms that the
    Funk transform of the odd part vanishes, and for band-limited phantoms that no
    harmonic above the band limit appears.

    Returns:
        PhantomReport
    """
    rng = np.random.default_rng(seed)
    points = random_directions(samples, rng)
    omegas = random_directions(samples, rng)
    failures = []

    field_dev = float(np.max(np.abs(phantom.field(points) - phantom.truth(points))))
    if field_dev > FIELD_TOL:
        failures.append(f"field deviates from truth by {field_dev:.3g}")

    computed = dict(zip(("Ff", "Cf", "Sf"), transform_values(phantom.field, omegas, NORTH, M)))
    transform_dev = {}
    for label, closed in phantom.known_transforms.items():
        transform_dev[label] = float(np.max(np.abs(computed[label] - closed(omegas))))
        if transform_dev[label] > TRANSFORM_TOL:
            failures.append(f"{label} deviates from its closed form by {transform_dev[label]:.3g}")

    odd_part = even_odd_split(phantom.field)[1]
    odd_funk = float(np.max(np.abs(transform_values(odd_part, omegas, NORTH, M)[0])))
    if odd_funk > TRANSFORM_TOL:
        failures.append(f"Funk transform of the odd part reaches {odd_funk:.3g}")

    band_dev = 0.0
    if phantom.band_limit is not None:
        D = phantom.band_limit
        a, b = fourier_arrays(circle_samples(phantom.field, omegas, NORTH, M), D + 2)
        band_dev = float(max(np.max(np.abs(a[:, D + 1:])), np.max(np.abs(b[:, D + 1:]))))
        if band_dev > BAND_TOL:
            failures.append(f"harmonics above {D} reach {band_dev:.3g}")

    return PhantomReport(phantom.label, field_dev, transform_dev, odd_funk, band_dev, failures)
