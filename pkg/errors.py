#!/usr/bin/env python3
"""
Errors
Exception hierarchy shared by the geometry, quadrature, transform and inversion modules
"""


class FunkError(ValueError):
    """Base class for every error raised by this project"""


# Geometry

class GeometryError(FunkError):
    """Invalid geometric input"""


class InvalidVector(GeometryError):
    """A vector could not be normalized (zero or non-finite)"""


class DegenerateProjection(GeometryError):
    """Tangential projection onto a great circle is undefined (vectors are parallel)"""


# Quadrature

class QuadratureError(FunkError):
    """Invalid quadrature request"""


class TooFewNodes(QuadratureError):
    """Not enough (or an invalid number of) quadrature nodes"""


class InvalidInterval(QuadratureError):
    """Integration interval or rule order is invalid"""


class InvalidExponent(QuadratureError):
    """Negative weight exponent"""


# Transforms

class TransformError(FunkError):
    """A forward transform could not be evaluated"""


class OutOfDomain(TransformError):
    """Arguments lie outside the domain where the operation is defined"""


class GridError(TransformError):
    """A transform grid is malformed"""


class InvalidGrid(GridError):
    """Grid counts or shapes are invalid"""


class NonuniformGrid(GridError):
    """The azimuth grid is not uniform over [0, 2pi)"""


# Inversion

class InversionError(FunkError):
    """The reconstruction could not be carried out"""


class OutOfRange(InversionError):
    """Index or argument outside the range covered by a coefficient table"""


class InsufficientProfile(InversionError):
    """Averaged profiles are too sparse for the requested harmonic"""


class CoefficientOverflow(InversionError):
    """Coefficients exceeded the representable floating-point range"""

    def __init__(self, k_reached, message=None):
        self.k_reached = k_reached
        super().__init__(message or f"coefficient magnitude overflow at k={k_reached}")


# Phantoms and configuration

class PhantomError(FunkError):
    """Phantom lookup or construction failed"""


class UnknownPhantom(PhantomError):
    """No phantom is registered under the given name"""


class ConfigError(FunkError):
    """Run configuration is invalid"""
