#!/usr/bin/env python3
"""
Sphere Geometry
Pole-relative coordinates, great-circle frames and projection angles on the unit sphere

Conventions (fixed for the whole project):
    - Azimuth tau = 0 points along the tangential projection of the world x-axis onto
      the plane orthogonal to the pole; when the pole lies within ~25 degrees of +-x the
      world y-axis is projected instead. The second azimuth axis is pole x e1, so tau
      increases counterclockwise seen from outside the sphere above the pole.
    - On a great circle S_omega the angle phi is measured from the projection of the
      pole (phi = 0) and the quadrature direction is e_quad = e_ref x omega, i.e. phi
      increases clockwise seen from the tip of omega.
"""

from dataclasses import dataclass

import numpy as np

from errors import DegenerateProjection, InvalidVector

TWO_PI = 2.0 * np.pi
NORTH = np.array([0.0, 0.0, 1.0])
DEGENERACY_TOL = 1e-10

_WORLD_X = np.array([1.0, 0.0, 0.0])
_WORLD_Y = np.array([0.0, 1.0, 0.0])
_AXIS_SWITCH = 0.9


def as_unit(vector):
    """
    Normalize a 3-vector

    Args:
        vector: Sequence of three finite reals

    Returns:
        Unit vector as a float ndarray of shape (3,)

    Raises:
        InvalidVector: If the input is not a finite non-zero 3-vector
    """
    v = np.asarray(vector, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidVector(f"expected three finite components, got {vector!r}")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise InvalidVector("zero vector has no direction")
    return v / norm


def parse_unit_vector(text):
    """Parse the CLI form ``x,y,z`` into a unit vector"""
    try:
        parts = [float(p) for p in text.split(",")]
    except (AttributeError, ValueError):
        raise InvalidVector(f"cannot parse vector {text!r}, expected x,y,z")
    return as_unit(parts)


@dataclass(frozen=True)
class SphericalCoords:
    """Polar angle nu from a pole and azimuth tau in [0, 2pi)"""

    pole: np.ndarray
    nu: float
    tau: float

    def __post_init__(self):
        nu = float(self.nu)
        if not (-1e-12 <= nu <= np.pi + 1e-12):
            raise InvalidVector(f"polar angle {nu} outside [0, pi]")
        tau = float(np.mod(self.tau, TWO_PI))
        if tau >= TWO_PI:
            tau = 0.0
        object.__setattr__(self, "pole", as_unit(self.pole))
        object.__setattr__(self, "nu", min(max(nu, 0.0), np.pi))
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class GreatCircleFrame:
    """Orthonormal frame {e_ref, e_quad, omega} of the great circle with pole omega"""

    omega: np.ndarray
    e_ref: np.ndarray
    e_quad: np.ndarray

    def point(self, phi):
        return circle_point(self, phi)


def azimuth_basis(pole):
    """
    Tangent basis (e1, e2) at a pole fixing the azimuth convention

    Args:
        pole: Unit vector

    Returns:
        Tuple (e1, e2) with e1 the projection of a world axis and e2 = pole x e1
    """
    pole = as_unit(pole)
    axis = _WORLD_Y if abs(pole @ _WORLD_X) > _AXIS_SWITCH else _WORLD_X
    e1 = axis - (axis @ pole) * pole
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(pole, e1)
    return e1, e2


def sph_to_vec(pole, nu, tau):
    """
    Point at polar angle nu and azimuth tau relative to a pole

    Broadcasts over array-valued nu and tau; the result has shape
    ``broadcast(nu, tau).shape + (3,)``.
    """
    pole = as_unit(pole)
    e1, e2 = azimuth_basis(pole)
    nu = np.asarray(nu, dtype=float)
    tau = np.mod(np.asarray(tau, dtype=float), TWO_PI)
    s = np.sin(nu)[..., None]
    return (s * np.cos(tau)[..., None] * e1
            + s * np.sin(tau)[..., None] * e2
            + np.cos(nu)[..., None] * pole)


def polar_coordinates(pole, points):
    """
    Vectorised (nu, tau) of unit vectors relative to a pole

    Args:
        pole: Unit vector
        points: Array of unit vectors, shape (..., 3)

    Returns:
        Tuple of arrays (nu in [0, pi], tau in [0, 2pi)), tau = 0 at the poles
    """
    pole = as_unit(pole)
    e1, e2 = azimuth_basis(pole)
    points = np.asarray(points, dtype=float)
    x, y = points @ e1, points @ e2
    nu = np.arctan2(np.hypot(x, y), points @ pole)
    tau = np.mod(np.arctan2(y, x), TWO_PI)
    return nu, np.where(tau >= TWO_PI, 0.0, tau)


def vec_to_sph(pole, vector):
    """Inverse of sph_to_vec; tau is 0 at the poles"""
    nu, tau = polar_coordinates(pole, as_unit(vector))
    return SphericalCoords(pole, float(nu), float(tau))


def _check_projection(cosines, what):
    bad = np.abs(cosines) >= 1.0 - DEGENERACY_TOL
    if np.any(bad):
        index = int(np.flatnonzero(np.ravel(bad))[0])
        raise DegenerateProjection(f"{what} is (anti)parallel to the circle pole at index {index}")


def reference_directions(omegas, pole):
    """
    Vectorised reference_direction for an array of circle poles

    Args:
        omegas: Array of unit vectors, shape (..., 3)
        pole: Unit vector whose projection is taken

    Returns:
        Array of shape (..., 3)
    """
    omegas = np.asarray(omegas, dtype=float)
    pole = as_unit(pole)
    c = np.asarray(omegas @ pole)
    _check_projection(c, "projected direction")
    proj = pole - c[..., None] * omegas
    return proj / np.linalg.norm(proj, axis=-1, keepdims=True)


def reference_direction(omega, pole):
    """
    Normalized tangential projection of a pole onto the plane of S_omega

    For omega = (nu, tau) with nu in (0, pi/2] this is the point (pi/2 - nu, tau + pi).

    Raises:
        DegenerateProjection: If omega is (anti)parallel to the pole
    """
    return reference_directions(as_unit(omega), pole)


def frame_vectors(omegas, pole):
    """Vectorised (e_ref, e_quad) for an array of circle poles"""
    omegas = np.asarray(omegas, dtype=float)
    e_ref = reference_directions(omegas, pole)
    e_quad = np.cross(e_ref, omegas)
    return e_ref, e_quad


def great_circle_frame(omega, pole):
    """
    Frame of S_omega with phi = 0 at the projection of the pole

    Args:
        omega: Pole of the great circle
        pole: Direction whose projection fixes phi = 0

    Returns:
        GreatCircleFrame with e_quad = e_ref x omega
    """
    omega = as_unit(omega)
    e_ref, e_quad = frame_vectors(omega, pole)
    return GreatCircleFrame(omega=omega, e_ref=e_ref, e_quad=e_quad)


def circle_point(frame, phi):
    """cos(phi) e_ref + sin(phi) e_quad, broadcasting over phi"""
    phi = np.asarray(phi, dtype=float)
    return np.cos(phi)[..., None] * frame.e_ref + np.sin(phi)[..., None] * frame.e_quad


def alpha_angles(omegas, Omega, pole):
    """
    Vectorised alpha_angle over an array of circle poles

    Returns:
        Angles in (-pi, pi], same leading shape as omegas
    """
    e_ref, e_quad = frame_vectors(omegas, pole)
    target = reference_directions(omegas, Omega)
    alpha = np.arctan2(np.sum(target * e_quad, axis=-1), np.sum(target * e_ref, axis=-1))
    return np.where(alpha <= -np.pi, np.pi, alpha)


def alpha_angle(omega, Omega, pole):
    """
    Oriented angle on S_omega from the projection of pole to the projection of Omega

    Measured with the same orientation as phi in great_circle_frame.

    Raises:
        DegenerateProjection: If either projection is undefined
    """
    return float(alpha_angles(as_unit(omega), Omega, pole))


def rotation_to_pole(Omega):
    """
    Proper rotation R with R @ Omega = NORTH

    The rows are (e1, e2, Omega) from azimuth_basis, so the free azimuth is fixed by
    the world-axis convention: Omega = NORTH gives the identity and Omega = -NORTH
    gives the half-turn about the world x-axis.
    """
    Omega = as_unit(Omega)
    e1, e2 = azimuth_basis(Omega)
    return np.vstack([e1, e2, Omega])
