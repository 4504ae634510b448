"""
Outgoing fundamental solution of the 2-D Helmholtz equation,
G(a, b) = -(i/4) H_0^(1)(k|a - b|), and its far-field plane-wave form.
"""
import math
from typing import Sequence

import numpy as np

from src.models.errors import PreconditionError, SingularityError
from src.specfun.bessel import hankel1_0, hankel1_0_array

FAR_FIELD_MIN_KR = 20.0
SINGULAR_DISTANCE = 1e-12


def _check_wavenumber(k: float) -> float:
    k = float(k)
    if not k > 0.0 or math.isinf(k):
        raise PreconditionError(f"Wavenumber must be finite and positive, got {k!r}")
    return k


def green(k: float, a: Sequence[float], b: Sequence[float]) -> complex:
    """
    Exact Green's function between two points.

    :param k: Wavenumber in 1/m
    :param a: First point (x, y) in metres
    :param b: Second point (x, y) in metres
    :raises SingularityError: when the points are closer than 1e-12 m
    """
    k = _check_wavenumber(k)
    distance = math.hypot(a[0] - b[0], a[1] - b[1])
    if distance < SINGULAR_DISTANCE:
        raise SingularityError(f"Green's function is singular at coincident points {tuple(a)}")
    return -0.25j * hankel1_0(k * distance)


def green_array(k: float, a, b) -> np.ndarray:
    """
    Exact Green's function for broadcastable point arrays of shape (..., 2).
    """
    k = _check_wavenumber(k)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    distance = np.hypot(a[..., 0] - b[..., 0], a[..., 1] - b[..., 1])
    if distance.size and distance.min() < SINGULAR_DISTANCE:
        raise SingularityError("Green's function is singular: an evaluation point coincides with a source")
    return -0.25j * hankel1_0_array(k * distance)


def _far_field_amplitude(k: float, radius: float, min_kr: float) -> complex:
    kr = k * float(radius)
    if not kr >= min_kr:
        raise PreconditionError(
            f"Far-field form requires k*radius >= {min_kr}, got {kr:.6g}"
        )
    return -(1.0 + 1.0j) * complex(math.cos(kr), math.sin(kr)) / (4.0 * math.sqrt(kr * math.pi))


def far_field_green(k: float, radius: float, angle: float, x: Sequence[float],
                    min_kr: float = FAR_FIELD_MIN_KR) -> complex:
    """
    Large-distance approximation of G(radius * (cos angle, sin angle), x).

    :param k: Wavenumber in 1/m
    :param radius: Distance of the array element from the origin in metres
    :param angle: Direction of the array element in radians
    :param x: Evaluation point near the origin
    :param min_kr: Smallest accepted k*radius
    :raises PreconditionError: when k*radius < min_kr
    """
    k = _check_wavenumber(k)
    amplitude = _far_field_amplitude(k, radius, min_kr)
    phase = -k * (math.cos(angle) * x[0] + math.sin(angle) * x[1])
    return amplitude * complex(math.cos(phase), math.sin(phase))


def far_field_green_array(k: float, radius: float, angles, points,
                          min_kr: float = FAR_FIELD_MIN_KR) -> np.ndarray:
    """
    Far-field Green's function for every (angle, point) pair.

    Returns:
        np.ndarray: complex array of shape ``angles.shape + points.shape[:-1]``
    """
    k = _check_wavenumber(k)
    amplitude = _far_field_amplitude(k, radius, min_kr)
    angles = np.asarray(angles, dtype=float)
    points = np.asarray(points, dtype=float)
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    projection = np.tensordot(directions, points, axes=([-1], [-1]))
    return amplitude * np.exp(-1j * k * projection)
