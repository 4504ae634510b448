import math

import numpy as np
import pytest

from src.models.errors import PreconditionError, SingularityError
from src.specfun.bessel import hankel1_0
from src.specfun.green import far_field_green, far_field_green_array, green, green_array


def test_green_is_symmetric(k4):
    a, b = (0.72, 0.0), (-0.03, 0.01)
    assert green(k4, a, b) == green(k4, b, a)


def test_green_is_scaled_hankel(k4):
    a, b = (0.3, 0.4), (0.0, 0.0)
    assert green(k4, a, b) == -0.25j * hankel1_0(k4 * 0.5)


def test_green_singular_at_coincident_points(k4):
    with pytest.raises(SingularityError):
        green(k4, (0.1, 0.1), (0.1, 0.1))
    with pytest.raises(SingularityError):
        green_array(k4, np.zeros((3, 2)), np.zeros(2))


def test_green_rejects_bad_wavenumber():
    with pytest.raises(PreconditionError):
        green(0.0, (1.0, 0.0), (0.0, 0.0))


def test_green_array_matches_scalar(k4):
    a = np.array([[0.72, 0.0], [0.0, 0.76], [-0.5, -0.5]])
    b = np.array([0.01, -0.02])
    values = green_array(k4, a, b)
    for point, value in zip(a, values):
        assert abs(value - green(k4, point, b)) <= 1e-13 * abs(value)


@pytest.mark.parametrize("radius", [10.0, 15.0, 20.0])
@pytest.mark.parametrize("angle", [0.0, 1.1, 4.0])
def test_far_field_close_to_exact(radius, angle):
    k = 6.0
    for x in [(0.0, 0.0), (0.1, 0.0), (-0.05, 0.08)]:
        source = (radius * math.cos(angle), radius * math.sin(angle))
        exact = green(k, source, x)
        approx = far_field_green(k, radius, angle, x)
        assert abs(approx - exact) / abs(exact) <= 0.02


def test_far_field_gate(k4):
    with pytest.raises(PreconditionError):
        far_field_green(k4, 0.1, 0.0, (0.0, 0.0))
    # an explicit lower gate admits the same geometry
    far_field_green(k4, 0.1, 0.0, (0.0, 0.0), min_kr=5.0)


def test_far_field_array_matches_scalar(k4):
    angles = np.array([0.0, 0.5, 3.0])
    points = np.array([[0.0, 0.0], [0.02, -0.03]])
    table = far_field_green_array(k4, 0.72, angles, points)
    assert table.shape == (3, 2)
    for i, angle in enumerate(angles):
        for j, point in enumerate(points):
            assert abs(table[i, j] - far_field_green(k4, 0.72, angle, point)) <= 1e-13 * abs(table[i, j])
