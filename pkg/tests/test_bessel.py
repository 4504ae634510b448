import math

import numpy as np
import pytest

from src.models.errors import DomainError
from src.specfun.bessel import (
    bessel_j,
    bessel_j_orders,
    bessel_y0,
    bessel_y1,
    hankel1_0,
    hankel1_0_array,
    support_order,
)
from tests.oracle import j_series, y0_series, y1_series

ORDERS = [0, 1, 2, 5, 10, 30, 100]
ARGUMENTS = [0.1, 1.0, 5.0, 8.0, 8.5, 12.0, 20.0, 25.0, 26.0, 50.0, 100.0, 1000.0]


@pytest.mark.parametrize("order", ORDERS)
@pytest.mark.parametrize("x", ARGUMENTS)
def test_bessel_j_matches_oracle(order, x):
    expected = j_series(order, x)
    value = bessel_j(order, x)
    if order > x and abs(expected) < 1e-3:
        # deep in the evanescent region only relative agreement is meaningful
        assert value == pytest.approx(expected, rel=1e-10, abs=1e-300)
    else:
        assert abs(value - expected) <= 1e-13 * max(1.0, abs(expected))


def test_bessel_j_underflows_to_exact_zero():
    assert bessel_j(400, 1.0) == 0.0
    assert bessel_j_orders(400, 1.0)[400] == 0.0


def test_bessel_j_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


def test_bessel_j_parity_for_negative_argument():
    assert bessel_j(3, -2.5) == -bessel_j(3, 2.5)
    assert bessel_j(4, -2.5) == bessel_j(4, 2.5)


@pytest.mark.parametrize("order", [-1, 1.5, True])
def test_bessel_j_rejects_bad_order(order):
    with pytest.raises(DomainError):
        bessel_j(order, 1.0)


@pytest.mark.parametrize("x", [0.5, 7.9, 15.0, 40.0, 120.0])
def test_normalization_identity(x):
    js = bessel_j_orders(support_order(x) + 2, x)
    total = js[0] + 2.0 * np.sum(js[2::2])
    assert abs(total - 1.0) <= 1e-13


@pytest.mark.parametrize("x", [0.1, 1.0, 3.0, 7.999, 8.0, 8.001, 9.0, 24.9, 25.1, 30.0, 100.0])
def test_three_term_recurrence(x):
    # spans the series, Miller and asymptotic regimes and their switch points
    for n in range(1, 101):
        residual = bessel_j(n - 1, x) + bessel_j(n + 1, x) - 2.0 * n / x * bessel_j(n, x)
        assert abs(residual) <= 1e-10 * max(1.0, abs(bessel_j(n, x)))


@pytest.mark.parametrize("x", [0.3, 2.0, 8.0, 10.0, 24.0, 26.0, 80.0])
def test_wronskian(x):
    wronskian = bessel_j(1, x) * bessel_y0(x) - bessel_j(0, x) * bessel_y1(x)
    assert abs(wronskian - 2.0 / (math.pi * x)) <= 1e-12


@pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 8.0, 9.0, 15.0, 24.0])
def test_neumann_functions_match_oracle(x):
    assert abs(bessel_y0(x) - y0_series(x)) <= 1e-13 * max(1.0, abs(y0_series(x)))
    assert abs(bessel_y1(x) - y1_series(x)) <= 1e-13 * max(1.0, abs(y1_series(x)))


@pytest.mark.parametrize("function, root", [
    (lambda x: bessel_j(0, x), 2.404825557695773),
    (lambda x: bessel_j(1, x), 3.831705970207512),
    (bessel_y0, 0.8935769662791675),
])
def test_known_zeros(function, root):
    assert abs(function(root)) <= 1e-14


@pytest.mark.parametrize("function", [bessel_y0, bessel_y1, hankel1_0])
@pytest.mark.parametrize("x", [0.0, -1.0, math.inf])
def test_second_kind_domain(function, x):
    with pytest.raises(DomainError):
        function(x)


def test_hankel_combines_both_kinds():
    for x in (0.7, 8.0, 19.0, 60.0):
        value = hankel1_0(x)
        assert value.real == pytest.approx(bessel_j(0, x), abs=1e-15)
        assert value.imag == pytest.approx(bessel_y0(x), abs=1e-15)


def test_hankel_array_matches_scalar():
    xs = np.array([[0.2, 3.0, 8.0], [24.9, 25.1, 400.0]])
    values = hankel1_0_array(xs)
    assert values.shape == xs.shape
    for x, value in zip(xs.ravel(), values.ravel()):
        expected = hankel1_0(x)
        assert abs(value - expected) <= 1e-13 * abs(expected)


def test_hankel_array_rejects_nonpositive():
    with pytest.raises(DomainError):
        hankel1_0_array([1.0, 0.0])


def test_orders_sequence_shape_and_agreement():
    xs = np.array([0.0, 0.5, 9.0, -9.0, 33.0])
    table = bessel_j_orders(20, xs)
    assert table.shape == (21, 5)
    for n in range(21):
        for x, value in zip(xs, table[n]):
            assert abs(value - bessel_j(n, x)) <= 1e-13
