"""
Real-argument cylinder functions J_n, Y_0, Y_1 and H_0^(1).

Three evaluation regimes are used for J_n:

* ascending power series for ``x <= SERIES_LIMIT``
* Miller backward recurrence normalised with J_0 + 2*sum(J_2k) = 1
* Hankel asymptotic expansion once ``x > max(ASYMPTOTIC_LIMIT, n**2)``

Values whose magnitude falls below ``UNDERFLOW`` are returned as exact zeros.
"""
import math
from typing import Tuple

import numpy as np

from src.models.errors import DomainError

SERIES_LIMIT = 8.0
ASYMPTOTIC_LIMIT = 25.0
MAX_ORDER = 10 ** 6
UNDERFLOW = 1e-300
EULER_GAMMA = 0.57721566490153286061

_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250
_LOG_UNDERFLOW = math.log(UNDERFLOW)
_HALF_SQRT2 = math.sqrt(0.5)
# cos/sin of r*pi/4 for r = 0..7
_COS_QUARTER = (1.0, _HALF_SQRT2, 0.0, -_HALF_SQRT2, -1.0, -_HALF_SQRT2, 0.0, _HALF_SQRT2)
_SIN_QUARTER = (0.0, _HALF_SQRT2, 1.0, _HALF_SQRT2, 0.0, -_HALF_SQRT2, -1.0, -_HALF_SQRT2)


def _flush(value: float) -> float:
    return 0.0 if abs(value) < UNDERFLOW else value


def _check_order(order: int) -> int:
    if isinstance(order, bool) or int(order) != order or order < 0:
        raise DomainError(f"Bessel order must be a nonnegative integer, got {order!r}")
    if order > MAX_ORDER:
        raise DomainError(f"Bessel order {order} exceeds the supported maximum {MAX_ORDER}")
    return int(order)


def _log_upper_bound(order: int, x: float) -> float:
    """log of (x/2)^n / n!, an upper bound of |J_n(x)| for n >= 0."""
    return order * math.log(0.5 * x) - math.lgamma(order + 1.0)


def _series_j(order: int, x: float) -> float:
    log_prefactor = _log_upper_bound(order, x)
    if log_prefactor < _LOG_UNDERFLOW - 5.0:
        return 0.0
    quarter = -0.25 * x * x
    term, total, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= quarter / (k * (order + k))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > 2:
            break
    return _flush(math.exp(log_prefactor) * total)


def support_order(x: float) -> int:
    """Smallest order above which J_n(x) is certainly below the underflow level."""
    if x < 1e-30:
        return 0
    order = max(1, math.ceil(x))
    while _log_upper_bound(order, x) >= _LOG_UNDERFLOW:
        order += 1
    return order


def _miller_start(order: int, x: float) -> int:
    top = max(order, math.ceil(x))
    start = top + 30 + int(math.sqrt(60.0 * top))
    return start + (start % 2)


def _miller_j(order: int, x: float) -> float:
    start = _miller_start(order, x)
    upper, current = 0.0, 1.0
    norm = current if start > 0 else 0.0
    answer = current if start == order else 0.0
    scale = 2.0 / x
    for k in range(start, 0, -1):
        lower = k * scale * current - upper
        upper, current = current, lower
        if abs(current) > _RESCALE_AT:
            upper *= _RESCALE_BY
            current *= _RESCALE_BY
            norm *= _RESCALE_BY
            answer *= _RESCALE_BY
        below = k - 1
        if below == order:
            answer = current
        if below > 0 and below % 2 == 0:
            norm += current
    norm = 2.0 * norm + current
    return _flush(answer / norm)


def _hankel_pq(order: int, x: float, terms: int = 200) -> Tuple[float, float]:
    mu = 4.0 * order * order
    p, q = 1.0, 0.0
    term = 1.0
    previous = math.inf
    for k in range(1, terms):
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        magnitude = abs(term)
        if magnitude == 0.0 or magnitude > previous:
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * term
        else:
            p += sign * term
        if magnitude < 1e-17:
            break
        previous = magnitude
    return p, q


def _phase(order: int, x: float) -> Tuple[float, float]:
    """cos and sin of x - (2n+1)pi/4 with the quarter-turn part reduced exactly."""
    r = (2 * order + 1) % 8
    cx, sx = math.cos(x), math.sin(x)
    return (cx * _COS_QUARTER[r] + sx * _SIN_QUARTER[r],
            sx * _COS_QUARTER[r] - cx * _SIN_QUARTER[r])


def _asymptotic_jy(order: int, x: float) -> Tuple[float, float]:
    p, q = _hankel_pq(order, x)
    c, s = _phase(order, x)
    amplitude = math.sqrt(2.0 / (math.pi * x))
    return amplitude * (p * c - q * s), amplitude * (p * s + q * c)


def _use_asymptotic(order: int, x: float) -> bool:
    return x > max(ASYMPTOTIC_LIMIT, float(order) * order)


def bessel_j(order: int, x: float) -> float:
    """
    Bessel function of the first kind J_n(x) for integer n >= 0 and real x.

    Negative arguments use J_n(-x) = (-1)^n J_n(x).

    :param order: Nonnegative integer order, at most 10**6
    :param x: Real argument
    :return: J_n(x), or exactly 0.0 when the value underflows below 1e-300
    """
    order = _check_order(order)
    x = float(x)
    if x < 0.0:
        value = bessel_j(order, -x)
        return -value if order % 2 else value
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    if order > 0 and _log_upper_bound(order, x) < _LOG_UNDERFLOW:
        return 0.0
    if x <= SERIES_LIMIT:
        return _series_j(order, x)
    if _use_asymptotic(order, x):
        return _flush(_asymptotic_jy(order, x)[0])
    return _miller_j(order, x)


def bessel_j_orders(max_order: int, x) -> np.ndarray:
    """
    J_0(x) ... J_max_order(x) for every element of ``x`` in one backward sweep.

    Args:
        max_order: Highest order required
        x: Scalar or array of real arguments

    Returns:
        np.ndarray: shape ``(max_order + 1,) + np.shape(x)``
    """
    max_order = _check_order(max_order)
    values = np.asarray(x, dtype=float)
    shape = values.shape
    flat = np.abs(values.ravel())
    negative = np.signbit(values.ravel())
    out = np.zeros((max_order + 1, flat.size))

    tiny = flat < 1e-30
    out[0, tiny] = 1.0
    live = ~tiny
    if live.any():
        xs = flat[live]
        top = min(max_order, support_order(float(xs.max())))
        start = _miller_start(top, float(xs.max()))
        block = np.zeros((top + 1, xs.size))
        upper = np.zeros_like(xs)
        current = np.ones_like(xs)
        norm = current.copy() if start > 0 else np.zeros_like(xs)
        scale = 2.0 / xs
        for k in range(start, 0, -1):
            lower = k * scale * current - upper
            upper, current = current, lower
            big = np.abs(current) > _RESCALE_AT
            if big.any():
                upper[big] *= _RESCALE_BY
                current[big] *= _RESCALE_BY
                norm[big] *= _RESCALE_BY
                block[:, big] *= _RESCALE_BY
            below = k - 1
            if below <= top:
                block[below] = current
            if below > 0 and below % 2 == 0:
                norm += current
        norm = 2.0 * norm + current
        block /= norm
        out[: top + 1, live] = block

    out[np.abs(out) < UNDERFLOW] = 0.0
    parity = np.where(np.arange(max_order + 1) % 2 == 1, -1.0, 1.0)[:, None]
    out = np.where(negative[None, :], parity * out, out)
    return out.reshape((max_order + 1,) + shape)


def _check_positive(x: float, name: str) -> float:
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"{name} requires a finite x > 0, got {x!r}")
    return x


def _neumann_terms(x: float) -> np.ndarray:
    top = int(x) + 60
    return bessel_j_orders(top + (top % 2) + 1, x)


def bessel_y0(x: float) -> float:
    """
    Bessel function of the second kind Y_0(x) for x > 0.

    Log series below 8, Neumann series in J_2k up to 25, asymptotic beyond.
    """
    x = _check_positive(x, "bessel_y0")
    if _use_asymptotic(0, x):
        return _asymptotic_jy(0, x)[1]
    log_term = math.log(0.5 * x) + EULER_GAMMA
    if x <= SERIES_LIMIT:
        quarter = 0.25 * x * x
        term, harmonic, total, k = 1.0, 0.0, 0.0, 0
        while True:
            k += 1
            term *= quarter / (k * k)
            harmonic += 1.0 / k
            contribution = (harmonic * term) if k % 2 else -(harmonic * term)
            total += contribution
            if abs(contribution) <= 1e-17 * max(abs(total), 1e-300) and k > 2:
                break
        return (2.0 / math.pi) * (log_term * bessel_j(0, x) + total)
    js = _neumann_terms(x)
    ks = np.arange(1, (js.shape[0] - 1) // 2 + 1)
    signs = np.where(ks % 2 == 1, -1.0, 1.0)
    tail = float(np.sum(signs * js[2 * ks] / ks))
    return (2.0 / math.pi) * log_term * js[0] - (4.0 / math.pi) * tail


def bessel_y1(x: float) -> float:
    """Bessel function of the second kind Y_1(x) for x > 0."""
    x = _check_positive(x, "bessel_y1")
    if _use_asymptotic(1, x):
        return _asymptotic_jy(1, x)[1]
    log_term = math.log(0.5 * x) + EULER_GAMMA
    if x <= SERIES_LIMIT:
        # digamma(k+1) + digamma(k+2) = -2*gamma + H_k + H_{k+1}
        quarter = -0.25 * x * x
        term, h_k, total, k = 1.0, 0.0, 0.0, 0
        while True:
            weight = -2.0 * EULER_GAMMA + 2.0 * h_k + 1.0 / (k + 1)
            contribution = weight * term
            total += contribution
            if k > 2 and abs(contribution) <= 1e-17 * max(abs(total), 1e-300):
                break
            k += 1
            h_k += 1.0 / k
            term *= quarter / (k * (k + 1))
        return (-2.0 / (math.pi * x)
                + (2.0 / math.pi) * math.log(0.5 * x) * bessel_j(1, x)
                - (0.5 * x / math.pi) * total)
    js = _neumann_terms(x)
    ks = np.arange(1, (js.shape[0] - 2) // 2 + 1)
    signs = np.where(ks % 2 == 1, -1.0, 1.0)
    tail = float(np.sum(signs * (js[2 * ks - 1] - js[2 * ks + 1]) / ks))
    return (2.0 / math.pi) * (log_term * js[1] - js[0] / x) + (2.0 / math.pi) * tail


def hankel1_0(x: float) -> complex:
    """
    Hankel function of the first kind H_0^(1)(x) = J_0(x) + i Y_0(x).

    :param x: Real argument, x > 0
    """
    x = _check_positive(x, "hankel1_0")
    if _use_asymptotic(0, x):
        j, y = _asymptotic_jy(0, x)
        return complex(_flush(j), y)
    return complex(bessel_j(0, x), bessel_y0(x))


def hankel1_0_array(x) -> np.ndarray:
    """
    Elementwise H_0^(1) over an array of positive arguments.

    Arguments above the asymptotic limit are evaluated in one vectorised pass
    with the same expansion as :func:`hankel1_0`; the rest fall back to the
    scalar routine.
    """
    values = np.asarray(x, dtype=float)
    if values.size and (not np.all(values > 0.0) or not np.all(np.isfinite(values))):
        raise DomainError("hankel1_0_array requires finite arguments > 0")
    out = np.empty(values.shape, dtype=complex)
    far = values > ASYMPTOTIC_LIMIT
    if far.any():
        xs = values[far]
        p = np.ones_like(xs)
        q = np.zeros_like(xs)
        term = np.ones_like(xs)
        for k in range(1, 31):
            term = term * (-float((2 * k - 1) ** 2)) / (8.0 * k * xs)
            sign = -1.0 if (k // 2) % 2 else 1.0
            if k % 2:
                q += sign * term
            else:
                p += sign * term
        cx, sx = np.cos(xs), np.sin(xs)
        c = (cx + sx) * _HALF_SQRT2
        s = (sx - cx) * _HALF_SQRT2
        amplitude = np.sqrt(2.0 / (np.pi * xs))
        j = amplitude * (p * c - q * s)
        j[np.abs(j) < UNDERFLOW] = 0.0
        out[far] = j + 1j * amplitude * (p * s + q * c)
    near = ~far
    if near.any():
        out[near] = [hankel1_0(v) for v in values[near]]
    return out
