"""
Extended-precision reference values for the cylinder functions.

Power series summed in mpmath at 50 significant digits, with the working
precision raised with the argument so that the alternating-term cancellation
of the series cannot reach the reported digits.
"""
from mpmath import mp

mp.dps = 50


def _digits(x) -> int:
    # largest series term is about exp(x); keep 50 digits beyond it
    return 50 + int(abs(float(x)) * 0.45) + 10


def _converged(term, total, k, x) -> bool:
    return k > abs(x) and abs(term) <= mp.mpf(10) ** (-mp.dps + 5) * max(abs(total), mp.mpf(10) ** -400)


def _j(order: int, x):
    half = x / 2
    term = half ** order / mp.factorial(order)
    total, k = term, 0
    while True:
        k += 1
        term *= -(half * half) / (k * (order + k))
        total += term
        if _converged(term, total, k, x):
            return total


def j_series(order: int, x: float) -> float:
    with mp.workdps(_digits(x)):
        return float(_j(order, mp.mpf(x)))


def y0_series(x: float) -> float:
    with mp.workdps(_digits(x)):
        x = mp.mpf(x)
        quarter = x * x / 4
        term, harmonic, total, k = mp.mpf(1), mp.mpf(0), mp.mpf(0), 0
        while True:
            k += 1
            term *= quarter / (k * k)
            harmonic += mp.mpf(1) / k
            contribution = harmonic * term if k % 2 else -harmonic * term
            total += contribution
            if _converged(contribution, total, k, x):
                break
        return float(2 / mp.pi * ((mp.log(x / 2) + mp.euler) * _j(0, x) + total))


def y1_series(x: float) -> float:
    with mp.workdps(_digits(x)):
        x = mp.mpf(x)
        half = x / 2
        total, k = mp.mpf(0), 0
        while True:
            term = (-1) ** k * (mp.digamma(k + 1) + mp.digamma(k + 2)) * half ** (2 * k + 1) \
                / (mp.factorial(k) * mp.factorial(k + 1))
            total += term
            if _converged(term, total, k, x):
                break
            k += 1
        return float(-2 / (mp.pi * x) + 2 / mp.pi * mp.log(half) * _j(1, x) - total / mp.pi)
