"""
Point-spread structure of the bifocusing indicator.

For a target at distance d from the evaluation point the indicator behaves as

    K(d) = J_0(A) J_0(B) + 2 * sum_{q>=1} (-1)^q J_2q(A) J_2q(B)

with A = k (1 + cos alpha) d and B = k sin(alpha) d. The same kernel is the
angular mean of a plane-wave phase, which :func:`quadrature_kernel` evaluates
independently, and collapses to J_0(2 k |cos(alpha/2)| d).
"""
import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from src.models.errors import QuadratureError, QuadratureResidueWarning, TruncationWarning
from src.specfun.bessel import bessel_j, bessel_j_orders
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_TAIL_TOL = 1e-14
DEFAULT_Q_MAX = 100_000
AUTO_MARGIN = 16
QUADRATURE_TOL = 1e-13
QUADRATURE_START = 16
QUADRATURE_MAX_POINTS = 1 << 20
IMAGINARY_RESIDUE_LIMIT = 1e-10


@dataclass(frozen=True)
class SeriesParams:
    """
    :param wavenumber: k in 1/m
    :param alpha: Bistatic angle in radians
    :param q_max: Hard cap on the number of series terms
    :param tail_tol: Magnitude below which a series term is negligible
    :param auto_truncate: Stop at ceil(k * d_max) + 16 terms instead of always summing q_max
    """
    wavenumber: float
    alpha: float
    q_max: int = DEFAULT_Q_MAX
    tail_tol: float = DEFAULT_TAIL_TOL
    auto_truncate: bool = True

    def __post_init__(self):
        if not self.wavenumber > 0:
            raise ValueError(f"wavenumber must be positive, got {self.wavenumber!r}")
        if isinstance(self.q_max, bool) or int(self.q_max) != self.q_max or self.q_max < 1:
            raise ValueError(f"q_max must be a positive integer, got {self.q_max!r}")
        if not self.tail_tol > 0:
            raise ValueError(f"tail_tol must be positive, got {self.tail_tol!r}")

    def arguments(self, d) -> Tuple[np.ndarray, np.ndarray]:
        d = np.abs(np.asarray(d, dtype=float))
        return (self.wavenumber * (1.0 + math.cos(self.alpha)) * d,
                self.wavenumber * abs(math.sin(self.alpha)) * d)

    def auto_terms(self, d_max: float) -> int:
        return min(self.q_max, math.ceil(self.wavenumber * d_max) + AUTO_MARGIN)


def _series_parts(d, params: SeriesParams) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Leading product and alternating tail 2*sum (-1)^q J_2q(A) J_2q(B).

    Returns:
        tuple: (leading, tail, number of terms used)
    """
    d = np.asarray(d, dtype=float)
    a, b = params.arguments(d)
    d_max = float(np.max(np.abs(d))) if d.size else 0.0
    terms = params.auto_terms(d_max) if params.auto_truncate else params.q_max

    while True:
        ja = bessel_j_orders(2 * terms, a)
        jb = bessel_j_orders(2 * terms, b)
        q = np.arange(1, terms + 1)
        signs = np.where(q % 2 == 1, -1.0, 1.0).reshape((-1,) + (1,) * d.ndim)
        products = signs * ja[2 * q] * jb[2 * q]
        last = np.abs(products[-1]) if terms else np.zeros(d.shape)
        beyond = 2 * terms > np.maximum(a, b)
        certified = bool(np.all((last <= params.tail_tol) & beyond))
        if certified or terms >= params.q_max:
            break
        terms = min(params.q_max, 2 * terms)

    if not certified:
        warnings.warn(
            f"Series tail not certified below {params.tail_tol:g} after q_max={params.q_max} terms",
            TruncationWarning,
            stacklevel=3,
        )
    leading = ja[0] * jb[0]
    tail = 2.0 * np.sum(products, axis=0)
    return leading, tail, terms


def structure_kernel_array(d, params: SeriesParams) -> np.ndarray:
    """Vectorised :func:`structure_kernel` over an array of distances."""
    leading, tail, _ = _series_parts(d, params)
    return leading + tail


def structure_kernel(d: float, params: SeriesParams) -> float:
    """
    Bessel-series point-spread kernel at distance ``d``.

    :param d: Distance between evaluation point and target in metres, d >= 0
    :param params: Wavenumber, bistatic angle and truncation settings
    """
    if d < 0:
        raise ValueError(f"distance must be nonnegative, got {d!r}")
    return float(structure_kernel_array(np.array([d]), params)[0])


def collapsed_kernel(d: float, k: float, alpha: float) -> float:
    """Closed form J_0(2 k |cos(alpha/2)| d) of the structure kernel."""
    return bessel_j(0, 2.0 * k * abs(math.cos(0.5 * alpha)) * d)


@lru_cache(maxsize=None)
def j0_half_argument() -> float:
    """Smallest z > 0 with J_0(z) = 1/2."""
    return float(brentq(lambda z: bessel_j(0, z) - 0.5, 1.0, 2.0, xtol=1e-15))


def predicted_half_max_width(k: float, alpha: float) -> float:
    """Main-lobe FWHM of the collapsed kernel, inf at alpha = pi."""
    scale = 2.0 * k * abs(math.cos(0.5 * alpha))
    if scale < 1e-12 * k:
        return math.inf
    return 2.0 * j0_half_argument() / scale


def quadrature_kernel_complex(d: float, k: float, alpha: float, phi: float = 0.0) -> complex:
    """
    Angular mean of exp(i k d ((1 + cos alpha) cos(t - phi) - sin alpha sin(t - phi)))
    over one period, by the periodic trapezoid rule with point doubling.

    :raises QuadratureError: no convergence within the point cap
    """
    if d < 0:
        raise ValueError(f"distance must be nonnegative, got {d!r}")
    c1 = k * d * (1.0 + math.cos(alpha))
    c2 = k * d * math.sin(alpha)

    def integrand(theta: np.ndarray) -> np.ndarray:
        return np.exp(1j * (c1 * np.cos(theta - phi) - c2 * np.sin(theta - phi)))

    n = QUADRATURE_START
    estimate = complex(np.mean(integrand(2.0 * math.pi * np.arange(n) / n)))
    while n < QUADRATURE_MAX_POINTS:
        midpoints = 2.0 * math.pi * (np.arange(n) + 0.5) / n
        refined = 0.5 * (estimate + complex(np.mean(integrand(midpoints))))
        n *= 2
        if abs(refined - estimate) <= QUADRATURE_TOL:
            return refined
        estimate = refined
    raise QuadratureError(f"Phase integral did not converge with {QUADRATURE_MAX_POINTS} points (d={d}, alpha={alpha})")


def quadrature_kernel(d: float, k: float, alpha: float, phi: float = 0.0) -> float:
    """
    Real part of :func:`quadrature_kernel_complex`; an imaginary residue above
    1e-10 is reported as a :class:`QuadratureResidueWarning`.
    """
    value = quadrature_kernel_complex(d, k, alpha, phi)
    if abs(value.imag) > IMAGINARY_RESIDUE_LIMIT:
        warnings.warn(f"Imaginary residue {value.imag:.3e} at d={d}, alpha={alpha}",
                      QuadratureResidueWarning, stacklevel=2)
    return value.real


def _params(k: float, alpha: float, q_max: int, tail_tol: float = DEFAULT_TAIL_TOL) -> SeriesParams:
    return SeriesParams(k, alpha, q_max=q_max, tail_tol=tail_tol)


def profile_e1_array(x, k: float, alpha: float) -> np.ndarray:
    a, b = SeriesParams(k, alpha).arguments(x)
    return np.abs(bessel_j_orders(0, a)[0] * bessel_j_orders(0, b)[0])


def profile_e2_array(x, k: float, alpha: float, q_max: int = DEFAULT_Q_MAX,
                     tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    _, tail, _ = _series_parts(np.abs(np.asarray(x, dtype=float)), _params(k, alpha, q_max, tail_tol))
    return np.abs(tail)


def profile_e_array(x, k: float, alpha: float, q_max: int = DEFAULT_Q_MAX,
                    tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    return np.abs(structure_kernel_array(np.abs(np.asarray(x, dtype=float)), _params(k, alpha, q_max, tail_tol)))


def profile_e1(x: float, k: float, alpha: float) -> float:
    """|J_0(k(1 + cos alpha)|x|) J_0(k sin(alpha) |x|)|, the leading term alone."""
    return float(profile_e1_array(np.array([x]), k, alpha)[0])


def profile_e2(x: float, k: float, alpha: float, q_max: int = DEFAULT_Q_MAX) -> float:
    """Magnitude of the alternating Bessel tail of the kernel."""
    return float(profile_e2_array(np.array([x]), k, alpha, q_max)[0])


def profile_e(x: float, k: float, alpha: float, q_max: int = DEFAULT_Q_MAX) -> float:
    """Magnitude of the full kernel."""
    return float(profile_e_array(np.array([x]), k, alpha, q_max)[0])


def first_zero(xs: np.ndarray, values: np.ndarray) -> float:
    """
    Main-lobe edge of a magnitude profile: the first local minimum at x >= 0,
    to grid resolution. Returns inf if the profile never dips.
    """
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(xs)
    xs, values = xs[order], values[order]
    keep = xs >= 0
    xs, values = xs[keep], values[keep]
    for i in range(1, len(xs) - 1):
        if values[i] <= values[i - 1] and values[i] < values[i + 1]:
            return float(xs[i])
    return math.inf


PROFILE_FUNCTIONS = {
    "e": profile_e_array,
    "e1": lambda x, k, alpha, q_max, tail_tol: profile_e1_array(x, k, alpha),
    "e2": profile_e2_array,
}


def profile_column(alpha_deg: float) -> str:
    return f"alpha_{alpha_deg:g}deg"


def profile_table(kind: str, xs: Sequence[float], k: float, alphas_deg: Iterable[float],
                  q_max: int = DEFAULT_Q_MAX, tail_tol: float = DEFAULT_TAIL_TOL) -> pd.DataFrame:
    """
    Profile values on ``xs`` with one column per bistatic angle.

    :param kind: "e", "e1" or "e2"
    :param xs: Signed offsets in metres
    :param k: Wavenumber in 1/m
    :param alphas_deg: Bistatic angles in degrees
    """
    function = PROFILE_FUNCTIONS[kind]
    xs = np.asarray(xs, dtype=float)
    table = {"x_m": xs}
    for alpha_deg in alphas_deg:
        table[profile_column(alpha_deg)] = function(xs, k, math.radians(alpha_deg), q_max, tail_tol)
    return pd.DataFrame(table)


def oracle_residual_table(ds: Sequence[float], k: float, alphas_deg: Iterable[float],
                          q_max: int = DEFAULT_Q_MAX, tail_tol: float = DEFAULT_TAIL_TOL) -> pd.DataFrame:
    """
    Series kernel against the quadrature evaluation on a (d, alpha) grid.
    """
    ds = np.asarray(ds, dtype=float)
    rows = []
    for alpha_deg in alphas_deg:
        alpha = math.radians(alpha_deg)
        series = structure_kernel_array(ds, _params(k, alpha, q_max, tail_tol))
        for d, value in zip(ds, series):
            oracle = quadrature_kernel(float(d), k, alpha)
            rows.append({"d_m": float(d), "alpha_deg": float(alpha_deg), "series": float(value),
                         "quadrature": oracle, "residual": abs(float(value) - oracle)})
    table = pd.DataFrame(rows, columns=["d_m", "alpha_deg", "series", "quadrature", "residual"])
    if len(table):
        logger.info(f"Series vs quadrature: max residual {table['residual'].max():.3e} over {len(table)} points")
    return table


def tail_maximum(xs: Sequence[float], k: float, alphas_deg: Iterable[float],
                 q_max: int = DEFAULT_Q_MAX, tail_tol: float = DEFAULT_TAIL_TOL) -> Tuple[float, float, float]:
    """
    Largest tail magnitude over the sweep.

    Returns:
        tuple: (maximum value, |x| where it is attained, alpha in degrees)
    """
    best = (-math.inf, math.nan, math.nan)
    xs = np.asarray(xs, dtype=float)
    for alpha_deg in alphas_deg:
        values = profile_e2_array(xs, k, math.radians(alpha_deg), q_max, tail_tol)
        i = int(np.argmax(values))
        if values[i] > best[0]:
            best = (float(values[i]), float(abs(xs[i])), float(alpha_deg))
    return best


def untruncated(params: SeriesParams) -> SeriesParams:
    """Same parameters with every one of the q_max terms summed."""
    return replace(params, auto_truncate=False)
