"""
Bistatic acquisition geometry and ground-truth scene description.

Transmitters sit on a circle of radius T at angles theta_n = 2*pi*(n-1)/N and
each paired receiver sits on a circle of radius R at theta_n + alpha.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Tuple

import numpy as np
from typing_extensions import Self

from src.models.errors import ConfigError
from src.models.validation import check_keys, child, integer, number, number_list
from src.utils.logger import get_logger

logger = get_logger(__name__)

EPS0 = 8.8541878128e-12
MU0 = 1.25663706212e-6
SQRT_EPS0_MU0 = math.sqrt(EPS0 * MU0)
TWO_PI = 2.0 * math.pi
SEPARATION_WAVELENGTHS = 2.0

MEASUREMENT_KEYS = ("n_samples", "bistatic_angle_deg", "tx_radius_m", "rx_radius_m", "frequency_ghz")
TARGET_KEYS = ("center_m", "area_m2", "eps_ratio")


class Point2(NamedTuple):
    x: float
    y: float


def reduce_angle(angle: float) -> float:
    """Map an angle in radians onto [0, 2*pi)."""
    reduced = math.fmod(angle, TWO_PI)
    if reduced < 0.0:
        reduced += TWO_PI
    return 0.0 if reduced >= TWO_PI else reduced


def wavenumber_for(frequency_hz: float) -> float:
    return TWO_PI * frequency_hz * SQRT_EPS0_MU0


@dataclass(frozen=True)
class MeasurementConfig:
    n_samples: int
    bistatic_angle: float
    tx_radius: float
    rx_radius: float
    frequency: float

    def __post_init__(self):
        if isinstance(self.n_samples, bool) or int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        for name in ("tx_radius", "rx_radius", "frequency"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")
        if not math.isfinite(self.bistatic_angle):
            raise ValueError(f"bistatic_angle must be finite, got {self.bistatic_angle!r}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "bistatic_angle", reduce_angle(float(self.bistatic_angle)))

    @property
    def wavenumber(self) -> float:
        return wavenumber_for(self.frequency)

    @property
    def wavelength(self) -> float:
        return TWO_PI / self.wavenumber

    @property
    def angular_frequency(self) -> float:
        return TWO_PI * self.frequency

    @property
    def angular_step(self) -> float:
        return TWO_PI / self.n_samples

    @property
    def bistatic_angle_deg(self) -> float:
        return math.degrees(self.bistatic_angle)

    def with_angle(self, alpha: float) -> Self:
        return MeasurementConfig(self.n_samples, alpha, self.tx_radius, self.rx_radius, self.frequency)

    def reciprocal(self) -> Self:
        """Swap transmitter and receiver roles: T <-> R and alpha -> -alpha."""
        return MeasurementConfig(self.n_samples, -self.bistatic_angle, self.rx_radius, self.tx_radius,
                                 self.frequency)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "bistatic_angle_deg": self.bistatic_angle_deg,
            "tx_radius_m": self.tx_radius,
            "rx_radius_m": self.rx_radius,
            "frequency_ghz": self.frequency / 1e9,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "") -> Self:
        """
        Build a config from its JSON form (degrees and GHz at the boundary).

        :param payload: Mapping with the keys listed in ``MEASUREMENT_KEYS``
        :param pointer: JSON pointer of ``payload`` used in error messages
        """
        check_keys(payload, pointer, MEASUREMENT_KEYS)
        n_samples = integer(payload, "n_samples", pointer, minimum=1)
        alpha_deg = number(payload, "bistatic_angle_deg", pointer)
        tx_radius = number(payload, "tx_radius_m", pointer, positive=True)
        rx_radius = number(payload, "rx_radius_m", pointer, positive=True)
        frequency_ghz = number(payload, "frequency_ghz", pointer, positive=True)
        return cls(n_samples, math.radians(alpha_deg), tx_radius, rx_radius, frequency_ghz * 1e9)


@dataclass(frozen=True)
class Inhomogeneity:
    center: Point2
    area: float
    permittivity_ratio: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(float(self.center[0]), float(self.center[1])))
        if not (self.area > 0.0 and math.isfinite(self.area)):
            raise ValueError(f"area must be finite and positive, got {self.area!r}")
        if not (self.permittivity_ratio > 1.0 and math.isfinite(self.permittivity_ratio)):
            raise ValueError(f"permittivity_ratio must exceed 1, got {self.permittivity_ratio!r}")

    @property
    def permittivity(self) -> float:
        return self.permittivity_ratio * EPS0

    @property
    def contrast(self) -> float:
        """(eps_m - eps0) / (eps0 * mu0), the factor carried by the Born integral."""
        return (self.permittivity - EPS0) / (EPS0 * MU0)

    @property
    def strength(self) -> float:
        return self.area * self.contrast

    def to_dict(self) -> Dict[str, Any]:
        return {"center_m": [self.center.x, self.center.y], "area_m2": self.area,
                "eps_ratio": self.permittivity_ratio}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "") -> Self:
        check_keys(payload, pointer, TARGET_KEYS)
        center = number_list(payload, "center_m", pointer, length=2)
        area = number(payload, "area_m2", pointer, positive=True)
        ratio = number(payload, "eps_ratio", pointer)
        if not ratio > 1.0:
            raise ConfigError(child(pointer, "eps_ratio"), f"must exceed 1, got {ratio!r}")
        return cls(Point2(*center), area, ratio)


@dataclass(frozen=True)
class Scene:
    targets: Tuple[Inhomogeneity, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))

    def __len__(self) -> int:
        return len(self.targets)

    @property
    def centers(self) -> np.ndarray:
        return np.array([t.center for t in self.targets], dtype=float).reshape(-1, 2)

    @property
    def strengths(self) -> np.ndarray:
        return np.array([t.strength for t in self.targets], dtype=float)

    def scaled_contrast(self, factor: float) -> Self:
        """Scene whose every (eps_m - eps0) is multiplied by ``factor``."""
        return Scene(tuple(
            Inhomogeneity(t.center, t.area, 1.0 + factor * (t.permittivity_ratio - 1.0))
            for t in self.targets
        ))

    def to_dict(self) -> Dict[str, Any]:
        return {"targets": [t.to_dict() for t in self.targets]}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "") -> Self:
        check_keys(payload, pointer, ("targets",))
        targets = payload["targets"]
        if not isinstance(targets, list):
            raise ConfigError(child(pointer, "targets"), "expected a list")
        return cls(tuple(
            Inhomogeneity.from_dict(item, child(child(pointer, "targets"), i))
            for i, item in enumerate(targets)
        ))


DISK_AREA_15MM = math.pi * 0.015 ** 2

SCENE_PRESETS: Dict[str, Scene] = {
    "single_disk": Scene((Inhomogeneity(Point2(-0.030, 0.0), DISK_AREA_15MM, 3.0),)),
    "two_disks": Scene((
        Inhomogeneity(Point2(-0.045, 0.0), DISK_AREA_15MM, 3.0),
        Inhomogeneity(Point2(0.045, 0.010), DISK_AREA_15MM, 3.0),
    )),
}


def angular_positions(config: MeasurementConfig) -> List[Tuple[float, float]]:
    """
    Transmitter and receiver directions for every sample, reduced to [0, 2*pi).

    :param config: Acquisition geometry
    :return: list of (theta_n, theta_n + alpha) in radians
    """
    step = config.angular_step
    return [
        (reduce_angle(n * step), reduce_angle(n * step + config.bistatic_angle))
        for n in range(config.n_samples)
    ]


def array_positions(config: MeasurementConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Transmitter and receiver coordinates as two (N, 2) arrays.
    """
    angles = np.array(angular_positions(config), dtype=float).reshape(-1, 2)
    tx = config.tx_radius * np.stack([np.cos(angles[:, 0]), np.sin(angles[:, 0])], axis=1)
    rx = config.rx_radius * np.stack([np.cos(angles[:, 1]), np.sin(angles[:, 1])], axis=1)
    return tx, rx


def make_bistatic_array(config: MeasurementConfig) -> List[Tuple[Point2, Point2]]:
    """
    Pair every transmitter with its receiver at the fixed bistatic angle.

    :param config: Acquisition geometry
    :return: N (tx, rx) point pairs, transmitter n at angle 2*pi*(n-1)/N
    """
    tx, rx = array_positions(config)
    return [(Point2(*map(float, t)), Point2(*map(float, r))) for t, r in zip(tx, rx)]


def check_separation(scene: Scene, config: MeasurementConfig) -> List[Tuple[int, int, float]]:
    """
    Log a warning for every target pair closer than two wavelengths.

    Returns:
        list[tuple[int, int, float]]: (i, j, distance) for each offending pair
    """
    limit = SEPARATION_WAVELENGTHS * config.wavelength
    offending = []
    for i, first in enumerate(scene.targets):
        for j in range(i + 1, len(scene.targets)):
            second = scene.targets[j]
            distance = math.hypot(first.center.x - second.center.x, first.center.y - second.center.y)
            if distance < limit:
                offending.append((i, j, distance))
                logger.warning(
                    f"Targets {i} and {j} are {distance:.4f} m apart, below "
                    f"{SEPARATION_WAVELENGTHS:g} wavelengths ({limit:.4f} m)"
                )
    return offending
