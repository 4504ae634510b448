"""Peak picking on normalised indicator maps and localisation scoring."""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.analyze.imaging import IndicatorMap
from src.models.errors import PreconditionError
from src.scene.geometry import Point2, Scene
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_MIN_PROMINENCE = 1e-9
_NEIGHBOURS = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]


@dataclass(frozen=True)
class Peak:
    location: Point2
    value: float
    index: Tuple[int, int]

    def to_dict(self) -> Dict[str, Any]:
        return {"x_m": self.location.x, "y_m": self.location.y, "value": self.value,
                "i": self.index[0], "j": self.index[1]}


@dataclass(frozen=True)
class PeakList:
    peaks: Tuple[Peak, ...] = field(default_factory=tuple)
    threshold: float = 0.5
    exclusion_radius: float = 0.0

    def __len__(self) -> int:
        return len(self.peaks)

    def __iter__(self):
        return iter(self.peaks)

    def __getitem__(self, item) -> Peak:
        return self.peaks[item]

    def to_dict(self) -> Dict[str, Any]:
        return {"threshold": self.threshold, "exclusion_radius_m": self.exclusion_radius,
                "peaks": [p.to_dict() for p in self.peaks]}


def _strict_maxima(values: np.ndarray, min_prominence: float) -> np.ndarray:
    """Interior pixels exceeding all 8 neighbours by more than ``min_prominence``."""
    nx, ny = values.shape
    mask = np.zeros_like(values, dtype=bool)
    if nx < 3 or ny < 3:
        return mask
    centre = values[1:-1, 1:-1]
    interior = np.ones_like(centre, dtype=bool)
    for di, dj in _NEIGHBOURS:
        neighbour = values[1 + di:nx - 1 + di, 1 + dj:ny - 1 + dj]
        interior &= (centre - neighbour) > min_prominence
    mask[1:-1, 1:-1] = interior
    return mask


def extract_peaks(indicator: IndicatorMap, threshold: float = 0.5, exclusion_radius: float = 0.0,
                  min_prominence: float = DEFAULT_MIN_PROMINENCE) -> PeakList:
    """
    Greedy selection of strict local maxima on a normalised map.

    Candidates are interior pixels above ``threshold`` that exceed each of
    their 8 neighbours by more than ``min_prominence``. They are taken in
    descending value (ties by grid index i, then j) and a candidate closer
    than ``exclusion_radius`` to an accepted peak is dropped.

    :raises PreconditionError: when the map is not normalised
    """
    if not indicator.normalized:
        raise PreconditionError("extract_peaks requires a normalised map")
    values = indicator.values
    mask = _strict_maxima(values, min_prominence) & (values >= threshold)
    rows, cols = np.nonzero(mask)
    order = sorted(zip(rows.tolist(), cols.tolist()), key=lambda ij: (-values[ij], ij[0], ij[1]))

    xs, ys = indicator.grid.xs, indicator.grid.ys
    accepted: List[Peak] = []
    for i, j in order:
        location = Point2(float(xs[i]), float(ys[j]))
        if any(math.hypot(location.x - p.location.x, location.y - p.location.y) < exclusion_radius
               for p in accepted):
            continue
        accepted.append(Peak(location, float(values[i, j]), (i, j)))
    logger.info(f"Extracted {len(accepted)} peak(s) at threshold {threshold:g}")
    return PeakList(tuple(accepted), threshold, exclusion_radius)


@dataclass
class Localization:
    """
    ``errors[m]`` is the distance from target m to its assigned peak, or inf
    when the target was missed.
    """
    errors: List[float]
    pairs: List[Tuple[int, int]]
    missed_targets: List[int]
    unmatched_peaks: List[int]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "errors_m": [e if math.isfinite(e) else None for e in self.errors],
            "pairs": [{"peak": p, "target": t} for p, t in self.pairs],
            "missed_targets": self.missed_targets,
            "unmatched_peaks": self.unmatched_peaks,
        }


def localization_error(peaks: PeakList, scene: Scene) -> Localization:
    """
    Optimal one-to-one matching of peaks to true centres (minimum total distance).
    """
    n_peaks, n_targets = len(peaks), len(scene)
    errors = [math.inf] * n_targets
    if not n_peaks or not n_targets:
        return Localization(errors, [], list(range(n_targets)), list(range(n_peaks)))
    found = np.array([p.location for p in peaks], dtype=float)
    truth = scene.centers
    cost = np.hypot(found[:, None, 0] - truth[None, :, 0], found[:, None, 1] - truth[None, :, 1])
    peak_idx, target_idx = linear_sum_assignment(cost)
    pairs = []
    for p, t in zip(peak_idx.tolist(), target_idx.tolist()):
        errors[t] = float(cost[p, t])
        pairs.append((p, t))
    matched_targets = {t for _, t in pairs}
    matched_peaks = {p for p, _ in pairs}
    return Localization(
        errors,
        pairs,
        [t for t in range(n_targets) if t not in matched_targets],
        [p for p in range(n_peaks) if p not in matched_peaks],
    )
