import math

import numpy as np
import pytest

from src.analyze.imaging import ImagingGrid, IndicatorMap
from src.analyze.peaks import extract_peaks, localization_error
from src.models.errors import PreconditionError
from src.scene.geometry import Inhomogeneity, Point2, Scene

GRID = ImagingGrid(-0.1, 0.1, -0.1, 0.1, 101, 101)


def bumps(*centres, width=0.01):
    points = GRID.points()
    values = np.zeros((GRID.nx, GRID.ny))
    for (x, y), height in centres:
        values += height * np.exp(-((points[..., 0] - x) ** 2 + (points[..., 1] - y) ** 2) / (2 * width ** 2))
    return IndicatorMap(GRID, values / values.max(), normalized=True)


def scene_of(*centres):
    return Scene(tuple(Inhomogeneity(Point2(x, y), 1e-4, 3.0) for x, y in centres))


def test_peaks_sorted_by_value():
    indicator = bumps(((-0.04, 0.0), 1.0), ((0.04, 0.02), 0.8))
    peaks = extract_peaks(indicator, threshold=0.5)
    assert len(peaks) == 2
    assert peaks[0].location == pytest.approx((-0.04, 0.0), abs=1e-12)
    assert peaks[1].location == pytest.approx((0.04, 0.02), abs=1e-12)
    assert peaks[0].value == 1.0
    assert peaks[1].value == pytest.approx(0.8, rel=1e-6)


def test_threshold_filters_weak_peaks():
    indicator = bumps(((-0.04, 0.0), 1.0), ((0.04, 0.02), 0.4))
    assert len(extract_peaks(indicator, threshold=0.5)) == 1
    assert len(extract_peaks(indicator, threshold=0.3)) == 2


def test_exclusion_radius_keeps_the_stronger_peak():
    indicator = bumps(((-0.02, 0.0), 1.0), ((0.02, 0.0), 0.9), width=0.005)
    strict = extract_peaks(indicator, threshold=0.5, exclusion_radius=0.05)
    assert len(strict) == 1
    kept = strict[0]
    assert kept.location.x == pytest.approx(-0.02, abs=1e-12)
    assert len(extract_peaks(indicator, threshold=0.5, exclusion_radius=0.039)) == 2


def test_requires_normalized_map():
    indicator = bumps(((0.0, 0.0), 1.0))
    with pytest.raises(PreconditionError):
        extract_peaks(IndicatorMap(GRID, indicator.values * 3.0))


def test_border_and_plateau_are_not_peaks():
    values = np.zeros((GRID.nx, GRID.ny))
    values[0, 50] = 1.0
    values[40:43, 40:43] = 0.9
    assert len(extract_peaks(IndicatorMap(GRID, values, normalized=True), threshold=0.5)) == 0


def test_prominence_margin():
    values = np.full((GRID.nx, GRID.ny), 0.1)
    values[50, 50] = 1.0
    values[50, 51] = 1.0 - 1e-12
    indicator = IndicatorMap(GRID, values, normalized=True)
    assert len(extract_peaks(indicator, threshold=0.5)) == 0
    assert len(extract_peaks(indicator, threshold=0.5, min_prominence=0.0)) == 1


def test_peak_list_dict():
    peaks = extract_peaks(bumps(((0.0, 0.0), 1.0)), threshold=0.5, exclusion_radius=0.01)
    payload = peaks.to_dict()
    assert payload["threshold"] == 0.5 and payload["exclusion_radius_m"] == 0.01
    assert payload["peaks"][0]["i"] == 50 and payload["peaks"][0]["j"] == 50


def test_optimal_assignment():
    # greedy nearest matching would pair peak 0 with target 1
    indicator = bumps(((0.0, 0.0), 1.0), ((0.05, 0.0), 0.9))
    peaks = extract_peaks(indicator, threshold=0.5)
    truth = scene_of((-0.03, 0.0), (0.02, 0.0))
    localization = localization_error(peaks, truth)
    assert sorted(localization.pairs) == [(0, 0), (1, 1)]
    assert localization.errors == pytest.approx([0.03, 0.03], abs=1e-12)


def test_missed_targets_and_extra_peaks():
    peaks = extract_peaks(bumps(((0.0, 0.0), 1.0)), threshold=0.5)
    localization = localization_error(peaks, scene_of((0.002, 0.0), (0.08, 0.08)))
    assert localization.missed_targets == [1]
    assert localization.errors[0] == pytest.approx(0.002, abs=1e-12)
    assert localization.errors[1] == math.inf
    assert localization.to_dict()["errors_m"][1] is None

    extra = localization_error(peaks, Scene())
    assert extra.unmatched_peaks == [0]
    assert extra.errors == []
