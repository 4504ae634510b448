import logging
import math

import numpy as np
import pytest

from src.models.errors import ConfigError
from src.scene.geometry import (
    EPS0,
    MU0,
    TWO_PI,
    Inhomogeneity,
    MeasurementConfig,
    Point2,
    Scene,
    angular_positions,
    check_separation,
    make_bistatic_array,
    reduce_angle,
    wavenumber_for,
)
from tests.conftest import make_config, measurement_section


def test_angular_positions_four_samples():
    config = make_config(alpha_deg=90.0, n=4)
    angles = angular_positions(config)
    expected = [(0.0, 0.5 * math.pi), (0.5 * math.pi, math.pi), (math.pi, 1.5 * math.pi), (1.5 * math.pi, 0.0)]
    for (tx, rx), (tx_expected, rx_expected) in zip(angles, expected):
        assert tx == pytest.approx(tx_expected, abs=1e-15)
        assert rx == pytest.approx(rx_expected, abs=1e-15)


def test_make_bistatic_array_radii():
    config = make_config(alpha_deg=60.0, n=12)
    pairs = make_bistatic_array(config)
    assert len(pairs) == 12
    for tx, rx in pairs:
        assert math.hypot(*tx) == pytest.approx(0.72, rel=1e-15)
        assert math.hypot(*rx) == pytest.approx(0.76, rel=1e-15)
    assert pairs[0][0] == Point2(0.72, 0.0)


@pytest.mark.parametrize("angle, expected", [(-0.5 * math.pi, 1.5 * math.pi), (TWO_PI, 0.0),
                                              (5 * math.pi, math.pi), (0.25, 0.25)])
def test_reduce_angle(angle, expected):
    assert reduce_angle(angle) == pytest.approx(expected, abs=1e-12)
    assert 0.0 <= reduce_angle(angle) < TWO_PI


def test_alpha_is_reduced_on_construction():
    assert make_config(alpha_deg=450.0).bistatic_angle == pytest.approx(0.5 * math.pi, abs=1e-12)
    assert make_config(alpha_deg=-90.0).bistatic_angle_deg == pytest.approx(270.0)


@pytest.mark.parametrize("kwargs", [
    {"n_samples": 0}, {"tx_radius": -1.0}, {"frequency": 0.0}, {"bistatic_angle": math.nan},
])
def test_invalid_measurement(kwargs):
    values = dict(n_samples=36, bistatic_angle=0.0, tx_radius=0.72, rx_radius=0.76, frequency=4e9)
    values.update(kwargs)
    with pytest.raises(ValueError):
        MeasurementConfig(**values)


def test_measurement_from_dict_reports_pointer():
    payload = measurement_section()
    payload["frequency_ghz"] = -4.0
    with pytest.raises(ConfigError) as info:
        MeasurementConfig.from_dict(payload, "/synth/measurement")
    assert info.value.pointer == "/synth/measurement/frequency_ghz"


def test_measurement_from_dict_rejects_unknown_key():
    payload = dict(measurement_section(), alpha=1.0)
    with pytest.raises(ConfigError) as info:
        MeasurementConfig.from_dict(payload, "/synth/measurement")
    assert info.value.pointer == "/synth/measurement/alpha"


def test_measurement_dict_round_trip():
    config = MeasurementConfig.from_dict(measurement_section(alpha_deg=135.0))
    again = MeasurementConfig.from_dict(config.to_dict())
    assert again.bistatic_angle == pytest.approx(config.bistatic_angle, rel=1e-15)
    assert (again.n_samples, again.tx_radius, again.rx_radius, again.frequency) == \
        (config.n_samples, config.tx_radius, config.rx_radius, config.frequency)


def test_wavenumber_at_four_gigahertz():
    assert wavenumber_for(4e9) == pytest.approx(83.8338, abs=1e-3)
    assert make_config().wavelength == pytest.approx(0.0749, abs=1e-4)


def test_contrast_is_verbatim():
    target = Inhomogeneity(Point2(0.0, 0.0), 1e-4, 3.0)
    assert target.contrast == pytest.approx(2.0 / MU0, rel=1e-12)
    assert target.permittivity == pytest.approx(3.0 * EPS0, rel=1e-15)


@pytest.mark.parametrize("area, ratio", [(0.0, 3.0), (1e-4, 1.0), (1e-4, 0.5)])
def test_invalid_inhomogeneity(area, ratio):
    with pytest.raises(ValueError):
        Inhomogeneity(Point2(0.0, 0.0), area, ratio)


def test_scene_from_dict_pointer():
    payload = {"targets": [{"center_m": [0.0, 0.0], "area_m2": 1e-4, "eps_ratio": 1.0}]}
    with pytest.raises(ConfigError) as info:
        Scene.from_dict(payload, "/synth/scene")
    assert info.value.pointer == "/synth/scene/targets/0/eps_ratio"


def test_scaled_contrast(single_disk):
    scaled = single_disk.scaled_contrast(2.0)
    assert scaled.targets[0].permittivity_ratio == pytest.approx(5.0)
    assert scaled.strengths[0] == pytest.approx(2.0 * single_disk.strengths[0], rel=1e-12)


def test_check_separation_warns(caplog):
    config = make_config()
    close = Scene((Inhomogeneity(Point2(0.0, 0.0), 1e-4, 3.0), Inhomogeneity(Point2(0.05, 0.0), 1e-4, 3.0)))
    with caplog.at_level(logging.WARNING):
        offending = check_separation(close, config)
    assert offending == [(0, 1, pytest.approx(0.05))]
    assert "below 2 wavelengths" in caplog.text


def test_check_separation_depends_on_wavelength(two_disks):
    assert len(check_separation(two_disks, make_config(f_ghz=4.0))) == 1
    assert check_separation(two_disks, make_config(f_ghz=10.0)) == []


def test_reciprocal_swaps_roles():
    config = make_config(alpha_deg=90.0)
    swapped = config.reciprocal()
    assert swapped.tx_radius == config.rx_radius
    assert swapped.rx_radius == config.tx_radius
    assert swapped.bistatic_angle_deg == pytest.approx(270.0)
    assert swapped.reciprocal().bistatic_angle == pytest.approx(config.bistatic_angle, rel=1e-14)


def test_centers_array(two_disks):
    np.testing.assert_array_equal(two_disks.centers, [[-0.045, 0.0], [0.045, 0.010]])
