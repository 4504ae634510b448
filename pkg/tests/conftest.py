import math

import numpy as np
import pytest
import yaml

from src.forward.synthesis import scattered_field
from src.ingest.fresnel import MultistaticRecords
from src.scene.geometry import SCENE_PRESETS, MeasurementConfig, wavenumber_for

K_4GHZ = wavenumber_for(4e9)


def make_config(alpha_deg: float = 90.0, n: int = 36, f_ghz: float = 4.0,
                tx_radius: float = 0.72, rx_radius: float = 0.76) -> MeasurementConfig:
    return MeasurementConfig(n, math.radians(alpha_deg), tx_radius, rx_radius, f_ghz * 1e9)


def measurement_section(alpha_deg: float = 90.0, n: int = 36, f_ghz: float = 4.0) -> dict:
    return {
        "n_samples": n,
        "bistatic_angle_deg": alpha_deg,
        "tx_radius_m": 0.72,
        "rx_radius_m": 0.76,
        "frequency_ghz": f_ghz,
    }


def write_config(directory, document: dict, name: str = "config.yaml") -> str:
    path = directory / name
    path.write_text(yaml.safe_dump(document, sort_keys=False))
    return str(path)


def multistatic_records(scene, frequencies_ghz=(4.0, 6.0), excluded_deg: float = 60.0,
                        tx_radius: float = 0.72, rx_radius: float = 0.76) -> MultistaticRecords:
    """
    Synthetic stand-in for a first-opus table: 36 transmitters every 10 deg,
    72 receivers every 5 deg, receivers within ``excluded_deg`` of their
    transmitter not recorded.
    """
    tx_angle, rx_angle, frequency, total, incident = [], [], [], [], []
    for f_ghz in frequencies_ghz:
        k = wavenumber_for(f_ghz * 1e9)
        pairs = []
        for i in range(36):
            for j in range(72):
                gap = abs((j * 5.0 - i * 10.0 + 180.0) % 360.0 - 180.0)
                if gap >= excluded_deg:
                    pairs.append((math.radians(i * 10.0), math.radians(j * 5.0)))
        angles = np.array(pairs)
        tx = tx_radius * np.stack([np.cos(angles[:, 0]), np.sin(angles[:, 0])], axis=1)
        rx = rx_radius * np.stack([np.cos(angles[:, 1]), np.sin(angles[:, 1])], axis=1)
        scattered = scattered_field(scene, k, tx, rx)
        # any nonzero incident field; only total - incident is used
        direct = 1e-3 * np.exp(1j * (angles[:, 1] - angles[:, 0]))
        tx_angle.extend(angles[:, 0])
        rx_angle.extend(angles[:, 1])
        frequency.extend([f_ghz * 1e9] * len(angles))
        total.extend(scattered + direct)
        incident.extend(direct)
    return MultistaticRecords(tx_angle, rx_angle, frequency, total, incident, "synthetic.exp")


@pytest.fixture
def k4():
    return K_4GHZ


@pytest.fixture
def single_disk():
    return SCENE_PRESETS["single_disk"]


@pytest.fixture
def two_disks():
    return SCENE_PRESETS["two_disks"]


@pytest.fixture(scope="session")
def fresnel_records():
    return multistatic_records(SCENE_PRESETS["single_disk"])
