"""
Born-approximation synthesis of bistatic scattered fields and seeded noise.

The point-target model sums, over every inhomogeneity m,

    u(r_n, t_n) = k^2 * area_m * contrast_m * G(t_n, z_m) * G(r_n, z_m)

with G the exact Green's function or its far-field form.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict

import numpy as np
import pandas as pd
from typing_extensions import Self

from src.models.errors import DataIOError, DegenerateError, SingularityError
from src.scene.geometry import MeasurementConfig, Scene, angular_positions, array_positions, reduce_angle
from src.specfun.green import FAR_FIELD_MIN_KR, far_field_green_array, green_array
from src.utils.dataframe import (
    dataframe_to_csv_text,
    parse_comment_meta,
    read_csv_text_as_dataframe,
    split_comment_header,
)
from src.utils.file import read_text, write_text
from src.utils.logger import get_logger

logger = get_logger(__name__)

ARRAY_CLEARANCE = 1e-6
DATASET_COLUMNS = ["n", "theta_deg", "tx_x", "tx_y", "rx_x", "rx_y", "re", "im"]


class Kernel(str, Enum):
    EXACT = "exact"
    FARFIELD = "farfield"


class Provenance(str, Enum):
    SYNTHETIC_EXACT = "synthetic_exact"
    SYNTHETIC_FARFIELD = "synthetic_farfield"
    FRESNEL = "fresnel"


@dataclass(frozen=True, eq=False)
class ScatteredDataset:
    """
    N complex samples u_scat(r_n, t_n) for one (alpha, frequency) pair.

    ``tx`` and ``rx`` are (N, 2) coordinate arrays, ``tx_angles`` and
    ``rx_angles`` the matching directions in radians and ``values`` the
    complex samples.
    """
    config: MeasurementConfig
    tx: np.ndarray
    rx: np.ndarray
    tx_angles: np.ndarray
    rx_angles: np.ndarray
    values: np.ndarray
    provenance: Provenance
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        n = self.config.n_samples
        for name in ("tx", "rx"):
            array = np.asarray(getattr(self, name), dtype=float).reshape(-1, 2)
            object.__setattr__(self, name, array)
        for name in ("tx_angles", "rx_angles"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).ravel())
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex).ravel())
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        lengths = {len(self.tx), len(self.rx), len(self.tx_angles), len(self.rx_angles), len(self.values)}
        if lengths != {n}:
            raise ValueError(f"Dataset arrays must all hold n_samples={n} entries, got lengths {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.values)

    def with_values(self, values: np.ndarray, **meta) -> Self:
        return replace(self, values=np.asarray(values, dtype=complex), meta={**self.meta, **meta})

    def permuted(self, order) -> Self:
        order = np.asarray(order)
        return replace(self, tx=self.tx[order], rx=self.rx[order], tx_angles=self.tx_angles[order],
                       rx_angles=self.rx_angles[order], values=self.values[order])

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.values) ** 2)) if len(self) else 0.0


def _check_clearance(scene: Scene, tx: np.ndarray, rx: np.ndarray):
    if not len(scene):
        return
    centers = scene.centers
    for label, array in (("transmitter", tx), ("receiver", rx)):
        gaps = np.hypot(array[:, None, 0] - centers[None, :, 0], array[:, None, 1] - centers[None, :, 1])
        if gaps.size and gaps.min() < ARRAY_CLEARANCE:
            n, m = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
            raise SingularityError(f"Target {m} lies within {ARRAY_CLEARANCE} m of {label} {n + 1}")


def scattered_field(scene: Scene, k: float, tx: np.ndarray, rx: np.ndarray) -> np.ndarray:
    """
    Exact-kernel Born samples for arbitrary transmitter/receiver coordinate pairs.

    :param scene: Point-like inhomogeneities
    :param k: Wavenumber in 1/m
    :param tx: (N, 2) transmitter coordinates
    :param rx: (N, 2) receiver coordinates
    :return: complex array of N samples
    """
    tx = np.asarray(tx, dtype=float).reshape(-1, 2)
    rx = np.asarray(rx, dtype=float).reshape(-1, 2)
    _check_clearance(scene, tx, rx)
    total = np.zeros(len(tx), dtype=complex)
    for target in scene.targets:
        center = np.asarray(target.center, dtype=float)
        total = total + (k * k * target.strength) * green_array(k, tx, center) * green_array(k, rx, center)
    return total


def _far_field_samples(scene: Scene, config: MeasurementConfig, tx_angles: np.ndarray,
                       rx_angles: np.ndarray, min_kr: float) -> np.ndarray:
    k = config.wavenumber
    total = np.zeros(len(tx_angles), dtype=complex)
    for target in scene.targets:
        center = np.asarray(target.center, dtype=float)
        g_tx = far_field_green_array(k, config.tx_radius, tx_angles, center, min_kr)
        g_rx = far_field_green_array(k, config.rx_radius, rx_angles, center, min_kr)
        total = total + (k * k * target.strength) * g_tx * g_rx
    return total


def synth_scattered(scene: Scene, config: MeasurementConfig, kernel: Kernel = Kernel.EXACT,
                    min_kr: float = FAR_FIELD_MIN_KR) -> ScatteredDataset:
    """
    Synthesise the bistatic dataset of a scene under the Born approximation.

    :param scene: Ground-truth inhomogeneities
    :param config: Acquisition geometry
    :param kernel: Exact Green's function or its far-field form
    :param min_kr: Far-field gate on k*T and k*R
    :raises SingularityError: if a target sits on the array
    """
    kernel = Kernel(kernel)
    tx, rx = array_positions(config)
    angles = np.array(angular_positions(config), dtype=float).reshape(-1, 2)
    _check_clearance(scene, tx, rx)
    if kernel is Kernel.EXACT:
        values = scattered_field(scene, config.wavenumber, tx, rx)
        provenance = Provenance.SYNTHETIC_EXACT
    else:
        values = _far_field_samples(scene, config, angles[:, 0], angles[:, 1], min_kr)
        provenance = Provenance.SYNTHETIC_FARFIELD
    logger.info(
        f"Synthesised {config.n_samples} samples for {len(scene)} target(s) "
        f"at alpha={config.bistatic_angle_deg:.3f} deg, f={config.frequency / 1e9:g} GHz, kernel={kernel.value}"
    )
    return ScatteredDataset(config, tx, rx, angles[:, 0], angles[:, 1], values, provenance,
                            {"kernel": kernel.value})


def add_noise(data: ScatteredDataset, snr_db: float, seed: int) -> ScatteredDataset:
    """
    Add circular complex white Gaussian noise at a given dataset-level SNR.

    Noise variance per sample is mean(|u|^2) * 10^(-snr_db/10); the generator is
    numpy's PCG64 seeded with ``seed`` and draws one (N, 2) standard-normal block
    (column 0 real parts, column 1 imaginary parts).

    :param data: Clean dataset
    :param snr_db: Signal-to-noise ratio in dB, ``math.inf`` for no noise
    :param seed: Generator seed
    :raises DegenerateError: when every sample is zero
    """
    if math.isinf(snr_db) and snr_db > 0:
        return data
    if not len(data):
        raise DegenerateError("Cannot add noise to an empty dataset")
    signal_power = data.power
    if signal_power == 0.0:
        raise DegenerateError("Cannot scale noise to an all-zero dataset")
    noise_power = signal_power * 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((len(data), 2))
    noise = math.sqrt(noise_power / 2.0) * (draws[:, 0] + 1j * draws[:, 1])
    logger.info(f"Added {snr_db:g} dB white Gaussian noise with seed {seed}")
    return data.with_values(data.values + noise, snr_db=snr_db, seed=seed)


def measured_snr_db(clean: ScatteredDataset, noisy: ScatteredDataset) -> float:
    """Empirical SNR of ``noisy`` against ``clean`` in dB."""
    signal = np.sum(np.abs(clean.values) ** 2)
    noise = np.sum(np.abs(noisy.values - clean.values) ** 2)
    return float(10.0 * np.log10(signal / noise))


def dataset_to_dataframe(data: ScatteredDataset) -> pd.DataFrame:
    return pd.DataFrame({
        "n": np.arange(1, len(data) + 1),
        "theta_deg": np.degrees(data.tx_angles),
        "tx_x": data.tx[:, 0],
        "tx_y": data.tx[:, 1],
        "rx_x": data.rx[:, 0],
        "rx_y": data.rx[:, 1],
        "re": data.values.real,
        "im": data.values.imag,
    }, columns=DATASET_COLUMNS)


def format_dataset(data: ScatteredDataset) -> str:
    """
    CSV text of a dataset: ``# key: value`` metadata lines, then the
    ``n,theta_deg,tx_x,tx_y,rx_x,rx_y,re,im`` table.
    """
    config = data.config
    meta = {
        "n_samples": config.n_samples,
        "bistatic_angle_rad": repr(config.bistatic_angle),
        "tx_radius_m": repr(config.tx_radius),
        "rx_radius_m": repr(config.rx_radius),
        "frequency_hz": repr(config.frequency),
        "provenance": data.provenance.value,
    }
    for key in sorted(data.meta):
        meta[key] = data.meta[key]
    return dataframe_to_csv_text(dataset_to_dataframe(data), meta)


def parse_dataset(text: str, source: str = "<memory>") -> ScatteredDataset:
    """Inverse of :func:`format_dataset`."""
    comments, body = split_comment_header(text)
    meta = parse_comment_meta(comments)
    df = read_csv_text_as_dataframe(body, source)
    if list(df.columns) != DATASET_COLUMNS:
        raise DataIOError(source, f"Unexpected dataset header in {source}: {list(df.columns)}")
    try:
        config = MeasurementConfig(
            int(meta.pop("n_samples", len(df))),
            float(meta.pop("bistatic_angle_rad", "0")),
            float(meta.pop("tx_radius_m")),
            float(meta.pop("rx_radius_m")),
            float(meta.pop("frequency_hz")),
        )
        provenance = Provenance(meta.pop("provenance", Provenance.SYNTHETIC_EXACT.value))
    except (KeyError, ValueError) as e:
        raise DataIOError(source, f"Incomplete dataset metadata in {source}: {str(e)}") from e
    tx = df[["tx_x", "tx_y"]].to_numpy(dtype=float)
    rx = df[["rx_x", "rx_y"]].to_numpy(dtype=float)
    tx_angles = np.array([reduce_angle(a) for a in np.arctan2(tx[:, 1], tx[:, 0])])
    rx_angles = np.array([reduce_angle(a) for a in np.arctan2(rx[:, 1], rx[:, 0])])
    values = df["re"].to_numpy(dtype=float) + 1j * df["im"].to_numpy(dtype=float)
    try:
        return ScatteredDataset(config, tx, rx, tx_angles, rx_angles, values, provenance, meta)
    except ValueError as e:
        raise DataIOError(source, f"Inconsistent dataset in {source}: {str(e)}") from e


def write_dataset(data: ScatteredDataset, path: str):
    write_text(path, format_dataset(data), content_type="text/csv")
    logger.info(f"Dataset with {len(data)} samples saved to {path}")


def read_dataset(path: str) -> ScatteredDataset:
    return parse_dataset(read_text(path), path)
