"""
Bifocusing indicator maps over a rectangular imaging grid.

    I(x) = | sum_n u(r_n, t_n) / (G(t_n, x) G(r_n, x)) |

Samples are put in canonical (tx angle, rx angle) order and reduced with a
pairwise sum, so a map does not depend on the order samples arrive in.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from typing_extensions import Self

from src.analyze.theory import SeriesParams, structure_kernel_array
from src.forward.synthesis import Kernel, Provenance, ScatteredDataset
from src.models.errors import ConfigError, DataIOError, DegenerateError, PreconditionError, SingularityError
from src.models.validation import check_keys, integer, number_list
from src.scene.geometry import Scene
from src.specfun.green import FAR_FIELD_MIN_KR, far_field_green_array, green_array
from src.utils.dataframe import (
    dataframe_to_csv_text,
    parse_comment_meta,
    read_csv_text_as_dataframe,
    split_comment_header,
)
from src.utils.file import read_text, write_bytes
from src.utils.logger import get_logger

logger = get_logger(__name__)

GRID_CLEARANCE = 1e-6
PGM_MAXVAL = 65535
PAIRWISE_BLOCK = 8
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class ImagingGrid:
    x_min: float = -0.1
    x_max: float = 0.1
    y_min: float = -0.1
    y_max: float = 0.1
    nx: int = 128
    ny: int = 128

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("Grid bounds must satisfy x_min < x_max and y_min < y_max")
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"Grid needs at least 2 points per axis, got {self.nx}x{self.ny}")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def step(self) -> Tuple[float, float]:
        return (self.x_max - self.x_min) / (self.nx - 1), (self.y_max - self.y_min) / (self.ny - 1)

    def points(self) -> np.ndarray:
        """(nx, ny, 2) coordinates; ``points()[i, j] == (xs[i], ys[j])``."""
        gx, gy = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.stack([gx, gy], axis=-1)

    def to_dict(self) -> Dict[str, Any]:
        return {"x_range_m": [self.x_min, self.x_max], "y_range_m": [self.y_min, self.y_max],
                "nx": self.nx, "ny": self.ny}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "") -> Self:
        check_keys(payload, pointer, (), ("x_range_m", "y_range_m", "nx", "ny"))
        default = cls()
        x_range = number_list(payload, "x_range_m", pointer, length=2) if "x_range_m" in payload \
            else [default.x_min, default.x_max]
        y_range = number_list(payload, "y_range_m", pointer, length=2) if "y_range_m" in payload \
            else [default.y_min, default.y_max]
        nx = integer(payload, "nx", pointer, default.nx, minimum=2)
        ny = integer(payload, "ny", pointer, default.ny, minimum=2)
        try:
            return cls(x_range[0], x_range[1], y_range[0], y_range[1], nx, ny)
        except ValueError as e:
            raise ConfigError(pointer, str(e)) from e


@dataclass(frozen=True, eq=False)
class IndicatorMap:
    """Indicator values with ``values[i, j]`` evaluated at ``(grid.xs[i], grid.ys[j])``."""
    grid: ImagingGrid
    values: np.ndarray
    normalized: bool = False
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(f"Map values have shape {values.shape}, grid is {self.grid.nx}x{self.grid.ny}")
        object.__setattr__(self, "values", values)

    def argmax(self) -> Tuple[int, int]:
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return int(i), int(j)

    def argmax_location(self) -> Tuple[float, float]:
        i, j = self.argmax()
        return float(self.grid.xs[i]), float(self.grid.ys[j])


def pairwise_sum(terms: np.ndarray) -> np.ndarray:
    """Sum along axis 0 by recursive halving with a fixed split order."""
    n = terms.shape[0]
    if n <= PAIRWISE_BLOCK:
        total = terms[0].copy() if n else np.zeros(terms.shape[1:], dtype=terms.dtype)
        for i in range(1, n):
            total += terms[i]
        return total
    half = n // 2
    return pairwise_sum(terms[:half]) + pairwise_sum(terms[half:])


def _canonical_order(data: ScatteredDataset) -> np.ndarray:
    return np.lexsort((data.rx_angles, data.tx_angles))


def _check_grid_clearance(data: ScatteredDataset, points: np.ndarray):
    flat = points.reshape(-1, 2)
    for label, array in (("transmitter", data.tx), ("receiver", data.rx)):
        for n, position in enumerate(array):
            gap = np.hypot(flat[:, 0] - position[0], flat[:, 1] - position[1]).min()
            if gap < GRID_CLEARANCE:
                raise SingularityError(f"Grid point within {GRID_CLEARANCE} m of {label} {n + 1}")


def default_kernel(data: ScatteredDataset) -> Kernel:
    """Measured (Fresnel) data is imaged with the exact kernel, synthetic data with the far-field one."""
    return Kernel.EXACT if data.provenance is Provenance.FRESNEL else Kernel.FARFIELD


def indicator_map(data: ScatteredDataset, grid: ImagingGrid, kernel: Optional[Kernel] = None,
                  min_kr: float = FAR_FIELD_MIN_KR) -> IndicatorMap:
    """
    Evaluate the bifocusing indicator of a dataset on a grid.

    :param data: Bistatic scattered-field samples
    :param grid: Imaging grid
    :param kernel: Green's function used for the test vector, ``None`` for
        :func:`default_kernel` of the dataset
    :param min_kr: Far-field gate on k*T and k*R
    :raises SingularityError: a grid point coincides with an array element
    :raises PreconditionError: far-field gate violated
    """
    kernel = default_kernel(data) if kernel is None else Kernel(kernel)
    config = data.config
    k = config.wavenumber
    points = grid.points()
    if kernel is Kernel.FARFIELD:
        for label, radius in (("k*T", config.tx_radius), ("k*R", config.rx_radius)):
            if k * radius < min_kr:
                raise PreconditionError(f"Far-field kernel requires {label} >= {min_kr}, got {k * radius:.6g}")
    else:
        _check_grid_clearance(data, points)

    ordered = data.permuted(_canonical_order(data))
    values = np.zeros((grid.nx, grid.ny))
    rows = max(1, _CHUNK_ELEMENTS // max(1, len(ordered) * grid.ny))
    for start in range(0, grid.nx, rows):
        block = points[start:start + rows]
        if kernel is Kernel.FARFIELD:
            g_tx = far_field_green_array(k, config.tx_radius, ordered.tx_angles, block, min_kr)
            g_rx = far_field_green_array(k, config.rx_radius, ordered.rx_angles, block, min_kr)
        else:
            g_tx = green_array(k, ordered.tx[:, None, None, :], block[None])
            g_rx = green_array(k, ordered.rx[:, None, None, :], block[None])
        terms = ordered.values[:, None, None] / (g_tx * g_rx)
        values[start:start + rows] = np.abs(pairwise_sum(terms))

    logger.info(
        f"Indicator map {grid.nx}x{grid.ny} from {len(data)} samples "
        f"(alpha={config.bistatic_angle_deg:g} deg, kernel={kernel.value})"
    )
    meta = {"alpha_deg": config.bistatic_angle_deg, "frequency_ghz": config.frequency / 1e9,
            "kernel": kernel.value, "provenance": data.provenance.value}
    return IndicatorMap(grid, values, False, meta)


def normalize_map(indicator: IndicatorMap) -> IndicatorMap:
    """
    Divide by the maximum so the largest value is exactly 1.

    :raises DegenerateError: when the map is identically zero
    """
    peak = float(np.max(indicator.values))
    if not peak > 0.0:
        raise DegenerateError("Cannot normalise a map whose maximum is zero")
    return replace(indicator, values=indicator.values / peak, normalized=True)


def theory_map(scene: Scene, grid: ImagingGrid, params: SeriesParams, n_samples: int) -> IndicatorMap:
    """
    Indicator predicted by the structure kernel for point-like targets:
    |N k^2 sum_m area_m contrast_m K(|x - z_m|)|.
    """
    points = grid.points()
    k = params.wavenumber
    total = np.zeros((grid.nx, grid.ny))
    for target in scene.targets:
        distance = np.hypot(points[..., 0] - target.center.x, points[..., 1] - target.center.y)
        total = total + target.strength * structure_kernel_array(distance, params)
    values = np.abs(n_samples * k * k * total)
    meta = {"alpha_deg": math.degrees(params.alpha), "kernel": "theory", "n_samples": n_samples}
    return IndicatorMap(grid, values, False, meta)


def _crossing(positions: np.ndarray, values: np.ndarray, start: int, step: int, level: float) -> float:
    i = start
    while 0 <= i + step < len(values):
        nxt = i + step
        if values[nxt] < level:
            fraction = (values[i] - level) / (values[i] - values[nxt])
            return float(positions[i] + fraction * (positions[nxt] - positions[i]))
        i = nxt
    return math.nan


def half_max_width(indicator: IndicatorMap, axis: str = "x") -> float:
    """
    Full width at half maximum of the main lobe through the map maximum.

    :param indicator: Map to measure
    :param axis: "x" for the slice along x, "y" for the slice along y
    :return: Width in metres, inf if the lobe does not fall to half within the grid
    """
    i, j = indicator.argmax()
    if axis == "x":
        positions, profile, centre = indicator.grid.xs, indicator.values[:, j], i
    elif axis == "y":
        positions, profile, centre = indicator.grid.ys, indicator.values[i, :], j
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    level = 0.5 * profile[centre]
    left = _crossing(positions, profile, centre, -1, level)
    right = _crossing(positions, profile, centre, 1, level)
    if math.isnan(left) or math.isnan(right):
        return math.inf
    return right - left


def map_to_dataframe(indicator: IndicatorMap) -> pd.DataFrame:
    gx, gy = np.meshgrid(indicator.grid.xs, indicator.grid.ys, indexing="ij")
    return pd.DataFrame({"x_m": gx.ravel(), "y_m": gy.ravel(), "value": indicator.values.ravel()},
                        columns=["x_m", "y_m", "value"])


def _meta_lines(indicator: IndicatorMap) -> Dict[str, Any]:
    meta = {"normalized": str(indicator.normalized).lower(), "nx": indicator.grid.nx, "ny": indicator.grid.ny}
    for key in sorted(indicator.meta):
        meta[key] = indicator.meta[key]
    return meta


def _pgm(indicator: IndicatorMap) -> bytes:
    values = indicator.values
    peak = float(values.max()) if values.size else 0.0
    if peak > 0.0:
        scaled = np.rint(np.clip(values / peak, 0.0, 1.0) * PGM_MAXVAL)
    else:
        scaled = np.zeros_like(values)
    # image rows run from y_max down to y_min, columns from x_min to x_max
    image = scaled.T[::-1].astype(">u2")
    comment = " ".join(f"{key}={value}" for key, value in _meta_lines(indicator).items())
    header = f"P5\n# {comment}\n{indicator.grid.nx} {indicator.grid.ny}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + image.tobytes()


def export_map(indicator: IndicatorMap, fmt: str = "csv") -> bytes:
    """
    Serialise a map.

    CSV: ``# key: value`` metadata, header ``x_m,y_m,value`` and nx*ny rows
    with x as the slow index. PGM: binary P5, 16-bit big-endian, linear
    scaling of [0, max] onto [0, 65535], first image row at y_max.
    """
    if not np.all(np.isfinite(indicator.values)):
        raise PreconditionError("Cannot export a map with non-finite values")
    if fmt == "csv":
        return dataframe_to_csv_text(map_to_dataframe(indicator), _meta_lines(indicator)).encode("utf-8")
    if fmt == "pgm":
        return _pgm(indicator)
    raise ValueError(f"Unsupported map format {fmt!r}")


def import_map_csv(content: str, source: str = "<memory>") -> IndicatorMap:
    """Rebuild a map from the CSV produced by :func:`export_map`."""
    comments, body = split_comment_header(content)
    meta = parse_comment_meta(comments)
    df = read_csv_text_as_dataframe(body, source)
    if list(df.columns) != ["x_m", "y_m", "value"]:
        raise DataIOError(source, f"Unexpected map header in {source}: {list(df.columns)}")
    xs = np.unique(df["x_m"].to_numpy(dtype=float))
    ys = np.unique(df["y_m"].to_numpy(dtype=float))
    if len(xs) * len(ys) != len(df):
        raise DataIOError(source, f"Map in {source} is not a full {len(xs)}x{len(ys)} grid")
    grid = ImagingGrid(float(xs[0]), float(xs[-1]), float(ys[0]), float(ys[-1]), len(xs), len(ys))
    values = df["value"].to_numpy(dtype=float).reshape(len(xs), len(ys))
    normalized = meta.pop("normalized", "false") == "true"
    for key in ("nx", "ny"):
        meta.pop(key, None)
    return IndicatorMap(grid, values, normalized, meta)


def write_map(indicator: IndicatorMap, path: str, fmt: Optional[str] = None):
    fmt = fmt or ("pgm" if path.endswith(".pgm") else "csv")
    content_type = "image/x-portable-graymap" if fmt == "pgm" else "text/csv"
    write_bytes(path, export_map(indicator, fmt), content_type)


def read_map(path: str) -> IndicatorMap:
    return import_map_csv(read_text(path), path)
