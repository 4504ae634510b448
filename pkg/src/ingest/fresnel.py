"""
Reader for the first-opus Institut Fresnel multistatic TM tables and
extraction of fixed-bistatic-angle subsets at one frequency.
"""
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from typing_extensions import Self

from src.forward.synthesis import Provenance, ScatteredDataset
from src.models.errors import ConfigError, CoverageError, FresnelParseError, PreconditionError, UnitError
from src.models.validation import boolean, check_keys, child, integer, number, text
from src.scene.geometry import TWO_PI, MeasurementConfig, reduce_angle
from src.utils.file import read_text
from src.utils.logger import get_logger

logger = get_logger(__name__)

ROLES = ("tx", "rx", "freq", "re_total", "im_total", "re_incident", "im_incident")
SKIP = "skip"
FREQUENCY_UNITS = {"Hz": 1.0, "MHz": 1e6, "GHz": 1e9}
FREQUENCY_RANGE_HZ = (0.1e9, 20e9)
DEFAULT_TX_RADIUS_M = 0.72
DEFAULT_RX_RADIUS_M = 0.76


@dataclass(frozen=True)
class ColumnMap:
    """
    Layout of a whitespace-separated numeric Fresnel table.

    ``columns`` lists a role per column: every entry of ``ROLES`` exactly once,
    plus any number of ``"skip"`` columns. Angles are either given in degrees
    or as 1-based (by default) indices multiplied by a stride in degrees.
    """
    columns: Tuple[str, ...] = ROLES
    tx_mode: str = "index"
    tx_stride_deg: float = 10.0
    tx_index_base: int = 1
    rx_mode: str = "index"
    rx_stride_deg: float = 5.0
    rx_index_base: int = 1
    rx_relative: bool = False
    frequency_unit: str = "GHz"
    comment_prefix: str = "#"

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        for role in ROLES:
            if self.columns.count(role) != 1:
                raise ValueError(f"Column role {role!r} must appear exactly once in {self.columns}")
        unknown = [c for c in self.columns if c not in ROLES and c != SKIP]
        if unknown:
            raise ValueError(f"Unknown column roles {unknown}")
        for mode in (self.tx_mode, self.rx_mode):
            if mode not in ("index", "degrees"):
                raise ValueError(f"Angle mode must be 'index' or 'degrees', got {mode!r}")
        if self.frequency_unit not in FREQUENCY_UNITS:
            raise ValueError(f"Frequency unit must be one of {sorted(FREQUENCY_UNITS)}")
        if not (self.tx_stride_deg > 0 and self.rx_stride_deg > 0):
            raise ValueError("Angular strides must be positive")
        if not self.comment_prefix:
            raise ValueError("comment_prefix must not be empty")

    def position(self, role: str) -> int:
        return self.columns.index(role)

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["columns"] = list(self.columns)
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "") -> Self:
        """
        Build a map from a preset name plus optional field overrides.
        """
        fields = ("columns", "tx_mode", "tx_stride_deg", "tx_index_base", "rx_mode", "rx_stride_deg",
                  "rx_index_base", "rx_relative", "frequency_unit", "comment_prefix")
        check_keys(payload, pointer, (), ("preset",) + fields)
        preset_name = text(payload, "preset", pointer, "fresnel_tm", choices=PRESETS)
        base = PRESETS[preset_name]
        overrides: Dict[str, Any] = {}
        if "columns" in payload:
            columns = payload["columns"]
            if not isinstance(columns, list) or not all(isinstance(c, str) for c in columns):
                raise ConfigError(child(pointer, "columns"), "expected a list of role names")
            overrides["columns"] = tuple(columns)
        for key in ("tx_mode", "rx_mode"):
            if key in payload:
                overrides[key] = text(payload, key, pointer, choices=("index", "degrees"))
        for key in ("tx_stride_deg", "rx_stride_deg"):
            if key in payload:
                overrides[key] = number(payload, key, pointer, positive=True)
        for key in ("tx_index_base", "rx_index_base"):
            if key in payload:
                overrides[key] = integer(payload, key, pointer)
        if "rx_relative" in payload:
            overrides["rx_relative"] = boolean(payload, "rx_relative", pointer)
        if "frequency_unit" in payload:
            overrides["frequency_unit"] = text(payload, "frequency_unit", pointer, choices=FREQUENCY_UNITS)
        if "comment_prefix" in payload:
            overrides["comment_prefix"] = text(payload, "comment_prefix", pointer)
        try:
            return replace(base, **overrides)
        except ValueError as e:
            raise ConfigError(pointer, str(e)) from e


PRESETS: Dict[str, ColumnMap] = {
    "fresnel_tm": ColumnMap(),
    "fresnel_tm_relative": ColumnMap(rx_relative=True),
}


@dataclass(frozen=True, eq=False)
class MultistaticRecords:
    """
    Parsed table rows as parallel arrays: angles in radians, frequency in Hz,
    complex total and incident fields. ``scattered`` marks tables whose
    ``total`` column already holds total - incident.
    """
    tx_angle: np.ndarray
    rx_angle: np.ndarray
    frequency: np.ndarray
    total: np.ndarray
    incident: np.ndarray
    source_name: str = "<memory>"
    scattered: bool = False

    def __post_init__(self):
        for name in ("tx_angle", "rx_angle", "frequency"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).ravel())
        for name in ("total", "incident"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex).ravel())
        lengths = {len(self.tx_angle), len(self.rx_angle), len(self.frequency), len(self.total), len(self.incident)}
        if len(lengths) > 1:
            raise ValueError(f"Record arrays differ in length: {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.total)

    def frequencies(self) -> List[float]:
        return sorted(set(self.frequency.tolist()))

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({
            "tx_deg": np.degrees(self.tx_angle),
            "rx_deg": np.degrees(self.rx_angle),
            "frequency_hz": self.frequency,
            "total": self.total,
            "incident": self.incident,
        })


def _angle(value: float, mode: str, stride: float, base: int) -> float:
    degrees = (value - base) * stride if mode == "index" else value
    return math.radians(degrees)


def parse_fresnel_text(content: str, column_map: ColumnMap = PRESETS["fresnel_tm"],
                       source_name: str = "<memory>") -> MultistaticRecords:
    """
    Parse the text of a Fresnel table.

    :param content: File content
    :param column_map: Column layout and conventions
    :param source_name: Name recorded on the records and used in messages
    :raises FresnelParseError: malformed rows, with line number and token
    :raises UnitError: frequencies outside [0.1, 20] GHz after unit scaling
    """
    width = len(column_map.columns)
    where = {role: column_map.position(role) for role in ROLES}
    unit = FREQUENCY_UNITS[column_map.frequency_unit]
    rows: List[Tuple[float, ...]] = []
    seen: Dict[Tuple[float, float, float], int] = {}

    for line_number, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(column_map.comment_prefix):
            continue
        if not line.isascii():
            bad = next(ch for ch in line if not ch.isascii())
            raise FresnelParseError(line_number, bad, "non-ASCII character")
        tokens = line.split()
        if len(tokens) != width:
            raise FresnelParseError(line_number, line, f"expected {width} fields, found {len(tokens)}")
        values = []
        for token in tokens:
            try:
                value = float(token)
            except ValueError:
                raise FresnelParseError(line_number, token, "not a number") from None
            if not math.isfinite(value):
                raise FresnelParseError(line_number, token, "not a finite number")
            values.append(value)

        tx = reduce_angle(_angle(values[where["tx"]], column_map.tx_mode, column_map.tx_stride_deg,
                                 column_map.tx_index_base))
        rx = _angle(values[where["rx"]], column_map.rx_mode, column_map.rx_stride_deg, column_map.rx_index_base)
        rx = reduce_angle(tx + rx if column_map.rx_relative else rx)
        frequency = values[where["freq"]] * unit
        if not FREQUENCY_RANGE_HZ[0] <= frequency <= FREQUENCY_RANGE_HZ[1]:
            raise UnitError(
                f"{source_name} line {line_number}: frequency {frequency / 1e9:g} GHz outside "
                f"[{FREQUENCY_RANGE_HZ[0] / 1e9:g}, {FREQUENCY_RANGE_HZ[1] / 1e9:g}] GHz"
            )
        key = (tx, rx, frequency)
        if key in seen:
            raise FresnelParseError(line_number, line, f"duplicates the measurement on line {seen[key]}")
        seen[key] = line_number
        rows.append((tx, rx, frequency,
                     complex(values[where["re_total"]], values[where["im_total"]]),
                     complex(values[where["re_incident"]], values[where["im_incident"]])))

    if not rows:
        logger.info(f"No measurements found in {source_name}")
        return MultistaticRecords([], [], [], [], [], source_name)
    tx_angle, rx_angle, frequency, total, incident = zip(*rows)
    logger.info(
        f"Parsed {len(rows)} measurements from {source_name} "
        f"({len(set(tx_angle))} transmitters, {len(set(frequency))} frequencies)"
    )
    return MultistaticRecords(tx_angle, rx_angle, frequency, total, incident, source_name)


def parse_fresnel(path: str, column_map: ColumnMap = PRESETS["fresnel_tm"]) -> MultistaticRecords:
    """
    Parse a Fresnel ``.exp`` table from local disk or S3.

    :param path: File path or s3:// URI
    :param column_map: Column layout and conventions
    """
    return parse_fresnel_text(read_text(path, encoding="latin-1"), column_map, path)


def _encode_angle(angle: float, mode: str, stride: float, base: int) -> str:
    degrees = math.degrees(angle)
    if mode == "index":
        return str(int(round(degrees / stride)) + base)
    return repr(degrees)


def format_fresnel(records: MultistaticRecords, column_map: ColumnMap = PRESETS["fresnel_tm"]) -> str:
    """
    Serialise records back into the table form described by ``column_map``.
    """
    unit = FREQUENCY_UNITS[column_map.frequency_unit]
    lines = [f"{column_map.comment_prefix} {records.source_name}",
             f"{column_map.comment_prefix} " + " ".join(column_map.columns)]
    for i in range(len(records)):
        rx = records.rx_angle[i]
        if column_map.rx_relative:
            rx = reduce_angle(rx - records.tx_angle[i])
        cells = {
            "tx": _encode_angle(records.tx_angle[i], column_map.tx_mode, column_map.tx_stride_deg,
                                column_map.tx_index_base),
            "rx": _encode_angle(rx, column_map.rx_mode, column_map.rx_stride_deg, column_map.rx_index_base),
            "freq": repr(float(records.frequency[i] / unit)),
            "re_total": repr(float(records.total[i].real)),
            "im_total": repr(float(records.total[i].imag)),
            "re_incident": repr(float(records.incident[i].real)),
            "im_incident": repr(float(records.incident[i].imag)),
            SKIP: "0",
        }
        lines.append(" ".join(cells[role] for role in column_map.columns))
    return "\n".join(lines) + "\n"


def scattered_records(records: MultistaticRecords) -> MultistaticRecords:
    """
    Replace the total field by total - incident and zero the incident column.
    """
    return replace(records, total=records.total - records.incident,
                   incident=np.zeros_like(records.incident), scattered=True)


def available_frequencies(records: MultistaticRecords) -> List[float]:
    return records.frequencies()


@dataclass
class CoverageReport:
    """Per-transmitter outcome of a bistatic extraction."""
    alpha_deg: float
    frequency_ghz: float
    tolerance_deg: float
    entries: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def missing(self) -> List[Dict[str, Any]]:
        return [e for e in self.entries if e["status"] != "matched"]

    @property
    def complete(self) -> bool:
        return bool(self.entries) and not self.missing

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha_deg": self.alpha_deg,
            "frequency_ghz": self.frequency_ghz,
            "tolerance_deg": self.tolerance_deg,
            "matched": len(self.entries) - len(self.missing),
            "missing": len(self.missing),
            "transmitters": self.entries,
        }


def _wrapped(delta: np.ndarray) -> np.ndarray:
    return np.abs((delta + math.pi) % TWO_PI - math.pi)


def receiver_stride(records: MultistaticRecords) -> float:
    """Smallest angular gap between distinct receiver angles, in radians."""
    angles = np.unique(records.rx_angle)
    if len(angles) < 2:
        return TWO_PI
    gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
    return float(gaps.min())


def _select_frequency(records: MultistaticRecords, frequency: float) -> np.ndarray:
    mask = np.abs(records.frequency - frequency) <= 1e-9 * frequency + 1.0
    if not mask.any():
        available = [f / 1e9 for f in records.frequencies()]
        listing = ", ".join(f"{f:g}" for f in available) or "none"
        raise CoverageError(
            f"Frequency {frequency / 1e9:g} GHz not present in {records.source_name}; available GHz: {listing}",
            available=available,
        )
    return mask


def coverage_report(records: MultistaticRecords, alpha: float, frequency: float,
                    tol: float) -> Tuple[CoverageReport, List[Optional[int]]]:
    """
    Match every transmitter with the receiver nearest to tx_angle + alpha.

    Returns:
        tuple: the report and, per transmitter in ascending angle order, the
        index of the selected record or None
    """
    alpha = reduce_angle(alpha)
    mask = _select_frequency(records, frequency)
    report = CoverageReport(math.degrees(alpha), frequency / 1e9, math.degrees(tol))
    selected: List[Optional[int]] = []
    candidates = np.flatnonzero(mask)
    for position, tx in enumerate(np.unique(records.tx_angle[candidates]), start=1):
        rows = candidates[records.tx_angle[candidates] == tx]
        target = reduce_angle(tx + alpha)
        deviation = _wrapped(records.rx_angle[rows] - target)
        within = deviation <= tol
        entry = {"transmitter": position, "tx_deg": math.degrees(tx), "wanted_rx_deg": math.degrees(target)}
        if not within.any():
            entry.update(status="missing", reason=f"no receiver within {math.degrees(tol):g} deg")
            selected.append(None)
        else:
            rows, deviation = rows[within], deviation[within]
            order = np.lexsort((records.rx_angle[rows], deviation))
            best = int(rows[order[0]])
            entry.update(status="matched", rx_deg=math.degrees(records.rx_angle[best]),
                         deviation_deg=math.degrees(float(deviation[order[0]])))
            selected.append(best)
        report.entries.append(entry)
    return report, selected


def extract_bistatic(records: MultistaticRecords, alpha: float, frequency: float, tol: float,
                     config_radii: Sequence[float] = (DEFAULT_TX_RADIUS_M, DEFAULT_RX_RADIUS_M)
                     ) -> ScatteredDataset:
    """
    Fixed-bistatic-angle dataset at one frequency.

    :param records: Scattered-field records (see :func:`scattered_records`)
    :param alpha: Bistatic angle in radians
    :param frequency: Frequency in Hz, must be one of the recorded frequencies
    :param tol: Angular matching tolerance in radians, below half the receiver stride
    :param config_radii: (T, R) used to rebuild positions from angles
    :raises PreconditionError: unscattered records or tolerance too large
    :raises CoverageError: a transmitter has no receiver near tx_angle + alpha
    """
    if not records.scattered:
        raise PreconditionError("extract_bistatic requires scattered_records() to be applied first")
    stride = receiver_stride(records)
    if not 0.0 <= tol < stride / 2.0:
        raise PreconditionError(
            f"Tolerance {math.degrees(tol):g} deg must be below half the receiver stride "
            f"({math.degrees(stride) / 2.0:g} deg)"
        )
    report, selected = coverage_report(records, alpha, frequency, tol)
    if not report.complete:
        missing = [e["transmitter"] for e in report.missing]
        raise CoverageError(
            f"No receiver within {math.degrees(tol):g} deg of tx+{report.alpha_deg:g} deg for "
            f"{len(missing)} of {len(report.entries)} transmitters: {missing}",
            missing=missing,
        )

    rows = np.array(selected, dtype=int)
    tx_radius, rx_radius = (float(r) for r in config_radii)
    tx_angles = records.tx_angle[rows]
    rx_angles = records.rx_angle[rows]
    config = MeasurementConfig(len(rows), alpha, tx_radius, rx_radius, float(records.frequency[rows[0]]))
    tx = tx_radius * np.stack([np.cos(tx_angles), np.sin(tx_angles)], axis=1)
    rx = rx_radius * np.stack([np.cos(rx_angles), np.sin(rx_angles)], axis=1)
    logger.info(
        f"Extracted {len(rows)} bistatic samples at alpha={report.alpha_deg:g} deg, "
        f"f={report.frequency_ghz:g} GHz from {records.source_name}"
    )
    return ScatteredDataset(config, tx, rx, tx_angles, rx_angles, records.total[rows], Provenance.FRESNEL,
                            {"source": records.source_name})
