import math
import os

import numpy as np
import pytest

from src.analyze.imaging import ImagingGrid, indicator_map, normalize_map
from src.forward.synthesis import Provenance, synth_scattered
from src.ingest.fresnel import (
    PRESETS,
    ColumnMap,
    coverage_report,
    extract_bistatic,
    format_fresnel,
    parse_fresnel,
    parse_fresnel_text,
    receiver_stride,
    scattered_records,
)
from src.models.errors import ConfigError, CoverageError, FresnelParseError, PreconditionError, UnitError
from tests.conftest import make_config

TABLE = """\
# tx rx freq re_total im_total re_incident im_incident
1 19 4 0.5 -0.25 0.125 0.0

2 20 4.0 1.0 2.0 0.5 0.5
"""


def test_parse_table():
    records = parse_fresnel_text(TABLE)
    assert len(records) == 2
    np.testing.assert_allclose(np.degrees(records.tx_angle), [0.0, 10.0])
    np.testing.assert_allclose(np.degrees(records.rx_angle), [90.0, 95.0])
    assert records.frequencies() == [4e9]
    assert records.total[0] == complex(0.5, -0.25)
    assert records.incident[1] == complex(0.5, 0.5)
    assert not records.scattered


def test_relative_receiver_index():
    records = parse_fresnel_text("3 19 4 1 0 0 0\n", PRESETS["fresnel_tm_relative"])
    assert math.degrees(records.rx_angle[0]) == pytest.approx(110.0)


def test_frequency_unit():
    column_map = ColumnMap(frequency_unit="MHz")
    records = parse_fresnel_text("1 19 4000 1 0 0 0\n", column_map)
    assert records.frequency[0] == 4e9


@pytest.mark.parametrize("content, line_number, token", [
    ("1 19 4 1 0 0 0\n1 20 4 abc 0 0 0\n", 2, "abc"),
    ("1 19 4 nan 0 0 0\n", 1, "nan"),
    ("# header\n1 19 4 1 0 0 0 é\n", 2, "é"),
    ("1 19 4 1 0 0\n", 1, "1 19 4 1 0 0"),
    ("1 19 4 1 0 0 0\n1 19 4 2 0 0 0\n", 2, "1 19 4 2 0 0 0"),
])
def test_malformed_rows(content, line_number, token):
    with pytest.raises(FresnelParseError) as info:
        parse_fresnel_text(content)
    assert info.value.line_number == line_number
    assert info.value.token == token
    assert f"line {line_number}" in str(info.value)


def test_frequency_out_of_range():
    with pytest.raises(UnitError):
        parse_fresnel_text("1 19 40 1 0 0 0\n")


def test_empty_table():
    assert len(parse_fresnel_text("# nothing here\n")) == 0


@pytest.mark.parametrize("kwargs", [
    {"columns": ("tx", "rx", "freq")},
    {"columns": ("tx", "rx", "freq", "re_total", "im_total", "re_incident", "im_incident", "phase")},
    {"tx_mode": "radians"},
    {"frequency_unit": "THz"},
    {"rx_stride_deg": 0.0},
])
def test_invalid_column_map(kwargs):
    with pytest.raises(ValueError):
        ColumnMap(**kwargs)


def test_column_map_from_dict():
    column_map = ColumnMap.from_dict({"preset": "fresnel_tm", "columns": [
        "skip", "tx", "rx", "freq", "re_total", "im_total", "re_incident", "im_incident"]})
    assert column_map.position("tx") == 1
    records = parse_fresnel_text("99 1 19 4 1 0 0 0\n", column_map)
    assert math.degrees(records.rx_angle[0]) == pytest.approx(90.0)


@pytest.mark.parametrize("payload, pointer", [
    ({"preset": "other"}, "/fresnel/column_map/preset"),
    ({"columns": ["tx", "rx"]}, "/fresnel/column_map"),
    ({"rx_relative": "yes"}, "/fresnel/column_map/rx_relative"),
    ({"delimiter": ","}, "/fresnel/column_map/delimiter"),
])
def test_column_map_config_errors(payload, pointer):
    with pytest.raises(ConfigError) as info:
        ColumnMap.from_dict(payload, "/fresnel/column_map")
    assert info.value.pointer == pointer


def test_format_parse_round_trip(fresnel_records):
    again = parse_fresnel_text(format_fresnel(fresnel_records), source_name="synthetic.exp")
    for name in ("tx_angle", "rx_angle", "frequency", "total", "incident"):
        np.testing.assert_array_equal(getattr(again, name), getattr(fresnel_records, name))


def test_parse_from_file(tmp_path, fresnel_records):
    path = tmp_path / "table.exp"
    path.write_text(format_fresnel(fresnel_records))
    records = parse_fresnel(str(path))
    assert len(records) == len(fresnel_records)
    assert records.source_name == str(path)


def test_receiver_stride(fresnel_records):
    assert math.degrees(receiver_stride(fresnel_records)) == pytest.approx(5.0)


def test_extraction_matches_synthesis(fresnel_records, single_disk):
    data = extract_bistatic(scattered_records(fresnel_records), math.radians(90.0), 4e9, math.radians(1.0))
    expected = synth_scattered(single_disk, make_config(alpha_deg=90.0))
    assert len(data) == 36
    assert data.provenance is Provenance.FRESNEL
    assert data.config.bistatic_angle_deg == pytest.approx(90.0)
    assert data.config.frequency == 4e9
    np.testing.assert_allclose(data.values, expected.values, rtol=1e-9, atol=0)
    np.testing.assert_allclose(data.tx, expected.tx, rtol=0, atol=1e-12)


def test_coverage_report_complete(fresnel_records):
    report, selected = coverage_report(scattered_records(fresnel_records), math.radians(120.0), 6e9,
                                       math.radians(1.0))
    summary = report.to_dict()
    assert summary["matched"] == 36 and summary["missing"] == 0
    assert all(index is not None for index in selected)
    assert report.entries[0]["deviation_deg"] == pytest.approx(0.0, abs=1e-9)


def test_missing_receivers(fresnel_records):
    with pytest.raises(CoverageError) as info:
        extract_bistatic(scattered_records(fresnel_records), math.radians(30.0), 4e9, math.radians(1.0))
    assert len(info.value.missing) == 36
    assert info.value.missing[0] == 1


def test_absent_frequency(fresnel_records):
    with pytest.raises(CoverageError) as info:
        extract_bistatic(scattered_records(fresnel_records), math.radians(90.0), 5e9, math.radians(1.0))
    assert info.value.available == [4.0, 6.0]
    assert "4, 6" in str(info.value)


def test_tolerance_must_stay_below_half_stride(fresnel_records):
    with pytest.raises(PreconditionError) as info:
        extract_bistatic(scattered_records(fresnel_records), math.radians(90.0), 4e9, math.radians(3.0))
    assert not isinstance(info.value, CoverageError)


def test_requires_scattered_records(fresnel_records):
    with pytest.raises(PreconditionError):
        extract_bistatic(fresnel_records, math.radians(90.0), 4e9, math.radians(1.0))


def test_scattered_records_subtracts_incident(fresnel_records):
    scattered = scattered_records(fresnel_records)
    assert scattered.scattered
    assert not np.any(scattered.incident)
    np.testing.assert_array_equal(scattered.total, fresnel_records.total - fresnel_records.incident)


FRESNEL_DIR = os.environ.get("BFM_FRESNEL_DIR")


@pytest.mark.skipif(not FRESNEL_DIR or not os.path.exists(os.path.join(FRESNEL_DIR, "dielTM_dec8f.exp")),
                    reason="BFM_FRESNEL_DIR does not hold dielTM_dec8f.exp")
@pytest.mark.parametrize("alpha_deg", [60.0, 90.0])
def test_measured_dielectric_cylinder(alpha_deg):
    records = scattered_records(parse_fresnel(os.path.join(FRESNEL_DIR, "dielTM_dec8f.exp")))
    data = extract_bistatic(records, math.radians(alpha_deg), 4e9, math.radians(1.0))
    indicator = normalize_map(indicator_map(data, ImagingGrid(nx=128, ny=128)))
    x, y = indicator.argmax_location()
    assert math.hypot(x + 0.030, y) <= 0.010
