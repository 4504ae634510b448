import math

import numpy as np
import pytest

from src.forward.synthesis import (
    DATASET_COLUMNS,
    Kernel,
    Provenance,
    add_noise,
    format_dataset,
    measured_snr_db,
    parse_dataset,
    read_dataset,
    scattered_field,
    synth_scattered,
    write_dataset,
)
from src.models.errors import DataIOError, DegenerateError, PreconditionError, SingularityError
from src.scene.geometry import Inhomogeneity, Point2, Scene, array_positions
from tests.conftest import make_config


def test_one_sample_per_transmitter(single_disk):
    data = synth_scattered(single_disk, make_config())
    assert len(data) == 36
    assert data.provenance is Provenance.SYNTHETIC_EXACT
    assert data.meta["kernel"] == "exact"
    assert np.all(np.abs(data.values) > 0)


def test_linear_in_targets(two_disks):
    config = make_config(alpha_deg=135.0)
    both = synth_scattered(two_disks, config).values
    first = synth_scattered(Scene(two_disks.targets[:1]), config).values
    second = synth_scattered(Scene(two_disks.targets[1:]), config).values
    np.testing.assert_allclose(both, first + second, rtol=1e-15, atol=0)


def test_linear_in_contrast(single_disk):
    config = make_config()
    base = synth_scattered(single_disk, config).values
    doubled = synth_scattered(single_disk.scaled_contrast(2.0), config).values
    np.testing.assert_allclose(doubled, 2.0 * base, rtol=1e-12, atol=0)


def test_far_field_kernel_tracks_exact_kernel(single_disk):
    config = make_config()
    exact = synth_scattered(single_disk, config, Kernel.EXACT).values
    far = synth_scattered(single_disk, config, Kernel.FARFIELD).values
    assert np.linalg.norm(far - exact) / np.linalg.norm(exact) < 0.2

    centred = Scene((Inhomogeneity(Point2(0.0, 0.0), single_disk.targets[0].area, 3.0),))
    exact = synth_scattered(centred, config, Kernel.EXACT).values
    far = synth_scattered(centred, config, Kernel.FARFIELD).values
    assert np.max(np.abs(far - exact) / np.abs(exact)) < 0.01


def test_reciprocity(two_disks, k4):
    tx, rx = array_positions(make_config(alpha_deg=60.0))
    forward = scattered_field(two_disks, k4, tx, rx)
    backward = scattered_field(two_disks, k4, rx, tx)
    np.testing.assert_allclose(backward, forward, rtol=1e-14, atol=0)


def test_reciprocal_configuration_is_a_rotation(single_disk):
    config = make_config(alpha_deg=90.0)
    original = synth_scattered(single_disk, config).values
    swapped = synth_scattered(single_disk, config.reciprocal()).values
    # receiver n of the swapped array sits where transmitter n + 27 was
    np.testing.assert_allclose(swapped, np.roll(original, 9), rtol=1e-12, atol=0)


def test_noise_disabled_returns_input(single_disk):
    data = synth_scattered(single_disk, make_config())
    assert add_noise(data, math.inf, 3) is data


def test_noise_is_seeded(single_disk):
    data = synth_scattered(single_disk, make_config())
    first = add_noise(data, 20.0, 11)
    again = add_noise(data, 20.0, 11)
    other = add_noise(data, 20.0, 12)
    np.testing.assert_array_equal(first.values, again.values)
    assert not np.array_equal(first.values, other.values)
    assert first.meta["seed"] == 11
    np.testing.assert_array_equal(data.values, synth_scattered(single_disk, make_config()).values)


def test_noise_level(single_disk):
    data = synth_scattered(single_disk, make_config(n=360))
    noisy = add_noise(data, 20.0, 5)
    assert measured_snr_db(data, noisy) == pytest.approx(20.0, abs=1.0)


def test_noise_on_silent_scene_is_degenerate():
    data = synth_scattered(Scene(), make_config())
    assert not np.any(data.values)
    with pytest.raises(DegenerateError):
        add_noise(data, 20.0, 0)


def test_target_on_the_array():
    scene = Scene((Inhomogeneity(Point2(0.72, 0.0), 1e-4, 3.0),))
    with pytest.raises(SingularityError):
        synth_scattered(scene, make_config())


def test_far_field_gate(single_disk):
    with pytest.raises(PreconditionError):
        synth_scattered(single_disk, make_config(f_ghz=0.5), Kernel.FARFIELD)
    # the exact kernel has no such restriction
    synth_scattered(single_disk, make_config(f_ghz=0.5), Kernel.EXACT)


def test_csv_round_trip_is_exact(two_disks):
    data = add_noise(synth_scattered(two_disks, make_config(alpha_deg=135.0)), 20.0, 4)
    again = parse_dataset(format_dataset(data))
    np.testing.assert_array_equal(again.values, data.values)
    np.testing.assert_array_equal(again.tx, data.tx)
    np.testing.assert_array_equal(again.rx, data.rx)
    assert again.config == data.config
    assert again.provenance is data.provenance
    np.testing.assert_allclose(again.rx_angles, data.rx_angles, rtol=0, atol=1e-12)


def test_csv_layout(single_disk):
    text = format_dataset(synth_scattered(single_disk, make_config()))
    lines = text.split("\n")
    header = next(line for line in lines if not line.startswith("#"))
    assert header == ",".join(DATASET_COLUMNS)
    assert "# provenance: synthetic_exact" in lines
    assert "\r" not in text


def test_unexpected_header():
    with pytest.raises(DataIOError):
        parse_dataset("# frequency_hz: 4e9\na,b\n1,2\n")


def test_row_count_must_match_n_samples(single_disk):
    lines = format_dataset(synth_scattered(single_disk, make_config())).rstrip("\n").split("\n")
    with pytest.raises(DataIOError) as info:
        parse_dataset("\n".join(lines[:-1]) + "\n", "short.csv")
    assert info.value.exit_code == 4


def test_write_and_read(tmp_path, single_disk):
    data = synth_scattered(single_disk, make_config())
    path = str(tmp_path / "out" / "dataset.csv")
    write_dataset(data, path)
    np.testing.assert_array_equal(read_dataset(path).values, data.values)


def test_missing_file(tmp_path):
    with pytest.raises(DataIOError):
        read_dataset(str(tmp_path / "absent.csv"))
