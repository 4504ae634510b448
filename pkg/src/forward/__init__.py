from src.forward.synthesis import (
    Kernel,
    Provenance,
    ScatteredDataset,
    add_noise,
    format_dataset,
    measured_snr_db,
    parse_dataset,
    read_dataset,
    scattered_field,
    synth_scattered,
    write_dataset,
)
