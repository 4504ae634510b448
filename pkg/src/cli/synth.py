import argparse
import math
from typing import Any, Dict, Optional

from src.cli.manifest import build_manifest, write_manifest
from src.forward.synthesis import ScatteredDataset, add_noise, synth_scattered, write_dataset
from src.models.models import SynthConfig, load_config_model
from src.scene.geometry import check_separation
from src.specfun.green import FAR_FIELD_MIN_KR
from src.utils.file import join_path, load_config_file
from src.utils.logger import get_logger

logger = get_logger(__name__)


class SyntheticRun:
    def __init__(self, config_path: str, overrides: Optional[Dict[str, Any]] = None):
        """
        Initialize a synthetic acquisition from the ``synth`` section

        :param config_path: Path to the configuration YAML/JSON file (local or S3)
        :param overrides: CLI overrides applied before validation
        """
        self.config: SynthConfig = load_config_model(load_config_file(config_path), "synth", overrides)
        self.dataset_file = join_path(self.config.output_dir, self.config.file_name)
        logger.info(f"Synthetic dataset will be written to {self.dataset_file}")

    def synthesize(self) -> ScatteredDataset:
        """
        Born-approximation samples of the configured scene, with noise if requested

        Returns:
            ScatteredDataset: The (possibly noisy) bistatic dataset
        """
        config = self.config
        check_separation(config.scene, config.measurement)
        clean = synth_scattered(config.scene, config.measurement, config.kernel)
        return add_noise(clean, config.snr_db, config.seed)

    def run(self) -> ScatteredDataset:
        data = self.synthesize()
        write_dataset(data, self.dataset_file)
        settings = {
            "kernel": self.config.kernel.value,
            "seed": self.config.seed,
            "snr_db": self.config.snr_db if math.isfinite(self.config.snr_db) else None,
            "min_kr": FAR_FIELD_MIN_KR,
            "wavenumber": self.config.measurement.wavenumber,
        }
        write_manifest(self.config.output_dir,
                       build_manifest("synth", self.config, outputs=[self.dataset_file], settings=settings))
        return data


def main(config_path: str, overrides: Optional[Dict[str, Any]] = None) -> ScatteredDataset:
    return SyntheticRun(config_path, overrides).run()


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--config", type=str, required=True)
    args = parser.parse_args()

    main(args.config)
