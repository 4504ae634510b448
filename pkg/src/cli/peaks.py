import argparse
from typing import Any, Dict, List, Optional

from src.analyze.imaging import normalize_map, read_map
from src.analyze.peaks import PeakList, extract_peaks
from src.cli.image import score_peaks
from src.cli.manifest import build_manifest, write_manifest
from src.models.models import PeaksConfig, load_config_model
from src.utils.file import load_config_file
from src.utils.logger import get_logger

logger = get_logger(__name__)


class PeakRun:
    def __init__(self, config_path: str, overrides: Optional[Dict[str, Any]] = None):
        """
        Re-extract peaks from a stored map CSV with new selection settings

        :param config_path: Path to the configuration YAML/JSON file (local or S3)
        :param overrides: CLI overrides applied before validation
        """
        self.config: PeaksConfig = load_config_model(load_config_file(config_path), "peaks", overrides)
        logger.info(f"Obtained map path : {self.config.map_file}")

    def run(self) -> PeakList:
        config = self.config
        indicator = read_map(config.map_file)
        if not indicator.normalized:
            indicator = normalize_map(indicator)
        peaks = extract_peaks(indicator, config.threshold, config.exclusion_radius, config.min_prominence)
        outputs: List[str] = []
        score_peaks(peaks, config, config.output_dir, outputs)
        settings = {
            "threshold": config.threshold,
            "exclusion_radius_m": config.exclusion_radius,
            "min_prominence": config.min_prominence,
        }
        write_manifest(config.output_dir,
                       build_manifest("peaks", config, inputs=[config.map_file], outputs=outputs, settings=settings))
        return peaks


def main(config_path: str, overrides: Optional[Dict[str, Any]] = None) -> PeakList:
    return PeakRun(config_path, overrides).run()


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--config", type=str, required=True)
    args = parser.parse_args()

    main(args.config)
