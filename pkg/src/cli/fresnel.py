import argparse
import math
from typing import Any, Dict, Optional

from src.cli.manifest import build_manifest, write_manifest
from src.forward.synthesis import ScatteredDataset, write_dataset
from src.ingest.fresnel import coverage_report, extract_bistatic, parse_fresnel, scattered_records
from src.models.errors import CoverageError
from src.models.models import FresnelConfig, load_config_model
from src.utils.file import join_path, load_config_file, write_as_json
from src.utils.logger import get_logger

logger = get_logger(__name__)

COVERAGE_FILE = "coverage.json"


class FresnelExtraction:
    def __init__(self, config_path: str, overrides: Optional[Dict[str, Any]] = None):
        """
        Initialize a fixed-angle extraction from a multistatic Fresnel file

        :param config_path: Path to the configuration YAML/JSON file (local or S3)
        :param overrides: CLI overrides applied before validation
        """
        self.config: FresnelConfig = load_config_model(load_config_file(config_path), "fresnel", overrides)
        self.alpha = math.radians(self.config.bistatic_angle_deg)
        self.frequency = self.config.frequency_ghz * 1e9
        self.tolerance = math.radians(self.config.tolerance_deg)
        self.dataset_file = join_path(self.config.output_dir, self.config.file_name)
        self.coverage_file = join_path(self.config.output_dir, COVERAGE_FILE)
        logger.info(f"Obtained Fresnel data path : {self.config.data_file}")

    def write_coverage(self, records) -> Dict[str, Any]:
        """
        Per-transmitter coverage of the requested angle, written before extraction
        so a failed run still leaves its report behind.
        """
        try:
            report, _ = coverage_report(records, self.alpha, self.frequency, self.tolerance)
            coverage = report.to_dict()
        except CoverageError as e:
            coverage = {
                "alpha_deg": self.config.bistatic_angle_deg,
                "frequency_ghz": self.config.frequency_ghz,
                "tolerance_deg": self.config.tolerance_deg,
                "error": str(e),
                "available_frequencies_ghz": e.available,
            }
            write_as_json(coverage, self.coverage_file)
            raise
        write_as_json(coverage, self.coverage_file)
        return coverage

    def run(self) -> ScatteredDataset:
        config = self.config
        records = scattered_records(parse_fresnel(config.data_file, config.column_map))
        coverage = self.write_coverage(records)
        if coverage["missing"]:
            logger.warning(f"{coverage['missing']} transmitter(s) lack a receiver at "
                           f"tx+{config.bistatic_angle_deg:g} deg, see {self.coverage_file}")
        data = extract_bistatic(records, self.alpha, self.frequency, self.tolerance,
                                (config.tx_radius, config.rx_radius))
        write_dataset(data, self.dataset_file)
        settings = {
            "tolerance_deg": config.tolerance_deg,
            "tx_radius_m": config.tx_radius,
            "rx_radius_m": config.rx_radius,
            "column_map": config.column_map.to_dict(),
        }
        write_manifest(config.output_dir,
                       build_manifest("fresnel", config, inputs=[config.data_file],
                                      outputs=[self.coverage_file, self.dataset_file], settings=settings))
        return data


def main(config_path: str, overrides: Optional[Dict[str, Any]] = None) -> ScatteredDataset:
    return FresnelExtraction(config_path, overrides).run()


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--config", type=str, required=True)
    args = parser.parse_args()

    main(args.config)
