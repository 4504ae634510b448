import argparse
from typing import Any, Dict, List, Optional

from src.analyze.imaging import IndicatorMap, indicator_map, normalize_map, write_map
from src.analyze.peaks import PeakList, extract_peaks, localization_error
from src.cli.manifest import build_manifest, write_manifest
from src.forward.synthesis import read_dataset
from src.models.models import ImageConfig, load_config_model
from src.specfun.green import FAR_FIELD_MIN_KR
from src.utils.file import join_path, load_config_file, write_as_json
from src.utils.logger import get_logger

logger = get_logger(__name__)

PEAKS_FILE = "peaks.json"
LOCALIZATION_FILE = "localization.json"


def peak_report(peaks: PeakList, min_prominence: float) -> Dict[str, Any]:
    report = peaks.to_dict()
    report["min_prominence"] = min_prominence
    report["status"] = "peaks found" if len(peaks) else "no peaks"
    return report


def score_peaks(peaks: PeakList, config, output_dir: str, outputs: List[str]):
    """Write peaks.json and, with a truth scene configured, localization.json."""
    peaks_file = join_path(output_dir, PEAKS_FILE)
    write_as_json(peak_report(peaks, config.min_prominence), peaks_file)
    outputs.append(peaks_file)
    if not len(peaks):
        logger.warning("No peaks above threshold; the map has no identifiable target")
    if config.truth is not None:
        localization = localization_error(peaks, config.truth)
        localization_file = join_path(output_dir, LOCALIZATION_FILE)
        write_as_json(localization.to_dict(), localization_file)
        outputs.append(localization_file)
        logger.info(f"Localization errors (m): {localization.errors}")


class ImagingRun:
    def __init__(self, config_path: str, overrides: Optional[Dict[str, Any]] = None):
        """
        Initialize an imaging run from the ``image`` section

        :param config_path: Path to the configuration YAML/JSON file (local or S3)
        :param overrides: CLI overrides applied before validation
        """
        self.config: ImageConfig = load_config_model(load_config_file(config_path), "image", overrides)
        logger.info(f"Obtained dataset path : {self.config.dataset}")

    def build_map(self) -> IndicatorMap:
        data = read_dataset(self.config.dataset)
        return normalize_map(indicator_map(data, self.config.grid, self.config.kernel))

    def run(self) -> PeakList:
        config = self.config
        indicator = self.build_map()
        outputs: List[str] = []
        for fmt in config.formats:
            path = join_path(config.output_dir, f"map.{fmt}")
            write_map(indicator, path, fmt)
            outputs.append(path)

        peaks = extract_peaks(indicator, config.threshold, config.exclusion_radius, config.min_prominence)
        score_peaks(peaks, config, config.output_dir, outputs)

        settings = {
            "kernel": indicator.meta["kernel"],
            "min_kr": FAR_FIELD_MIN_KR,
            "threshold": config.threshold,
            "exclusion_radius_m": config.exclusion_radius,
            "min_prominence": config.min_prominence,
            "grid": config.grid.to_dict(),
        }
        write_manifest(config.output_dir,
                       build_manifest("image", config, inputs=[config.dataset], outputs=outputs, settings=settings))
        return peaks


def main(config_path: str, overrides: Optional[Dict[str, Any]] = None) -> PeakList:
    return ImagingRun(config_path, overrides).run()


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--config", type=str, required=True)
    args = parser.parse_args()

    main(args.config)
