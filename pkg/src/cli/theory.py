import argparse
import math
from typing import Any, Dict, List, Optional

import numpy as np

from src.analyze.theory import (
    first_zero,
    oracle_residual_table,
    predicted_half_max_width,
    profile_column,
    profile_table,
    tail_maximum,
)
from src.cli.manifest import build_manifest, write_manifest
from src.models.models import TheoryConfig, load_config_model
from src.utils.dataframe import write_dataframe_as_csv
from src.utils.file import join_path, load_config_file, write_as_json
from src.utils.logger import get_logger

logger = get_logger(__name__)

PROFILE_KINDS = ("e", "e1", "e2")
RESIDUAL_FILE = "kernel_residual.csv"
SUMMARY_FILE = "summary.json"


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


class TheorySweep:
    def __init__(self, config_path: str, overrides: Optional[Dict[str, Any]] = None):
        """
        Initialize the profile and kernel sweeps from the ``theory`` section

        :param config_path: Path to the configuration YAML/JSON file (local or S3)
        :param overrides: CLI overrides applied before validation
        """
        self.config: TheoryConfig = load_config_model(load_config_file(config_path), "theory", overrides)
        self.k = self.config.wavenumber
        self.xs = np.linspace(self.config.x_range[0], self.config.x_range[1], self.config.n_points)
        logger.info(f"Theory sweep at {self.config.frequency_ghz:g} GHz (k={self.k:.6g} 1/m), "
                    f"alphas={self.config.alphas_deg} deg, q_max={self.config.q_max}")

    def write_profiles(self, outputs: List[str]) -> Dict[str, Any]:
        config = self.config
        meta = {"frequency_ghz": config.frequency_ghz, "q_max": config.q_max, "tail_tol": config.tail_tol}
        lobe_edges = {}
        for kind in PROFILE_KINDS:
            table = profile_table(kind, self.xs, self.k, config.alphas_deg, config.q_max, config.tail_tol)
            path = join_path(config.output_dir, f"profile_{kind}.csv")
            write_dataframe_as_csv(table, path, dict(meta, profile=kind))
            outputs.append(path)
            if kind == "e":
                for alpha_deg in config.alphas_deg:
                    column = profile_column(alpha_deg)
                    lobe_edges[column] = _finite(first_zero(table["x_m"].to_numpy(), table[column].to_numpy()))
        return lobe_edges

    def write_residuals(self, outputs: List[str]) -> float:
        config = self.config
        ds = np.linspace(0.0, config.residual_d_max, config.residual_n_d)
        alphas = np.linspace(0.0, 180.0, config.residual_n_alpha)
        table = oracle_residual_table(ds, self.k, alphas, config.q_max, config.tail_tol)
        path = join_path(config.output_dir, RESIDUAL_FILE)
        write_dataframe_as_csv(table, path, {"frequency_ghz": config.frequency_ghz, "q_max": config.q_max})
        outputs.append(path)
        return float(table["residual"].max())

    def run(self) -> Dict[str, Any]:
        config = self.config
        outputs: List[str] = []
        lobe_edges = self.write_profiles(outputs)
        max_residual = self.write_residuals(outputs)
        value, at_x, at_alpha = tail_maximum(self.xs, self.k, config.alphas_deg, config.q_max, config.tail_tol)
        summary = {
            "frequency_ghz": config.frequency_ghz,
            "wavenumber": self.k,
            "tail_maximum": {"value": value, "abs_x_m": at_x, "alpha_deg": at_alpha},
            "max_kernel_residual": max_residual,
            "main_lobe_edge_m": lobe_edges,
            "predicted_fwhm_m": {
                profile_column(a): _finite(predicted_half_max_width(self.k, math.radians(a)))
                for a in config.alphas_deg
            },
        }
        summary_file = join_path(config.output_dir, SUMMARY_FILE)
        write_as_json(summary, summary_file)
        outputs.append(summary_file)
        logger.info(f"Tail maximum {value:.4f} at |x|={at_x:.4f} m, alpha={at_alpha:g} deg; "
                    f"max kernel residual {max_residual:.3e}")

        settings = {"q_max": config.q_max, "tail_tol": config.tail_tol, "wavenumber": self.k}
        write_manifest(config.output_dir, build_manifest("theory", config, outputs=outputs, settings=settings))
        return summary


def main(config_path: str, overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return TheorySweep(config_path, overrides).run()


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--config", type=str, required=True)
    args = parser.parse_args()

    main(args.config)
