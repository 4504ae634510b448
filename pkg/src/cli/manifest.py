import platform
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd

from src import __version__
from src.models.models import SectionConfig
from src.utils.file import join_path, write_as_json
from src.utils.logger import get_logger

logger = get_logger(__name__)

MANIFEST_FILE = "manifest.json"


def versions() -> Dict[str, str]:
    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "pandas": pd.__version__,
    }


def build_manifest(command: str, config: SectionConfig, inputs: Iterable[str] = (),
                   outputs: Iterable[str] = (), settings: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Run record of one command: validated section, resolved numerical settings,
    input/output paths and library versions. No timestamps, so identical runs
    give identical manifests.

    :param command: Subcommand name
    :param config: Validated section (its raw mapping is echoed)
    :param inputs: Files read by the run
    :param outputs: Files written by the run
    :param settings: Seed, kernel, truncation and tolerance values actually used
    """
    return {
        "command": command,
        "config": config.to_dict(),
        "inputs": list(inputs),
        "outputs": list(outputs),
        "settings": dict(settings or {}),
        "versions": versions(),
    }


def write_manifest(output_dir: str, manifest: Dict[str, Any]) -> str:
    path = join_path(output_dir, MANIFEST_FILE)
    write_as_json(manifest, path)
    logger.info(f"Manifest for '{manifest['command']}' saved to {path}")
    return path
