import math
from typing import Any, Dict, List, Optional

from src.analyze.imaging import ImagingGrid
from src.analyze.peaks import DEFAULT_MIN_PROMINENCE
from src.analyze.theory import DEFAULT_Q_MAX, DEFAULT_TAIL_TOL
from src.forward.synthesis import Kernel
from src.ingest.fresnel import DEFAULT_RX_RADIUS_M, DEFAULT_TX_RADIUS_M, ColumnMap
from src.models.errors import ConfigError
from src.models.validation import (
    check_keys,
    child,
    integer,
    number,
    number_list,
    require_mapping,
    text,
)
from src.scene.geometry import SCENE_PRESETS, MeasurementConfig, Scene, wavenumber_for

COMMANDS = ("synth", "image", "theory", "fresnel", "peaks")
KERNELS = tuple(k.value for k in Kernel)
MAP_FORMATS = ("csv", "pgm")
ANCHOR_PREFIX = "x-"


def scene_from_config(value: Any, pointer: str) -> Scene:
    """A scene is either a preset name or an object with a ``targets`` list."""
    if isinstance(value, str):
        if value not in SCENE_PRESETS:
            raise ConfigError(pointer, f"unknown scene preset {value!r}, expected one of {sorted(SCENE_PRESETS)}")
        return SCENE_PRESETS[value]
    return Scene.from_dict(require_mapping(value, pointer), pointer)


def _optional_scene(payload: Dict[str, Any], key: str, pointer: str) -> Optional[Scene]:
    if payload.get(key) is None:
        return None
    return scene_from_config(payload[key], child(pointer, key))


def _optional_kernel(payload: Dict[str, Any], pointer: str) -> Optional[str]:
    if payload.get("kernel") is None:
        return None
    return text(payload, "kernel", pointer, choices=KERNELS)


def _snr(payload: Dict[str, Any], pointer: str) -> float:
    if payload.get("snr_db") is None:
        return math.inf
    return number(payload, "snr_db", pointer)


class SectionConfig:
    """Validated command section; ``section`` keeps the raw mapping it was built from."""
    section: Dict[str, Any] = {}

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.section)


class SynthConfig(SectionConfig):
    def __init__(self, scene: Scene, measurement: MeasurementConfig, kernel: str, snr_db: float,
                 seed: int, output_dir: str, file_name: str):
        self.scene = scene
        self.measurement = measurement
        self.kernel = Kernel(kernel)
        self.snr_db = snr_db
        self.seed = seed
        self.output_dir = output_dir
        self.file_name = file_name

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "/synth") -> "SynthConfig":
        check_keys(payload, pointer, ("scene", "measurement", "output_dir"),
                   ("kernel", "snr_db", "seed", "file_name"))
        return cls(
            scene=scene_from_config(payload["scene"], child(pointer, "scene")),
            measurement=MeasurementConfig.from_dict(payload["measurement"], child(pointer, "measurement")),
            kernel=text(payload, "kernel", pointer, Kernel.EXACT.value, choices=KERNELS),
            snr_db=_snr(payload, pointer),
            seed=integer(payload, "seed", pointer, 0, minimum=0),
            output_dir=text(payload, "output_dir", pointer),
            file_name=text(payload, "file_name", pointer, "dataset.csv"),
        )


class ImageConfig(SectionConfig):
    def __init__(self, dataset: str, grid: ImagingGrid, kernel: Optional[str], threshold: float,
                 exclusion_radius: float, min_prominence: float, truth: Optional[Scene],
                 formats: List[str], output_dir: str):
        self.dataset = dataset
        self.grid = grid
        # None: chosen from the dataset provenance at imaging time
        self.kernel = Kernel(kernel) if kernel is not None else None
        self.threshold = threshold
        self.exclusion_radius = exclusion_radius
        self.min_prominence = min_prominence
        self.truth = truth
        self.formats = formats
        self.output_dir = output_dir

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "/image") -> "ImageConfig":
        check_keys(payload, pointer, ("dataset", "output_dir"),
                   ("grid", "kernel", "threshold", "exclusion_radius_m", "min_prominence", "truth", "formats"))
        formats = payload.get("formats", ["csv", "pgm"])
        if not isinstance(formats, list) or not formats or any(f not in MAP_FORMATS for f in formats):
            raise ConfigError(child(pointer, "formats"), f"expected a non-empty list drawn from {list(MAP_FORMATS)}")
        return cls(
            dataset=text(payload, "dataset", pointer),
            grid=ImagingGrid.from_dict(payload.get("grid", {}), child(pointer, "grid")),
            kernel=_optional_kernel(payload, pointer),
            threshold=number(payload, "threshold", pointer, 0.5, positive=True),
            exclusion_radius=number(payload, "exclusion_radius_m", pointer, 0.0, minimum=0.0),
            min_prominence=number(payload, "min_prominence", pointer, DEFAULT_MIN_PROMINENCE, minimum=0.0),
            truth=_optional_scene(payload, "truth", pointer),
            formats=list(formats),
            output_dir=text(payload, "output_dir", pointer),
        )


class TheoryConfig(SectionConfig):
    def __init__(self, frequency_ghz: float, alphas_deg: List[float], x_range: List[float], n_points: int,
                 q_max: int, tail_tol: float, residual_d_max: float, residual_n_d: int,
                 residual_n_alpha: int, output_dir: str):
        self.frequency_ghz = frequency_ghz
        self.alphas_deg = alphas_deg
        self.x_range = x_range
        self.n_points = n_points
        self.q_max = q_max
        self.tail_tol = tail_tol
        self.residual_d_max = residual_d_max
        self.residual_n_d = residual_n_d
        self.residual_n_alpha = residual_n_alpha
        self.output_dir = output_dir

    @property
    def wavenumber(self) -> float:
        return wavenumber_for(self.frequency_ghz * 1e9)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "/theory") -> "TheoryConfig":
        check_keys(payload, pointer, ("alphas_deg", "output_dir"),
                   ("frequency_ghz", "x_range_m", "n_points", "q_max", "tail_tol", "residual"))
        residual = payload.get("residual", {})
        residual_pointer = child(pointer, "residual")
        check_keys(residual, residual_pointer, (), ("d_max_m", "n_d", "n_alpha"))
        x_range = number_list(payload, "x_range_m", pointer, length=2) if "x_range_m" in payload else [-0.1, 0.1]
        if not x_range[0] < x_range[1]:
            raise ConfigError(child(pointer, "x_range_m"), "lower bound must be below upper bound")
        return cls(
            frequency_ghz=number(payload, "frequency_ghz", pointer, 4.0, positive=True),
            alphas_deg=number_list(payload, "alphas_deg", pointer, non_empty=True),
            x_range=x_range,
            n_points=integer(payload, "n_points", pointer, 2001, minimum=2),
            q_max=integer(payload, "q_max", pointer, DEFAULT_Q_MAX, minimum=1),
            tail_tol=number(payload, "tail_tol", pointer, DEFAULT_TAIL_TOL, positive=True),
            residual_d_max=number(residual, "d_max_m", residual_pointer, 0.15, positive=True),
            residual_n_d=integer(residual, "n_d", residual_pointer, 50, minimum=1),
            residual_n_alpha=integer(residual, "n_alpha", residual_pointer, 19, minimum=1),
            output_dir=text(payload, "output_dir", pointer),
        )


class FresnelConfig(SectionConfig):
    def __init__(self, data_file: str, column_map: ColumnMap, bistatic_angle_deg: float, frequency_ghz: float,
                 tolerance_deg: float, tx_radius: float, rx_radius: float, output_dir: str, file_name: str):
        self.data_file = data_file
        self.column_map = column_map
        self.bistatic_angle_deg = bistatic_angle_deg
        self.frequency_ghz = frequency_ghz
        self.tolerance_deg = tolerance_deg
        self.tx_radius = tx_radius
        self.rx_radius = rx_radius
        self.output_dir = output_dir
        self.file_name = file_name

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "/fresnel") -> "FresnelConfig":
        check_keys(payload, pointer, ("data_file", "bistatic_angle_deg", "frequency_ghz", "output_dir"),
                   ("column_map", "tolerance_deg", "tx_radius_m", "rx_radius_m", "file_name"))
        return cls(
            data_file=text(payload, "data_file", pointer),
            column_map=ColumnMap.from_dict(payload.get("column_map", {}), child(pointer, "column_map")),
            bistatic_angle_deg=number(payload, "bistatic_angle_deg", pointer),
            frequency_ghz=number(payload, "frequency_ghz", pointer, positive=True),
            tolerance_deg=number(payload, "tolerance_deg", pointer, 1.0, minimum=0.0),
            tx_radius=number(payload, "tx_radius_m", pointer, DEFAULT_TX_RADIUS_M, positive=True),
            rx_radius=number(payload, "rx_radius_m", pointer, DEFAULT_RX_RADIUS_M, positive=True),
            output_dir=text(payload, "output_dir", pointer),
            file_name=text(payload, "file_name", pointer, "dataset.csv"),
        )


class PeaksConfig(SectionConfig):
    def __init__(self, map_file: str, threshold: float, exclusion_radius: float, min_prominence: float,
                 truth: Optional[Scene], output_dir: str):
        self.map_file = map_file
        self.threshold = threshold
        self.exclusion_radius = exclusion_radius
        self.min_prominence = min_prominence
        self.truth = truth
        self.output_dir = output_dir

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], pointer: str = "/peaks") -> "PeaksConfig":
        check_keys(payload, pointer, ("map_file", "output_dir"),
                   ("threshold", "exclusion_radius_m", "min_prominence", "truth"))
        return cls(
            map_file=text(payload, "map_file", pointer),
            threshold=number(payload, "threshold", pointer, 0.5, positive=True),
            exclusion_radius=number(payload, "exclusion_radius_m", pointer, 0.0, minimum=0.0),
            min_prominence=number(payload, "min_prominence", pointer, DEFAULT_MIN_PROMINENCE, minimum=0.0),
            truth=_optional_scene(payload, "truth", pointer),
            output_dir=text(payload, "output_dir", pointer),
        )


SECTION_MODELS = {
    "synth": SynthConfig,
    "image": ImageConfig,
    "theory": TheoryConfig,
    "fresnel": FresnelConfig,
    "peaks": PeaksConfig,
}

# (command, override) -> path of the key inside the command's section
OVERRIDE_TARGETS = {
    ("synth", "alpha_deg"): ("measurement", "bistatic_angle_deg"),
    ("synth", "freq_ghz"): ("measurement", "frequency_ghz"),
    ("synth", "seed"): ("seed",),
    ("fresnel", "alpha_deg"): ("bistatic_angle_deg",),
    ("fresnel", "freq_ghz"): ("frequency_ghz",),
    ("theory", "alpha_deg"): ("alphas_deg",),
    ("theory", "freq_ghz"): ("frequency_ghz",),
}


def apply_overrides(section: Dict[str, Any], command: str, overrides: Dict[str, Any]) -> Dict[str, Any]:
    """
    Return a copy of a raw section with CLI overrides written into it.

    ``out`` applies to every command; the others only where listed in
    ``OVERRIDE_TARGETS``.
    """
    patched = dict(section)
    for name, value in overrides.items():
        if value is None:
            continue
        if name == "out":
            patched["output_dir"] = value
            continue
        target = OVERRIDE_TARGETS.get((command, name))
        if target is None:
            raise ConfigError(f"/{command}", f"--{name.replace('_', '-')} does not apply to the {command} command")
        if command == "theory" and name == "alpha_deg":
            value = [value]
        node = patched
        for key in target[:-1]:
            node[key] = dict(require_mapping(node.get(key, {}), child(f"/{command}", key)))
            node = node[key]
        node[target[-1]] = value
    return patched


def load_config_model(config_dict: Any, command: str, overrides: Optional[Dict[str, Any]] = None):
    """
    Validate the section of ``command`` in a configuration document.

    :param config_dict: Parsed YAML/JSON document
    :param command: One of ``COMMANDS``
    :param overrides: CLI overrides (alpha_deg, freq_ghz, seed, out)
    :raises ConfigError: with the JSON pointer of the offending key
    """
    config_dict = require_mapping(config_dict, "")
    # "x-" keys only hold YAML anchors
    sections = {key: value for key, value in config_dict.items() if not str(key).startswith(ANCHOR_PREFIX)}
    check_keys(sections, "", (), COMMANDS)
    if command not in config_dict:
        raise ConfigError(f"/{command}", "missing required section")
    pointer = f"/{command}"
    section = apply_overrides(require_mapping(config_dict[command], pointer), command, overrides or {})
    model = SECTION_MODELS[command].from_dict(section, pointer)
    model.section = section
    return model
