"""Small schema helpers that report problems as JSON pointers."""
import math
from typing import Any, Dict, Iterable, List, Optional

from src.models.errors import ConfigError


def child(pointer: str, key) -> str:
    token = str(key).replace("~", "~0").replace("/", "~1")
    return f"{pointer}/{token}"


def require_mapping(payload: Any, pointer: str) -> Dict[str, Any]:
    if not isinstance(payload, dict):
        raise ConfigError(pointer, f"expected an object, got {type(payload).__name__}")
    return payload


def check_keys(payload: Any, pointer: str, required: Iterable[str], optional: Iterable[str] = ()) -> Dict[str, Any]:
    """
    Reject unknown keys and report missing ones.

    :param payload: Parsed configuration fragment
    :param pointer: JSON pointer of ``payload`` inside the document
    :param required: Keys that must be present
    :param optional: Keys that may be present
    """
    payload = require_mapping(payload, pointer)
    required = list(required)
    allowed = set(required) | set(optional)
    for key in sorted(payload, key=str):
        if key not in allowed:
            raise ConfigError(child(pointer, key), "unknown key")
    for key in required:
        if key not in payload:
            raise ConfigError(child(pointer, key), "missing required key")
    return payload


def number(payload: Dict[str, Any], key: str, pointer: str, default: Any = None, *,
           positive: bool = False, minimum: Optional[float] = None,
           allow_inf: bool = False) -> float:
    path = child(pointer, key)
    value = payload.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    if positive and not value > 0.0:
        raise ConfigError(path, f"must be > 0, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value!r}")
    return value


def integer(payload: Dict[str, Any], key: str, pointer: str, default: Any = None, *,
            minimum: Optional[int] = None) -> int:
    path = child(pointer, key)
    value = payload.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value!r}")
    return value


def text(payload: Dict[str, Any], key: str, pointer: str, default: Any = None, *,
         choices: Optional[Iterable[str]] = None) -> str:
    path = child(pointer, key)
    value = payload.get(key, default)
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ConfigError(path, f"must be one of {sorted(choices)}, got {value!r}")
    return value


def boolean(payload: Dict[str, Any], key: str, pointer: str, default: bool = False) -> bool:
    value = payload.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(child(pointer, key), f"expected true or false, got {value!r}")
    return value


def number_list(payload: Dict[str, Any], key: str, pointer: str, *,
                length: Optional[int] = None, non_empty: bool = False) -> List[float]:
    path = child(pointer, key)
    values = payload.get(key)
    if not isinstance(values, list):
        raise ConfigError(path, f"expected a list, got {values!r}")
    if non_empty and not values:
        raise ConfigError(path, "must not be empty")
    if length is not None and len(values) != length:
        raise ConfigError(path, f"expected {length} entries, got {len(values)}")
    return [_item(v, child(path, i)) for i, v in enumerate(values)]


def _item(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    return float(value)
