"""
Run configuration for broadcastkit
Built-in defaults are overridden by a key=value config file, which is
overridden by command-line flags.
"""
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from broadcastkit.modules.nutsearch import (
    DEFAULT_ANCILLA_DIM,
    DEFAULT_BUDGET,
    DEFAULT_LEVELS,
    DEFAULT_RESTARTS,
    DEFAULT_SAMPLE_SIZE,
)
from broadcastkit.utils.validation_utils import ParamValidator

MAX_CONFIG_SIZE = 1024 * 1024  # 1 MB

ANGLE_FIELDS = ("theta", "omega", "machine_theta", "machine_omega", "fixed_omega", "fixed_theta")

# config-file key -> RunConfig field
CONFIG_KEYS = {
    "M": "M",
    "d": "d",
    "machine": "machine",
    "theta": "theta",
    "omega": "omega",
    "lambda": "lam",
    "machine_theta": "machine_theta",
    "machine_omega": "machine_omega",
    "fixed_omega": "fixed_omega",
    "fixed_theta": "fixed_theta",
    "lambda_steps": "lambda_steps",
    "grid_steps": "grid_steps",
    "levels": "levels",
    "budget": "budget",
    "restarts": "restarts",
    "sample_size": "sample_size",
    "seed": "seed",
    "threads": "threads",
    "output_path": "output_path",
    "degrees": "degrees",
}

TRUE_VALUES = {"1", "true", "yes", "on"}
FALSE_VALUES = {"0", "false", "no", "off"}


@dataclass
class RunConfig:
    M: int = 2
    d: int = DEFAULT_ANCILLA_DIM
    machine: str = "gm"
    theta: float = 0.0
    omega: float = 0.0
    lam: float = 1.0
    machine_theta: float = 0.0
    machine_omega: float = 0.0
    fixed_omega: Optional[float] = None
    fixed_theta: Optional[float] = None
    lambda_steps: int = 11
    grid_steps: int = 5
    levels: List[float] = field(default_factory=lambda: list(DEFAULT_LEVELS))
    budget: int = DEFAULT_BUDGET
    restarts: int = DEFAULT_RESTARTS
    sample_size: int = DEFAULT_SAMPLE_SIZE
    seed: int = 42
    threads: Optional[int] = None
    output_path: Optional[str] = None
    degrees: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["lambda"] = data.pop("lam")
        return data

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)


def parse_bool(value: Any, field_name: str) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in TRUE_VALUES:
        return True
    if text in FALSE_VALUES:
        return False
    raise ValueError(f"{field_name} must be a boolean, got {value!r}")


def load_config_file(file_path: Path) -> Tuple[Optional[Dict[str, str]], Optional[str]]:
    """
    Read a key=value config file.

    Lines starting with '#' and blank lines are skipped; there are no sections.

    Returns:
        tuple: (values: Optional[Dict], error_message: Optional[str])
    """
    try:
        if not file_path.exists():
            return None, f"Config file not found: {file_path}"

        file_size = file_path.stat().st_size
        if file_size > MAX_CONFIG_SIZE:
            return None, f"Config file too large: {file_size} bytes (max: {MAX_CONFIG_SIZE})"

        values: Dict[str, str] = {}
        with open(file_path, "r", encoding="utf-8") as f:
            for number, raw in enumerate(f, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    return None, f"{file_path}:{number}: expected key=value, got {line!r}"
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in CONFIG_KEYS:
                    return None, f"{file_path}:{number}: unknown config key {key!r}"
                values[key] = value
        return values, None

    except UnicodeDecodeError as e:
        return None, f"Encoding error: {e}"
    except OSError as e:
        return None, f"Error reading config file: {e}"


def _coerce(field_name: str, value: Any) -> Any:
    if field_name in ("M", "lambda_steps", "grid_steps", "budget", "restarts", "sample_size", "seed"):
        return ParamValidator.validate_int(value, field_name)
    if field_name == "d":
        return ParamValidator.validate_ancilla_dim(value)
    if field_name == "threads":
        return ParamValidator.validate_threads(value)
    if field_name == "lam":
        return ParamValidator.validate_probability(value, "lambda")
    if field_name in ANGLE_FIELDS:
        if value is None or str(value).strip().lower() in ("", "none"):
            return None if field_name.startswith("fixed_") else 0.0
        return ParamValidator.validate_angle(value, field_name)
    if field_name == "levels":
        return ParamValidator.validate_levels(value)
    if field_name == "machine":
        return ParamValidator.validate_machine(value)
    if field_name == "degrees":
        return parse_bool(value, field_name)
    if field_name == "output_path":
        return None if value is None or str(value).strip() == "" else str(value)
    raise ValueError(f"unknown config key {field_name!r}")


def resolve_config(file_values: Optional[Dict[str, str]] = None, flag_values: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Merge defaults, config file and flags, then convert angles to radians if requested.

    Args:
        file_values: Raw strings from load_config_file, keyed by config-file key
        flag_values: Parsed flags keyed by RunConfig field; None entries are ignored

    Raises:
        ValueError: If a value fails validation; the message names the field
    """
    valid_fields = {item.name for item in fields(RunConfig)}
    merged: Dict[str, Any] = {}
    for key, value in (file_values or {}).items():
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        merged[CONFIG_KEYS[key]] = _coerce(CONFIG_KEYS[key], value)
    for name, value in (flag_values or {}).items():
        if name not in valid_fields:
            raise ValueError(f"unknown config key {name!r}")
        if value is not None:
            merged[name] = _coerce(name, value)

    config = replace(RunConfig(), **merged)
    if config.degrees:
        converted = {
            name: ParamValidator.validate_angle(getattr(config, name), name, degrees=True)
            for name in ANGLE_FIELDS
            if getattr(config, name) is not None
        }
        config = replace(config, **converted)
    return config
