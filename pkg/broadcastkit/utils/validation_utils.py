"""
Parameter validation for broadcastkit
Every validator returns the cleaned value or raises ValueError naming the field.
"""
import math
from typing import Iterable, List, Optional, Union

from broadcastkit.modules.nutsearch import MAX_ANCILLA_DIM
from broadcastkit.modules.cloners import MAX_GM_COPIES, MAX_KNOWN_BASIS_COPIES

Number = Union[str, int, float]

MACHINES = ("gm", "omega-dqcm", "known-basis")


class ParamValidator:
    """Centralized validation for command arguments and config values"""

    @staticmethod
    def validate_int(value: Number, field: str, minimum: Optional[int] = None, maximum: Optional[int] = None) -> int:
        """
        Validate an integer field.

        Args:
            value: Raw value (str from config files, int from argparse)
            field: Field name used in the error message
            minimum: Smallest accepted value
            maximum: Largest accepted value

        Returns:
            int: The parsed integer

        Raises:
            ValueError: If the value is not an integer or is out of range
        """
        if isinstance(value, bool):
            raise ValueError(f"{field} must be an integer, got {value!r}")
        try:
            number = int(str(value).strip())
        except (TypeError, ValueError):
            raise ValueError(f"{field} must be an integer, got {value!r}")

        if minimum is not None and number < minimum:
            raise ValueError(f"{field} must be at least {minimum}, got {number}")
        if maximum is not None and number > maximum:
            raise ValueError(f"{field} must be at most {maximum}, got {number}")
        return number

    @staticmethod
    def validate_float(value: Number, field: str) -> float:
        try:
            number = float(str(value).strip())
        except (TypeError, ValueError):
            raise ValueError(f"{field} must be a number, got {value!r}")
        if not math.isfinite(number):
            raise ValueError(f"{field} must be finite, got {number}")
        return number

    @staticmethod
    def validate_probability(value: Number, field: str = "lambda") -> float:
        number = ParamValidator.validate_float(value, field)
        if not 0.0 <= number <= 1.0:
            raise ValueError(f"{field} must lie in [0, 1], got {number}")
        return number

    @staticmethod
    def validate_angle(value: Number, field: str, degrees: bool = False) -> float:
        """Parse an angle; degrees are converted to radians here and nowhere else."""
        number = ParamValidator.validate_float(value, field)
        return math.radians(number) if degrees else number

    @staticmethod
    def validate_level(value: Number, field: str = "level") -> float:
        number = ParamValidator.validate_float(value, field)
        if not 0.0 < number <= 1.0:
            raise ValueError(f"{field} must lie in (0, 1], got {number}")
        return number

    @staticmethod
    def validate_levels(values: Union[str, Iterable[Number]], field: str = "levels") -> List[float]:
        """Accept a comma-separated string or a sequence; an empty string means no levels."""
        if isinstance(values, str):
            items = [item for item in (part.strip() for part in values.split(",")) if item]
        else:
            items = list(values)
        return [ParamValidator.validate_level(item, field) for item in items]

    @staticmethod
    def validate_copies(value: Number, field: str = "M") -> int:
        return ParamValidator.validate_int(value, field, minimum=2)

    @staticmethod
    def validate_gm_copies(value: Number, field: str = "M") -> int:
        return ParamValidator.validate_int(value, field, minimum=2, maximum=MAX_GM_COPIES)

    @staticmethod
    def validate_known_basis_copies(value: Number, field: str = "M") -> int:
        return ParamValidator.validate_int(value, field, minimum=2, maximum=MAX_KNOWN_BASIS_COPIES)

    @staticmethod
    def validate_ancilla_dim(value: Number, field: str = "d") -> int:
        return ParamValidator.validate_int(value, field, minimum=1, maximum=MAX_ANCILLA_DIM)

    @staticmethod
    def validate_machine(name: str, field: str = "machine") -> str:
        if not name or not isinstance(name, str):
            raise ValueError(f"{field} must be one of {', '.join(MACHINES)}")
        name = name.strip().lower()
        if name not in MACHINES:
            raise ValueError(f"{field} must be one of {', '.join(MACHINES)}, got {name!r}")
        return name

    @staticmethod
    def validate_threads(value: Optional[Number], field: str = "threads") -> Optional[int]:
        if value is None or str(value).strip() == "":
            return None
        return ParamValidator.validate_int(value, field, minimum=1)
