from dataclasses import fields, is_dataclass
from enum import Enum
from typing import Any

import numpy as np


def encode_complex(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def decode_complex(value: Any) -> complex:
    """A plain number or a two-element [re, im] array."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        return complex(value[0], value[1])
    raise ValueError(f"expected a number or [re, im], got {value!r}")


def getattr_complex(object: dict[str, Any], key: str, default: complex) -> complex:
    if key in object:
        return decode_complex(object[key])
    else:
        return default


def to_json(value: Any) -> Any:
    """Convert results into JSON-ready values: complex as [re, im], arrays and tuples as lists, enums by value."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (complex, np.complexfloating)):
        return encode_complex(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        # JSON has no inf or nan
        return value if np.isfinite(value) else str(value)
    if isinstance(value, np.ndarray):
        return [to_json(x) for x in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_json(x) for x in value]
    if isinstance(value, dict):
        return {str(k): to_json(v) for k, v in value.items()}
    if is_dataclass(value):
        return {f.name: to_json(getattr(value, f.name)) for f in fields(value)}
    raise TypeError(f"cannot encode {type(value).__name__} as JSON")
