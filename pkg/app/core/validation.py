"""
Validation Module
Handles input validation for configuration and data files.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

from app.core.exceptions import ParseError

logger = logging.getLogger(__name__)

REQUIRED_CONFIG_KEYS = ["n", "T", "rho", "vol_Y", "vol_Xd", "dim_chi", "weights"]
OPTIONAL_CONFIG_KEYS = ["eps_alpha", "p_coeffs", "heat_coeffs", "root_datum", "c_sigma"]
COEFFICIENT_KEYS = ["p_coeffs", "heat_coeffs", "root_datum"]


def strip_comment(line: str) -> str:
    """Drop everything after `#` and surrounding whitespace."""
    return line.split("#", 1)[0].strip()


def parse_key_value_text(text: str) -> Dict[str, Tuple[str, int]]:
    """
    Parse flat key=value text.

    Returns:
        Dict mapping key to (raw value, 1-based line number)
    """
    entries: Dict[str, Tuple[str, int]] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = strip_comment(line)
        if not content:
            continue
        if "=" not in content:
            raise ParseError(f"expected key=value, got {content!r}", number)
        key, value = (part.strip() for part in content.split("=", 1))
        if not key:
            raise ParseError("empty key", number)
        if key in entries:
            raise ParseError(f"duplicate key {key!r}", number)
        entries[key] = (value, number)
    return entries


def validate_config_keys(raw: Dict[str, Any]) -> Dict[str, Any]:
    """
    Check that a space configuration carries the expected keys.

    Returns:
        Dict with 'valid' boolean and 'errors' list
    """
    errors = []

    for key in REQUIRED_CONFIG_KEYS:
        if key not in raw:
            errors.append(f"{key} is required")

    given = [key for key in COEFFICIENT_KEYS if key in raw]
    if not given:
        errors.append("p_coeffs is required (or heat_coeffs, root_datum)")
    if len(given) > 1:
        errors.append(f"{given[0]} excludes {', '.join(given[1:])}")

    known = set(REQUIRED_CONFIG_KEYS) | set(OPTIONAL_CONFIG_KEYS)
    for key in raw:
        if key not in known:
            errors.append(f"{key} is not a recognised key")

    return {
        "valid": len(errors) == 0,
        "errors": errors
    }


def parse_real(text: str) -> float:
    """Parse a finite real number; accepts fractions like `1/2`."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        value = float(num) / float(den)
    else:
        value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


def parse_int(text: str) -> int:
    value = parse_real(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def parse_real_list(text: str) -> List[float]:
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("empty list")
    return [parse_real(item) for item in items]


def parse_weight_list(text: str) -> List[Tuple[float, int]]:
    """Parse `weight:mult` comma lists, e.g. `1:1, 2:3`."""
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ValueError(f"weight entry {item!r} must look like weight:mult")
        weight, mult = item.split(":", 1)
        pairs.append((parse_real(weight), parse_int(mult)))
    return pairs


def positive(name: str, value: float) -> Optional[str]:
    """Return an error message when value is not strictly positive."""
    if not (value > 0):
        return f"{name} must be positive, got {value}"
    return None


def log_validation_error(validation_type: str, details: str, source: Optional[str] = None):
    """Log validation errors with the input they came from."""
    logger.warning(f"VALIDATION_ERROR: {validation_type} - {details} - Source: {source or 'Unknown'}")
