"""
Space Configuration Loader
Reads the flat key=value space file into a validated SpaceConfig.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, TypeVar, Union

from app.core.exceptions import ConfigError, ValidationFailure
from app.core.sigma_poly import build_sigma_data, expand_root_datum, parse_root_datum, poly_from_heat_coeffs
from app.core.space_params import build_space_params, epsilon_sigma
from app.core.validation import (
    COEFFICIENT_KEYS, log_validation_error, parse_int, parse_key_value_text, parse_real,
    parse_real_list, parse_weight_list, validate_config_keys,
)
from app.models.schemas import SpaceConfig

logger = logging.getLogger(__name__)

V = TypeVar("V")


def _field(raw: Dict[str, Tuple[str, int]], key: str, parser: Callable[[str], V]) -> V:
    value, line = raw[key]
    try:
        return parser(value)
    except ValueError as e:
        raise ConfigError(key, f"line {line}: {e}")


def parse_space_config(text: str, source: str = "<text>", base_dir: Optional[Path] = None) -> SpaceConfig:
    """
    Build a SpaceConfig from key=value text.

    `root_datum` names a root-datum file, resolved against base_dir.

    Every failure is reported as a ConfigError naming the key that broke,
    including failures of the derived-constant checks in build_space_params.
    """
    raw = parse_key_value_text(text)

    check = validate_config_keys(raw)
    if not check["valid"]:
        log_validation_error("space_config", "; ".join(check["errors"]), source)
        first = check["errors"][0]
        raise ConfigError(first.split(" ", 1)[0], "; ".join(check["errors"]))

    n = _field(raw, "n", parse_int)
    T = _field(raw, "T", parse_real)
    rho = _field(raw, "rho", parse_real)
    vol_Y = _field(raw, "vol_Y", parse_real)
    vol_Xd = _field(raw, "vol_Xd", parse_real)
    dim_chi = _field(raw, "dim_chi", parse_int)
    weights = _field(raw, "weights", parse_weight_list)
    eps_alpha = _field(raw, "eps_alpha", parse_real) if "eps_alpha" in raw else 0.0
    c_sigma = _field(raw, "c_sigma", parse_real) if "c_sigma" in raw else None

    try:
        params = build_space_params(n, T, rho, vol_Y, vol_Xd, dim_chi, weights)
    except ValidationFailure as e:
        raise ConfigError(_blame(e), str(e))
    try:
        eps_sigma = epsilon_sigma(rho, T, eps_alpha)
    except ValidationFailure as e:
        raise ConfigError("eps_alpha", str(e))

    coeff_key = next(key for key in COEFFICIENT_KEYS if key in raw)
    if coeff_key == "root_datum":
        coeffs = _root_datum_coeffs(raw, n, base_dir)
    else:
        coeffs = _field(raw, coeff_key, parse_real_list)
    try:
        if coeff_key == "heat_coeffs":
            coeffs = poly_from_heat_coeffs(coeffs, n, T)
        if len(coeffs) != n // 2:
            raise ValidationFailure(f"expected {n // 2} coefficients for n={n}, got {len(coeffs)}")
        sigma = build_sigma_data(eps_sigma, coeffs, c_sigma)
    except ValidationFailure as e:
        raise ConfigError(coeff_key, str(e))

    logger.info(f"Loaded space configuration from {source}: n={n} T={T} eps_sigma={eps_sigma}")
    return SpaceConfig(params=params, sigma=sigma, eps_alpha=eps_alpha)


def _root_datum_coeffs(raw: Dict[str, Tuple[str, int]], n: int, base_dir: Optional[Path]) -> List[float]:
    value, line = raw["root_datum"]
    path = Path(value)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    try:
        rd = parse_root_datum(path.read_text(encoding="utf-8"))
        return expand_root_datum(rd, n)
    except OSError as e:
        raise ConfigError("root_datum", f"line {line}: cannot read {path}: {e}")
    except ValidationFailure as e:
        raise ConfigError("root_datum", f"{path}: {e}")


def _blame(error: ValidationFailure) -> str:
    """Pick the config key responsible for a build_space_params failure."""
    name = type(error).__name__
    if name == "DimensionOdd":
        return "n"
    if name == "RhoMismatch":
        return "rho"
    if name in ("EmptyWeights", "InvalidWeights"):
        return "weights"
    if name == "InvalidParameter":
        # message starts with the parameter name
        return str(error).split(" ", 1)[0]
    return "n"


def load_space_config(path: Union[str, Path]) -> SpaceConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("path", f"cannot read {path}: {e}")
    return parse_space_config(text, source=str(path), base_dir=path.parent)
