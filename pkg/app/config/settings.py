# app/config/settings.py
"""
Zeta Toolkit Configuration
Holds numeric tolerances, evaluation defaults and logging options.
"""

import math
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # === APPLICATION SETTINGS ===
    APP_NAME: str = "zeta-counting"
    VERSION: str = "1.0.0"
    DEBUG: bool = False

    # === LOGGING ===
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[Path] = None

    # === PARAMETER VALIDATION ===
    # Inputs are decimal literals, so every identity is checked to this tolerance
    PARAM_TOL: float = 1e-9

    # === FUNCTIONAL-EQUATION QUADRATURE ===
    QUAD_REL_TOL: float = 1e-10
    QUAD_MIN_REL_TOL: float = 1e-13
    QUAD_MAX_REL_TOL: float = 1e-6
    QUAD_MAX_PANELS: int = 4000
    QUAD_INITIAL_PANELS: int = 4
    POLE_GUARD: float = 0.25  # in units of T
    POLE_NEAR: float = 1e-6  # in units of T
    REAL_AXIS_OFFSET: float = 1e-8

    # === EULER PRODUCTS ===
    K_MAX_DEFAULT: int = 60
    STRICT_TAIL: bool = True
    TAIL_THRESHOLD: float = 1e-6

    # === COUNTING ===
    WINDING_MAX_PANEL_PHASE: float = math.pi / 2
    WINDING_MAX_PANELS: int = 20000
    WINDING_MARGIN: float = 1e-12
    WINDING_INTEGER_TOL: float = 1e-6
    WINDING_ABS_TOL: float = 1e-9
    PHASE_MAX_STEP: float = math.pi / 4
    PHASE_MAX_DEPTH: int = 48
    PHASE_INITIAL_PIECES: int = 16
    S_EPSILON: float = 1e-6
    NUDGE_FRACTION: float = 1e-4
    AXIS_HALF_WIDTH: float = 0.25  # in units of T
    AXIS_FLOOR: float = 1e-3  # in units of T
    BOUNDARY_TOL: float = 1e-9
    SINGULARITY_TOL: float = 1e-12

    # === SPECTRUM GENERATION ===
    MAX_WORDS: int = 20_000_000
    TRACE_BUCKET_TOL: float = 1e-9
    CONJUGACY_RESIDUAL: float = 1e-8

    # === IDENTITY SUITES ===
    IDENTITY_WORD_LEN: int = 6
    SCAN_T_MIN: float = 5.0
    SCAN_T_MAX: float = 50.0
    SCAN_T_STEP: float = 0.5
    SCAN_SIGMA1: float = -1.0
    PHI_ENVELOPE: float = 10.0
    PHI_GROWTH_FLOOR: float = 1e3
    MAIN_TERM_ENVELOPE: float = 10.0
    DERIVATIVE_STEP: float = 1e-5
    DERIVATIVE_REL_TOL: float = 1e-6
    RUELLE_ABS_TOL: float = 1e-8
    RUELLE_MIN_L_MAX: float = 12.0

    # === OUTPUT ===
    FLOAT_SIG_DIGITS: int = 15
    DEFAULT_SEED: int = 0

    class Config:
        env_file = ".env"
        env_prefix = "ZETA_"
        case_sensitive = True

    # === METHODS ===
    def float_format(self) -> str:
        return f"%.{self.FLOAT_SIG_DIGITS}g"

    def validate_rel_tol(self, rel_tol: float) -> bool:
        return self.QUAD_MIN_REL_TOL <= rel_tol <= self.QUAD_MAX_REL_TOL


# Create settings instance
settings = Settings()


# === UTILITY FUNCTIONS ===
def format_float(value: float) -> str:
    """
    Render a float with the configured number of significant digits.

    Args:
        value: Number to format

    Returns:
        str: Locale-independent text (e.g. "0.333333333333333")
    """
    return f"{value:.{settings.FLOAT_SIG_DIGITS}g}"


def relative_close(a: float, b: float, tol: Optional[float] = None) -> bool:
    """Relative comparison used by every parameter identity."""
    tol = settings.PARAM_TOL if tol is None else tol
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return True
    return abs(a - b) <= tol * scale
