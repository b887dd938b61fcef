"""
Scan Service
Grid scans over t for phi, singularity counts and growth diagnostics, and
the functional-equation checks.
"""

import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

from app.core.counting import argument_variation_S, axis_count, axis_rectangle, n_main_term
from app.core.exceptions import NonNegativeSigma1, TooCloseToRealAxis, ValidationFailure
from app.core.fe_factor import fe_residual, phi_asymptotic, phi_quadrature
from app.core.model_zeta import (
    fit_growth_exponent, growth_envelope_constant, log_modulus_growth_scan,
    validate_region_coverage,
)
from app.core.space_params import describe
from app.models.schemas import ModelFile, SpaceConfig
from app.services.model_service import ModelService

logger = logging.getLogger(__name__)

PHI_COLUMNS = ["t", "re_phi", "im_phi", "re_asym", "im_asym"]
COUNT_COLUMNS = ["t", "n_main", "winding", "s_over_pi", "residual"]
DIAGNOSTIC_COLUMNS = ["diagnostic", "value"]
CHECK_COLUMNS = ["check", "value", "threshold", "passed"]

FE_CHECK_THRESHOLD = 1e-8


def t_grid(t_min: float, t_max: float, step: float) -> List[float]:
    """t_min, t_min + step, ... up to t_max, built by multiplication so the grid is reproducible."""
    if step <= 0:
        raise ValidationFailure(f"step must be positive, got {step}")
    if t_max < t_min:
        raise ValidationFailure(f"t_max={t_max} is below t_min={t_min}")
    count = math.floor((t_max - t_min) / step + 1e-9) + 1
    return [t_min + k * step for k in range(count)]


class ScanService:
    """Service for t-grid scans of one space configuration."""

    def __init__(self, config: SpaceConfig, rel_tol: Optional[float] = None):
        self.config = config
        self.params = config.params
        self.sigma = config.sigma
        self.rel_tol = rel_tol
        logger.debug(f"Scan over {describe(self.params, self.sigma)}")

    # ------------------ phi ------------------
    def phi(self, s: complex) -> complex:
        return phi_quadrature(s, self.sigma, self.params.K, self.params.T, self.rel_tol)

    def phi_scan(self, sigma1: float, t_min: float, t_max: float, step: float) -> List[Dict[str, Any]]:
        """phi on sigma1 + it with the closed-form asymptotics next to it (NaN where undefined)."""
        rows = []
        for t in t_grid(t_min, t_max, step):
            value = self.phi(complex(sigma1, t))
            try:
                im_part, re_part = phi_asymptotic(sigma1, t, self.sigma, self.params.K, self.params.T, self.params.n)
                re_asym, im_asym = -re_part, -im_part
            except (NonNegativeSigma1, TooCloseToRealAxis):
                re_asym = im_asym = math.nan
            rows.append({"t": t, "re_phi": value.real, "im_phi": value.imag, "re_asym": re_asym, "im_asym": im_asym})
        logger.info(f"phi scan on Re s = {sigma1}: {len(rows)} points")
        return rows

    # ------------------ counting ------------------
    def count_scan(self, model_file: ModelFile, t_max: float, step: float, a: Optional[float] = None) -> List[Dict[str, Any]]:
        """Winding count on i(0, t), main term and S(t)/pi over t = step, 2 step, ..., t_max."""
        a = self.params.rho + 1.0 if a is None else a
        catalog = model_file.catalog
        logderiv = ModelService.logderiv_function(catalog)
        log_z = ModelService.log_function(catalog)

        rows = []
        for t in t_grid(step, t_max, step):
            validate_region_coverage(axis_rectangle(t, self.params.T), model_file.model, self.sigma, self.params.T)
            winding, height = axis_count(logderiv, t, self.params.T)
            n_main = n_main_term(height, self.sigma, self.params.K, self.params.n)
            s_over_pi = argument_variation_S(log_z, height, a, self.params.rho) / math.pi
            rows.append({
                "t": t, "n_main": n_main, "winding": winding, "s_over_pi": s_over_pi,
                "residual": winding - n_main - s_over_pi,
            })
        logger.info(f"Count scan up to t={t_max}: {len(rows)} heights")
        return rows

    def diagnostics(self, model_file: ModelFile, t_min: float, t_max: float, step: float,
                    a: Optional[float] = None) -> List[Dict[str, Any]]:
        """Growth fits for S(t) and log |Z_model| on a vertical line; reported, never asserted."""
        a = self.params.rho + 1.0 if a is None else a
        catalog = model_file.catalog
        ts = t_grid(t_min, t_max, step)
        log_z = ModelService.log_function(catalog)

        s_values = [argument_variation_S(log_z, t, a, self.params.rho) for t in ts]
        s_exponent, s_constant = fit_growth_exponent(ts, s_values)

        # between 0 and the first trivial singularity
        sigma1 = -0.5 * self.params.T * (1 - self.sigma.eps_sigma)
        growth = log_modulus_growth_scan(catalog, sigma1, ts)
        g_exponent, g_constant = fit_growth_exponent(ts, [v for _, v in growth])
        envelope = growth_envelope_constant(ts, [v for _, v in growth], self.params.n)

        return [
            {"diagnostic": "s_growth_exponent", "value": s_exponent},
            {"diagnostic": "s_growth_constant", "value": s_constant},
            {"diagnostic": "s_expected_exponent_max", "value": float(self.params.n - 1)},
            {"diagnostic": "log_modulus_line", "value": sigma1},
            {"diagnostic": "log_modulus_growth_exponent", "value": g_exponent},
            {"diagnostic": "log_modulus_growth_constant", "value": g_constant},
            {"diagnostic": "log_modulus_envelope_C", "value": envelope},
        ]

    # ------------------ functional equation ------------------
    def check_fe(self, points: int, seed: int, model_file: Optional[ModelFile] = None) -> List[Dict[str, Any]]:
        """
        Oddness of phi and the residual of Z = exp(-phi/2), which satisfies
        Z(-s) = exp(phi(s)) Z(s) exactly; the divisor-only model residual is
        reported without a threshold.
        """
        rng = np.random.default_rng(seed)
        samples = [
            complex(x, y * sign)
            for x, y, sign in zip(rng.uniform(-2, 2, points), rng.uniform(1, 5, points), rng.choice([-1, 1], points))
        ]

        def synthetic_log(s: complex) -> complex:
            return -0.5 * self.phi(s)

        odd_error = 0.0
        synthetic_error = 0.0
        for s in samples:
            value = self.phi(s)
            odd_error = max(odd_error, abs(self.phi(-s) + value) / max(1.0, abs(value)))
            residual = fe_residual(synthetic_log, s, self.sigma, self.params.K, self.params.T, self.rel_tol)
            synthetic_error = max(synthetic_error, residual / max(1.0, abs(value)))

        rows = [
            {"check": "phi_odd", "value": odd_error, "threshold": FE_CHECK_THRESHOLD,
             "passed": odd_error <= FE_CHECK_THRESHOLD},
            {"check": "synthetic_fe_residual", "value": synthetic_error, "threshold": FE_CHECK_THRESHOLD,
             "passed": synthetic_error <= FE_CHECK_THRESHOLD},
        ]

        if model_file is not None:
            log_z = ModelService.log_function(model_file.catalog)
            model_error = max(
                fe_residual(log_z, s, self.sigma, self.params.K, self.params.T, self.rel_tol) for s in samples
            )
            rows.append({"check": "model_fe_residual", "value": model_error, "threshold": math.nan, "passed": True})

        for row in rows:
            logger.info(f"check-fe {row['check']}: {row['value']:.3e}")
        return rows
