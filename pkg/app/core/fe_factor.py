"""
Functional-Equation Factor
phi(s) = K * integral_0^s P_sigma(w) {tan | -cot}(pi w / T) dw by contour
quadrature, its closed-form asymptotics on vertical lines, and the residual
of a candidate log Z against Z(-s) = exp(phi(s)) Z(s).

phi is returned as an exponent and never exponentiated.
"""

import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import comb

from app.config.settings import settings
from app.core.exceptions import (
    NonNegativeSigma1, PoleOnPath, ToleranceNotMet, TooCloseToRealAxis,
    ValidationFailure,
)
from app.core.quadrature import (
    PanelBudgetExceeded, adaptive_segment, l1_panel, split_segment,
)
from app.core.sigma_poly import eval_P
from app.models.schemas import Branch, SigmaData

logger = logging.getLogger(__name__)

# |tan(pi z) - i sign(t)| <= 2e/(1-e) with e = exp(-2 pi |t|); 2/(1-e^{-2pi}) < 5
TRIG_RESIDUAL_FACTOR = 5.0


# ------------------ trigonometric kernel ------------------
def _half_plane_q(z):
    """q = exp(2i sgn z), sgn = sign(Im z) (+1 on the real axis); |q| <= 1."""
    z = np.asarray(z, dtype=complex)
    sgn = np.where(z.imag < 0, -1.0, 1.0)
    return sgn, np.exp(2j * sgn * z)


def trig_kernel(branch: Branch, z):
    """
    tan(z) or -cot(z), evaluated without overflow for large |Im z|.

    tan z = i sgn (1 - q)/(1 + q) and -cot z = i sgn (1 + q)/(1 - q).
    """
    sgn, q = _half_plane_q(z)
    if branch == Branch.tan:
        return 1j * sgn * (1 - q) / (1 + q)
    one_minus_q = -np.expm1(2j * sgn * np.asarray(z, dtype=complex))
    return 1j * sgn * (1 + q) / one_minus_q


def trig_asymptotic(branch: Branch, sigma1: float, t: float) -> complex:
    """Leading constant of tan / cot on the line sigma1 + it: +-i sign(t)."""
    if abs(t) < 1:
        raise TooCloseToRealAxis(f"|t| = {abs(t)} < 1")
    sign = 1.0 if t > 0 else -1.0
    return 1j * sign if branch == Branch.tan else -1j * sign


def trig_residual_bound(t: float) -> float:
    return TRIG_RESIDUAL_FACTOR * math.exp(-2 * math.pi * abs(t))


def trig_residual(branch: Branch, sigma1: float, t: float) -> complex:
    """
    tan/cot(pi(sigma1 + it)) minus its leading constant, cancellation free.

    tan - i sgn = -2i sgn q/(1+q) and cot + i sgn = -2i sgn q/(1-q).
    """
    leading = trig_asymptotic(branch, sigma1, t)
    z = math.pi * complex(sigma1, t)
    sgn = 1.0 if t > 0 else -1.0
    q = complex(np.exp(2j * sgn * z))
    if branch == Branch.tan:
        residual = -2j * sgn * q / (1 + q)
    else:
        residual = -2j * sgn * q / (1 - q)
    logger.debug(f"trig residual {branch.value} at ({sigma1}, {t}): leading={leading} residual={abs(residual):.3e}")
    return residual


# ------------------ integrand ------------------
def fe_integrand(w, sigma: SigmaData, K: float, T: float):
    """K P_sigma(w) {tan | -cot}(pi w / T); the cot removable point w=0 is patched."""
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore"):
        values = K * eval_P(sigma, w_arr) * trig_kernel(sigma.branch, np.pi * w_arr / T)
    if sigma.branch == Branch.cot:
        at_zero = w_arr == 0
        if np.any(at_zero):
            # P(w) ~ p_1 w and cot(pi w/T) ~ T/(pi w)
            values = np.where(at_zero, -K * (T / np.pi) * sigma.coeffs[-1], values)
    return values if np.ndim(w) else complex(values[0])


def branch_poles_near(branch: Branch, a: complex, b: complex, T: float, radius: float) -> np.ndarray:
    """Real poles of the kernel within `radius` of the segment [a, b]."""
    lo = min(a.real, b.real) - radius
    hi = max(a.real, b.real) + radius
    offset = 0.5 if branch == Branch.tan else 0.0
    k = np.arange(math.floor(lo / T - offset) - 1, math.ceil(hi / T - offset) + 2)
    poles = T * (k + offset)
    if branch == Branch.cot:
        poles = poles[k != 0]

    direction = b - a
    length2 = abs(direction) ** 2
    if length2 == 0:
        nearest = np.full(poles.shape, a)
    else:
        proj = np.clip(((poles - a) * np.conj(direction)).real / length2, 0.0, 1.0)
        nearest = a + proj * direction
    return poles[np.abs(poles - nearest) < radius]


def _check_rel_tol(rel_tol: Optional[float]) -> float:
    rel_tol = settings.QUAD_REL_TOL if rel_tol is None else rel_tol
    if not settings.validate_rel_tol(rel_tol):
        raise ValidationFailure(
            f"rel_tol must lie in [{settings.QUAD_MIN_REL_TOL}, {settings.QUAD_MAX_REL_TOL}], got {rel_tol}"
        )
    return rel_tol


def _integrate_path(nodes: List[complex], sigma: SigmaData, K: float, T: float, rel_tol: float) -> complex:
    """Integrate the FE integrand along a polygonal path."""
    legs = [(a, b) for a, b in zip(nodes[:-1], nodes[1:]) if a != b]
    if not legs:
        return 0j

    def f(w):
        return fe_integrand(w, sigma, K, T)

    scale = sum(
        l1_panel(f, lo, hi)
        for a, b in legs
        for lo, hi in split_segment(a, b, settings.QUAD_INITIAL_PANELS)
    )
    abs_tol = rel_tol * max(scale, np.finfo(float).tiny)

    total = 0j
    for a, b in legs:
        try:
            value, _ = adaptive_segment(f, a, b, abs_tol / len(legs))
        except PanelBudgetExceeded as e:
            raise ToleranceNotMet(
                f"quadrature from {a} to {b} did not reach rel_tol={rel_tol} within {e.panels} panels"
            )
        total += value
    return total


def phi_segment(a: complex, b: complex, sigma: SigmaData, K: float, T: float,
                rel_tol: Optional[float] = None) -> complex:
    """Integral of the FE integrand along the straight segment [a, b]."""
    rel_tol = _check_rel_tol(rel_tol)
    return _integrate_path([complex(a), complex(b)], sigma, K, T, rel_tol)


def phi_path(s: complex, sigma: SigmaData, T: float) -> List[complex]:
    """
    Polygonal path from 0 used for phi(s).

    Off the real axis the straight segment is used unless it comes within
    POLE_GUARD*T of a real pole; then the path detours through height +-T/2
    in the half-plane of s, which encloses no pole and gives the same value.
    A real segment reaching within POLE_NEAR*T of a pole is replaced by the
    upper boundary value at s + i delta.
    """
    guard = settings.POLE_GUARD * T
    if s.imag == 0:
        if branch_poles_near(sigma.branch, s, s, T, settings.SINGULARITY_TOL * T).size:
            raise PoleOnPath(f"s={s.real} is a pole of the {sigma.branch.value} branch")
        if not branch_poles_near(sigma.branch, 0j, s, T, settings.POLE_NEAR * T).size:
            return [0j, s]
        delta = settings.REAL_AXIS_OFFSET * max(1.0, abs(s))
        s = complex(s.real, delta)
    elif not branch_poles_near(sigma.branch, 0j, s, T, guard).size:
        return [0j, s]

    h = math.copysign(T / 2, s.imag)
    return [0j, complex(0, h), complex(s.real, h), s]


def phi_quadrature(s: complex, sigma: SigmaData, K: float, T: float,
                   rel_tol: Optional[float] = None) -> complex:
    """
    phi(s) = K * integral_0^s P_sigma(w) {tan | -cot}(pi w / T) dw.

    Args:
        s: Evaluation point; real s gives the boundary value from above
        sigma: Branch and polynomial data
        K: Functional-equation constant
        T: Long-root norm
        rel_tol: Relative tolerance in [QUAD_MIN_REL_TOL, QUAD_MAX_REL_TOL]

    Returns:
        complex: phi(s)

    Raises:
        PoleOnPath: real s at a pole of the branch
        ToleranceNotMet: adaptive refinement exhausted its panel budget
    """
    rel_tol = _check_rel_tol(rel_tol)
    s = complex(s)
    if s == 0:
        return 0j
    return _integrate_path(phi_path(s, sigma, T), sigma, K, T, rel_tol)


# ------------------ asymptotics ------------------
def phi_asymptotic(sigma1: float, t: float, sigma: SigmaData, K: float, T: float, n: int) -> Tuple[float, float]:
    """
    Closed-form growth of -phi on the vertical line sigma1 + it.

    Returns:
        (im_part, re_part) with phi(sigma1 + it) ~ -(i*im_part + re_part) + O(1)
    """
    if abs(t) < 1:
        raise TooCloseToRealAxis(f"|t| = {abs(t)} < 1")
    if sigma1 >= 0:
        raise NonNegativeSigma1(f"sigma1 must be negative, got {sigma1}")

    sign = 1.0 if t > 0 else -1.0
    at = abs(t)
    im_part = 0.0
    re_part = 0.0
    for k, p in enumerate(sigma.coeffs):
        m = n - 2 * k
        even_l = np.arange(0, m // 2 + 1)
        odd_l = np.arange(1, m // 2 + 1)
        even_sum = np.sum(comb(m, 2 * even_l) * (-1.0) ** even_l * sigma1 ** (m - 2 * even_l) * at ** (2 * even_l))
        odd_sum = np.sum(comb(m, 2 * odd_l - 1) * (-1.0) ** odd_l * sigma1 ** (m - 2 * odd_l + 1) * at ** (2 * odd_l - 1))
        im_part -= p * sign * K / m * even_sum
        re_part -= p * K / m * odd_sum
    return float(im_part), float(re_part)


# ------------------ functional-equation residual ------------------
def reduce_phase(value: complex) -> complex:
    """Shift the imaginary part into (-pi, pi]."""
    im = -((-value.imag + math.pi) % (2 * math.pi) - math.pi)
    return complex(value.real, im)


def fe_residual(logZ: Callable[[complex], complex], s: complex, sigma: SigmaData, K: float, T: float,
                rel_tol: Optional[float] = None) -> float:
    """|log Z(-s) - phi(s) - log Z(s)| with the imaginary part taken modulo 2 pi."""
    s = complex(s)
    difference = logZ(-s) - phi_quadrature(s, sigma, K, T, rel_tol) - logZ(s)
    return abs(reduce_phase(complex(difference)))
