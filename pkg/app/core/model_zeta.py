"""
Model Zeta Functions
Rational functions with exactly the prescribed divisor: zeros and poles at
the spectral points +-i s_j, at 0 and at the trivial lattice -s_k.
Ground truth for the argument-principle counter.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.config.settings import settings
from app.core.exceptions import (
    BoundaryHit, NonIntegerOrder, OnSingularity, RegionNotCovered,
)
from app.core.sigma_poly import eval_P
from app.core.space_params import dual_lattice_points, trivial_singularity_factor
from app.models.schemas import (
    CatalogItem, ModelSpectrum, Rectangle, SigmaData, SingularityCatalog, SpaceParams,
)

logger = logging.getLogger(__name__)

LOCATION_DIGITS = 12


def _integer_order(value: float, what: str) -> int:
    nearest = round(value)
    if abs(value - nearest) > settings.PARAM_TOL * max(1.0, abs(value)):
        raise NonIntegerOrder(f"{what} = {value} is not an integer")
    return int(nearest)


def build_model_spectrum(
    params: SpaceParams,
    ay_eigs: Sequence[Tuple[float, int]] = (),
    include_zero: bool = False,
    zero_mult: int = 0,
    lattice_cutoff: int = 0,
) -> ModelSpectrum:
    """ModelSpectrum with q = 2 d_Y dim_chi vol_Y / vol_Xd checked to be an integer."""
    q = _integer_order(trivial_singularity_factor(params), "q = 2 d_Y dim_chi vol_Y/vol_Xd")
    return ModelSpectrum(
        ay_eigs=tuple((float(s), int(m)) for s, m in ay_eigs),
        include_zero=include_zero,
        zero_mult=zero_mult,
        lattice_cutoff=lattice_cutoff,
        q=q,
    )


def merge_items(raw: Iterable[Tuple[complex, int]]) -> SingularityCatalog:
    """Add the orders of coinciding locations and drop the ones that cancel."""
    merged: Dict[Tuple[float, float], List] = {}
    for location, order in raw:
        key = (round(location.real, LOCATION_DIGITS), round(location.imag, LOCATION_DIGITS))
        if key in merged:
            merged[key][1] += order
        else:
            merged[key] = [location, order]
    items = [
        CatalogItem(re=location.real, im=location.imag, order=order)
        for location, order in merged.values()
        if order != 0
    ]
    items.sort(key=lambda item: (item.re, item.im))
    return SingularityCatalog(items=tuple(items))


def catalog_from_spectra(ms: ModelSpectrum, sigma: SigmaData, T: float) -> SingularityCatalog:
    """
    Singularity catalog of the model.

    +-i s_j with order m_j, 0 with order 2 m_0 (an eigenvalue s_j = 0 counts
    as m_0), and -s_k with order q P_sigma(s_k) for the first lattice_cutoff
    points of T(N - eps_sigma).
    """
    raw: List[Tuple[complex, int]] = []
    for s_j, m_j in ms.ay_eigs:
        if s_j == 0:
            raw.append((0j, 2 * m_j))
        else:
            raw.append((complex(0, s_j), m_j))
            raw.append((complex(0, -s_j), m_j))

    if ms.include_zero and ms.zero_mult:
        raw.append((0j, 2 * ms.zero_mult))

    for s_k in dual_lattice_points(sigma, T, ms.lattice_cutoff):
        order = _integer_order(ms.q * eval_P(sigma, s_k).real, f"q P_sigma({s_k})")
        if order == 0:
            logger.warning(f"P_sigma vanishes at lattice point {s_k}; no singularity at {-s_k}")
            continue
        raw.append((complex(-s_k, 0), order))

    catalog = merge_items(raw)
    logger.info(f"Catalog built: {len(catalog.items)} singularities, lattice cutoff {ms.lattice_cutoff}")
    return catalog


# ------------------ evaluation ------------------
def _arrays(cat: SingularityCatalog) -> Tuple[np.ndarray, np.ndarray]:
    locations = np.array([item.location for item in cat.items], dtype=complex)
    orders = np.array([item.order for item in cat.items], dtype=float)
    return locations, orders


def _check_off_singularities(locations: np.ndarray, s) -> np.ndarray:
    diff = np.subtract.outer(np.atleast_1d(np.asarray(s, dtype=complex)), locations)
    if diff.size and np.min(np.abs(diff)) < settings.SINGULARITY_TOL:
        raise OnSingularity(f"evaluation point within {settings.SINGULARITY_TOL} of a catalog location")
    return diff


def model_eval(cat: SingularityCatalog, s: complex) -> Tuple[float, bool]:
    """(log |Z_model(s)|, phase derivative available)."""
    locations, orders = _arrays(cat)
    diff = _check_off_singularities(locations, s)
    return float(np.sum(orders * np.log(np.abs(diff[0])))), True


def model_log(cat: SingularityCatalog, s: complex) -> complex:
    """Sum of order * principal log(s - location); the phase is defined modulo 2 pi."""
    locations, orders = _arrays(cat)
    diff = _check_off_singularities(locations, s)
    return complex(np.sum(orders * np.log(diff[0])))


def model_logderiv(cat: SingularityCatalog, s):
    """Z'/Z = sum order / (s - location); vectorized over s."""
    locations, orders = _arrays(cat)
    diff = _check_off_singularities(locations, s)
    values = np.sum(orders / diff, axis=1)
    return values if np.ndim(s) else complex(values[0])


# ------------------ regions ------------------
def boundary_distance(rect: Rectangle, z: complex) -> float:
    dx = max(rect.re_min - z.real, 0.0, z.real - rect.re_max)
    dy = max(rect.im_min - z.imag, 0.0, z.imag - rect.im_max)
    if dx > 0 or dy > 0:
        return math.hypot(dx, dy)
    return min(z.real - rect.re_min, rect.re_max - z.real, z.imag - rect.im_min, rect.im_max - z.imag)


def strictly_inside(rect: Rectangle, z: complex) -> bool:
    return rect.re_min < z.real < rect.re_max and rect.im_min < z.imag < rect.im_max


def count_catalog_in_region(cat: SingularityCatalog, rect: Rectangle) -> int:
    """Signed sum of orders strictly inside rect."""
    total = 0
    for item in cat.items:
        if boundary_distance(rect, item.location) < settings.BOUNDARY_TOL:
            raise BoundaryHit(f"singularity at {item.location} lies on the boundary of {rect.corners()}")
        if strictly_inside(rect, item.location):
            total += item.order
    return total


def coverage_radius(ms: ModelSpectrum, sigma: SigmaData, T: float) -> Optional[float]:
    """|s_N| of the last included lattice point; None when no lattice part is modelled."""
    if ms.lattice_cutoff == 0:
        return None
    return dual_lattice_points(sigma, T, ms.lattice_cutoff)[-1]


def validate_region_coverage(rect: Rectangle, ms: ModelSpectrum, sigma: SigmaData, T: float) -> None:
    radius = coverage_radius(ms, sigma, T)
    if radius is None:
        return
    far = max(abs(corner) for corner in rect.corners())
    if far >= radius:
        raise RegionNotCovered(
            f"rectangle reaches |s| = {far:.6g}, beyond the truncated lattice |s| < {radius:.6g}"
        )


# ------------------ growth diagnostics ------------------
def log_modulus_growth_scan(cat: SingularityCatalog, sigma1: float, ts: Sequence[float]) -> List[Tuple[float, float]]:
    """log |Z_model(sigma1 + it)| along a vertical line."""
    return [(float(t), model_eval(cat, complex(sigma1, t))[0]) for t in ts]


def fit_growth_exponent(ts: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """
    Fit |value| ~ C t^b on a log-log scale.

    Returns:
        (b, C); (nan, nan) when fewer than two usable points exist
    """
    ts = np.asarray(ts, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    usable = (ts > 0) & (values > 0)
    if np.count_nonzero(usable) < 2:
        return math.nan, math.nan
    slope, intercept = np.polyfit(np.log(ts[usable]), np.log(values[usable]), 1)
    return float(slope), float(math.exp(intercept))


def growth_envelope_constant(ts: Sequence[float], values: Sequence[float], n: int) -> float:
    """Smallest C with |value| <= C t^{n-1} log t on the scanned points (t > 1)."""
    ts = np.asarray(ts, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    usable = ts > 1
    if not np.any(usable):
        return math.nan
    return float(np.max(values[usable] / (ts[usable] ** (n - 1) * np.log(ts[usable]))))
