"""
Singularity Counting
Argument-principle winding numbers, the main term and leading Weyl term of
N(t), the argument variation S(t) and the Ruelle rectangle count.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.config.settings import settings
from app.core.exceptions import (
    BoundaryHit, InvalidParameter, NonIntegerWinding, OnSingularity, PanelLimit,
)
from app.core.model_zeta import count_catalog_in_region, merge_items
from app.core.quadrature import PanelBudgetExceeded, adaptive_segment, split_segment
from app.models.schemas import Rectangle, SigmaData, SingularityCatalog, SpaceParams

logger = logging.getLogger(__name__)

LogDerivative = Callable[[np.ndarray], np.ndarray]
LogFunction = Callable[[complex], complex]


# ------------------ argument principle ------------------
def winding_count(
    logderiv: LogDerivative,
    rect: Rectangle,
    max_panel_phase: Optional[float] = None,
    margin: Optional[float] = None,
) -> int:
    """
    (1/2 pi i) times the contour integral of f'/f around rect, counter-clockwise.

    Each edge is bisected until the Gauss panels agree and every accepted
    panel changes arg f by less than max_panel_phase.

    Args:
        logderiv: f'/f, evaluated on numpy arrays of points
        rect: Counting rectangle
        max_panel_phase: Largest phase increment per panel (default pi/2)
        margin: Smallest panel length before giving up

    Raises:
        PanelLimit: refinement stalled, a singularity is on or near the contour
        NonIntegerWinding: the accumulated phase is not a multiple of 2 pi
    """
    max_panel_phase = settings.WINDING_MAX_PANEL_PHASE if max_panel_phase is None else max_panel_phase
    margin = settings.WINDING_MARGIN if margin is None else margin
    corners = rect.corners()
    edges = list(zip(corners, corners[1:] + corners[:1]))

    def accept(value: complex) -> bool:
        return abs(value.imag) < max_panel_phase

    total = 0j
    for a, b in edges:
        try:
            value, _ = adaptive_segment(
                logderiv, a, b,
                abs_tol=settings.WINDING_ABS_TOL,
                max_panels=settings.WINDING_MAX_PANELS,
                accept=accept,
                min_length=margin,
            )
        except PanelBudgetExceeded as e:
            raise PanelLimit(f"edge {a} -> {b}: no convergence after {e.panels} panels")
        total += value

    turns = total.imag / (2 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) > settings.WINDING_INTEGER_TOL:
        raise NonIntegerWinding(f"accumulated phase is {turns:.9f} turns")
    return int(nearest)


# ------------------ main terms ------------------
def n_main_term(t: float, sigma: SigmaData, K: float, n: int) -> float:
    """(K / 2 pi) sum_k (-1)^{n/2 - k} p_{n-2k-1} t^{n-2k} / (n-2k)."""
    half = n // 2
    total = 0.0
    for k, p in enumerate(sigma.coeffs):
        m = n - 2 * k
        total += (-1) ** (half - k) * p * t ** m / m
    return K / (2 * math.pi) * total


def weyl_leading_term(t: float, params: SpaceParams) -> float:
    return params.dim_chi * params.vol_Y / (params.n * params.T * params.vol_Xd) * t ** params.n


def leading_coefficient_error(params: SpaceParams) -> float:
    """Relative gap between (K/2 pi)(-1)^{n/2}/n and dim_chi vol_Y/(n T vol_Xd)."""
    from_main = params.K / (2 * math.pi) * (-1) ** (params.n // 2) / params.n
    from_weyl = params.dim_chi * params.vol_Y / (params.n * params.T * params.vol_Xd)
    return abs(from_main - from_weyl) / abs(from_weyl)


# ------------------ argument variation ------------------
def _phase_step(l0: complex, l1: complex) -> float:
    """Increment of arg between two log values, reduced to (-pi, pi]."""
    d = l1.imag - l0.imag
    return -((-d + math.pi) % (2 * math.pi) - math.pi)


def track_phase(logZ: LogFunction, nodes: Sequence[complex]) -> float:
    """
    Continuous change of Im log Z along a polygonal path.

    Each leg starts from PHASE_INITIAL_PIECES pieces; a piece is accepted once
    both of its halves move the phase by less than PHASE_MAX_STEP.
    """
    total = 0.0
    pieces = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        if a != b:
            pieces.extend(split_segment(a, b, settings.PHASE_INITIAL_PIECES))

    for a, b in pieces:
        stack = [(a, b, logZ(a), logZ(b), 0)]
        while stack:
            lo, hi, l_lo, l_hi, depth = stack.pop()
            mid = (lo + hi) / 2
            l_mid = logZ(mid)
            left = _phase_step(l_lo, l_mid)
            right = _phase_step(l_mid, l_hi)
            if abs(left) < settings.PHASE_MAX_STEP and abs(right) < settings.PHASE_MAX_STEP:
                total += left + right
                continue
            if depth >= settings.PHASE_MAX_DEPTH:
                raise PanelLimit(f"phase tracking stalled near {mid}")
            stack.append((mid, hi, l_mid, l_hi, depth + 1))
            stack.append((lo, mid, l_lo, l_mid, depth + 1))
    return total


def argument_variation_S(logZ_path: LogFunction, t: float, a: float, rho: Optional[float] = None) -> float:
    """
    S(t): change of arg Z along a -> a + it -> it.

    At heights where a singularity sits on the path the symmetric limit
    (S(t + eps) + S(t - eps)) / 2 with eps = S_EPSILON is returned.
    """
    if rho is not None and a <= rho:
        raise InvalidParameter(f"a = {a} must exceed rho = {rho}")

    def variation(height: float) -> float:
        return track_phase(logZ_path, [complex(a, 0), complex(a, height), complex(0, height)])

    try:
        return variation(t)
    except (OnSingularity, PanelLimit):
        eps = settings.S_EPSILON
        logger.info(f"S(t) at singular height t={t}; using the symmetric limit with eps={eps}")
        return 0.5 * (variation(t + eps) + variation(t - eps))


# ------------------ counting on the imaginary axis ------------------
def axis_rectangle(t: float, T: float, half_width: Optional[float] = None, floor: Optional[float] = None) -> Rectangle:
    """Thin rectangle around the segment i(0, t) that avoids the real axis."""
    half_width = settings.AXIS_HALF_WIDTH * T if half_width is None else half_width
    floor = settings.AXIS_FLOOR * T if floor is None else floor
    return Rectangle(re_min=-half_width, re_max=half_width, im_min=floor, im_max=t)


def axis_count(
    logderiv: LogDerivative,
    t: float,
    T: float,
    half_width: Optional[float] = None,
    floor: Optional[float] = None,
) -> Tuple[int, float]:
    """
    Singularities on i(0, t) by winding number, retrying at t +- NUDGE_FRACTION*T
    when a singularity sits on the top edge.

    Returns:
        (count, height actually used)
    """
    nudge = settings.NUDGE_FRACTION * T
    last_error: Optional[Exception] = None
    for height in (t, t + nudge, t - nudge):
        try:
            count = winding_count(logderiv, axis_rectangle(height, T, half_width, floor))
        except (PanelLimit, NonIntegerWinding, OnSingularity) as e:
            last_error = e
            continue
        if height != t:
            logger.warning(f"Counting height t={t} nudged to {height} to clear a singularity on the contour")
        return count, height
    raise PanelLimit(f"no admissible height near t={t}: {last_error}")


# ------------------ Ruelle rectangles ------------------
def compose_ruelle_catalog(catalogs: Sequence[Tuple[SingularityCatalog, float, int]]) -> SingularityCatalog:
    """Move each Selberg item to z - shift with order sign * order, then merge."""
    raw: List[Tuple[complex, int]] = []
    for catalog, shift, sign in catalogs:
        for item in catalog.items:
            raw.append((item.location - shift, sign * item.order))
    return merge_items(raw)


def ruelle_count_rectangle(
    catalogs: Sequence[Tuple[SingularityCatalog, float, int]],
    a: float,
    b: float,
    t: float,
    rho: float,
) -> int:
    """
    Signed singularity count of Z_R in a <= Re s <= b, 0 < Im s < t.

    Items on the real axis belong to N_0 and are not counted.
    """
    tol = settings.PARAM_TOL * max(1.0, rho)
    if not (-rho - tol <= a <= b <= rho + tol):
        raise InvalidParameter(f"need -rho <= a <= b <= rho, got a={a}, b={b}, rho={rho}")
    if t <= 0:
        raise InvalidParameter(f"t must be positive, got {t}")

    composed = compose_ruelle_catalog(catalogs)
    off_axis = SingularityCatalog(items=tuple(
        item for item in composed.items if abs(item.im) >= settings.BOUNDARY_TOL
    ))

    if a == b:
        for item in off_axis.items:
            if abs(item.re - a) < settings.BOUNDARY_TOL and item.im <= t + settings.BOUNDARY_TOL:
                raise BoundaryHit(f"singularity at {item.location} lies on the degenerate rectangle")
        return 0
    return count_catalog_in_region(off_axis, Rectangle(re_min=a, re_max=b, im_min=0.0, im_max=t))
