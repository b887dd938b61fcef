"""
Adaptive Panel Quadrature
Gauss-Legendre panels along straight complex segments, refined by bisection.
"""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from app.config.settings import settings

logger = logging.getLogger(__name__)

GAUSS_ORDER = 16
ROUNDOFF_FACTOR = 64 * np.finfo(float).eps
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)

VectorFunction = Callable[[np.ndarray], np.ndarray]


class PanelBudgetExceeded(Exception):
    """Internal signal; callers translate it into their own numerical error."""

    def __init__(self, panels: int, value: complex):
        self.panels = panels
        self.value = value
        super().__init__(f"panel budget exhausted after {panels} panels")


def gauss_panel(f: VectorFunction, a: complex, b: complex) -> complex:
    """Integral of f along the segment [a, b] with one fixed-order panel."""
    half = (b - a) / 2
    nodes = (a + b) / 2 + half * _NODES
    return complex(half * np.dot(_WEIGHTS, f(nodes)))


def l1_panel(f: VectorFunction, a: complex, b: complex) -> float:
    """Integral of |f| |dw| on one panel, the scale for absolute tolerances."""
    half = (b - a) / 2
    nodes = (a + b) / 2 + half * _NODES
    return float(abs(half) * np.dot(_WEIGHTS, np.abs(f(nodes))))


def split_segment(a: complex, b: complex, pieces: int) -> List[Tuple[complex, complex]]:
    cuts = [a + (b - a) * k / pieces for k in range(pieces + 1)]
    return list(zip(cuts[:-1], cuts[1:]))


def adaptive_segment(
    f: VectorFunction,
    a: complex,
    b: complex,
    abs_tol: float,
    max_panels: Optional[int] = None,
    accept: Optional[Callable[[complex], bool]] = None,
    min_length: float = 0.0,
    initial_panels: Optional[int] = None,
) -> Tuple[complex, int]:
    """
    Integrate f along [a, b] by bisection until every panel converges.

    A panel is accepted when its coarse value and the sum of its two halves
    differ by at most abs_tol scaled by the panel's share of the segment, and
    the optional `accept` predicate holds for the refined value.

    Returns:
        (integral, number of accepted panels)
    """
    max_panels = max_panels or settings.QUAD_MAX_PANELS
    initial_panels = initial_panels or settings.QUAD_INITIAL_PANELS
    total_length = abs(b - a)
    if total_length == 0:
        return 0j, 0

    stack = [(lo, hi, gauss_panel(f, lo, hi)) for lo, hi in split_segment(a, b, initial_panels)]
    stack.reverse()
    total = 0j
    accepted = 0
    evaluated = len(stack)

    while stack:
        lo, hi, coarse = stack.pop()
        mid = (lo + hi) / 2
        left = gauss_panel(f, lo, mid)
        right = gauss_panel(f, mid, hi)
        refined = left + right
        evaluated += 2
        share = abs(hi - lo) / total_length
        # Below the rounding floor further bisection cannot help
        floor = ROUNDOFF_FACTOR * (abs(left) + abs(right))
        converged = abs(refined - coarse) <= max(abs_tol * share, floor)
        if converged and (accept is None or accept(refined)):
            total += refined
            accepted += 1
            continue
        if evaluated > 2 * max_panels or abs(hi - lo) / 2 < min_length:
            raise PanelBudgetExceeded(accepted + len(stack) + 1, total)
        # Depth-first, left to right, so summation order is fixed
        stack.append((mid, hi, right))
        stack.append((lo, mid, left))

    return total, accepted
