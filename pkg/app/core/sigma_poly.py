"""
Sigma Polynomial
Builds and evaluates the odd monic polynomial P_sigma of degree n-1.

Coefficients are stored highest degree first and only for odd powers:
[p_{n-1}, p_{n-3}, ..., p_1].
"""

import logging
from typing import List, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import factorial

from app.config.settings import relative_close, settings
from app.core.exceptions import DegreeMismatch, NotMonic, NotOdd, ParseError, WrongLength
from app.core.validation import parse_real, strip_comment
from app.models.schemas import RootDatum, SigmaData

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray]


def build_sigma_data(eps_sigma: float, coeffs: Sequence[float], c_sigma=None) -> SigmaData:
    """Wrap a coefficient list after checking it is monic."""
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise WrongLength("P_sigma needs at least one coefficient")
    if not relative_close(coeffs[0], 1.0):
        raise NotMonic(f"leading coefficient is {coeffs[0]}, expected 1")
    coeffs[0] = 1.0
    return SigmaData(eps_sigma=eps_sigma, coeffs=tuple(coeffs), c_sigma=c_sigma)


def _factorials(n: int) -> np.ndarray:
    """(n/2 - k - 1)! for k = 0, ..., n/2 - 1."""
    half = n // 2
    return factorial(np.arange(half - 1, -1, -1), exact=False)


def poly_from_heat_coeffs(c: Sequence[float], n: int, T: float) -> List[float]:
    """
    Heat coefficients [c_{-n/2}, ..., c_{-1}] to [p_{n-1}, ..., p_1].

    p_{n-2k-1} = 2T c_{-(n/2-k)} / (n/2-k-1)!, and monicity forces
    c_{-n/2} = (n/2-1)!/(2T).
    """
    half = n // 2
    if len(c) != half:
        raise WrongLength(f"expected {half} heat coefficients for n={n}, got {len(c)}")

    fact = _factorials(n)
    expected_leading = fact[0] / (2 * T)
    if not relative_close(float(c[0]), expected_leading):
        raise NotMonic(f"c_(-n/2) = {c[0]} but monicity requires {expected_leading}")

    coeffs = (2 * T * np.asarray(c, dtype=float) / fact).tolist()
    coeffs[0] = 1.0
    return coeffs


def heat_coeffs_from_poly(coeffs: Sequence[float], n: int, T: float) -> List[float]:
    """Inverse of poly_from_heat_coeffs."""
    half = n // 2
    if len(coeffs) != half:
        raise WrongLength(f"expected {half} coefficients for n={n}, got {len(coeffs)}")
    if not relative_close(float(coeffs[0]), 1.0):
        raise NotMonic(f"leading coefficient is {coeffs[0]}, expected 1")

    return (np.asarray(coeffs, dtype=float) * _factorials(n) / (2 * T)).tolist()


def eval_P(sigma: SigmaData, w: ArrayLike) -> ArrayLike:
    """P_sigma(w) = w * Q(w^2), Horner in w^2; exact oddness in floating point."""
    w = np.asarray(w, dtype=complex) if not np.isscalar(w) else complex(w)
    x = w * w
    acc = 0.0 * x
    for coeff in sigma.coeffs:
        acc = acc * x + coeff
    return w * acc


def expand_root_datum(rd: RootDatum, n: int) -> List[float]:
    """
    Expand prod (a_beta lambda + b_beta) / d_beta into odd coefficients.

    Even-degree coefficients must cancel: they only vanish for
    Weyl-invariant data.
    """
    active = sum(1 for a_beta, _, _ in rd.terms if a_beta != 0)
    if active != n - 1:
        raise DegreeMismatch(f"{active} factors carry lambda, need n-1 = {n - 1}")

    dense = np.array([1.0])
    for a_beta, b_beta, d_beta in rd.terms:
        dense = npoly.polymul(dense, np.array([b_beta, a_beta]) / d_beta)
    dense = np.pad(dense, (0, max(0, n - len(dense))))[:n]

    scale = np.max(np.abs(dense))
    even = dense[0::2]
    if np.any(np.abs(even) > settings.PARAM_TOL * scale):
        raise NotOdd(f"even-degree coefficients do not vanish: {even.tolist()}")
    if not relative_close(dense[n - 1], 1.0):
        raise NotMonic(f"leading coefficient is {dense[n - 1]}, expected 1")

    coeffs = dense[1::2][::-1].tolist()
    coeffs[0] = 1.0
    return coeffs


def eval_root_datum(rd: RootDatum, w: ArrayLike) -> ArrayLike:
    """Direct product evaluation, the reference for expand_root_datum."""
    result = np.ones_like(np.asarray(w, dtype=complex))
    for a_beta, b_beta, d_beta in rd.terms:
        result = result * (a_beta * np.asarray(w) + b_beta) / d_beta
    return result


def parse_root_datum(text: str) -> RootDatum:
    """Lines `a_beta b_beta d_beta`, whitespace separated, `#` comments."""
    terms = []
    for number, line in enumerate(text.splitlines(), start=1):
        content = strip_comment(line)
        if not content:
            continue
        fields = content.split()
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", number)
        try:
            a_beta, b_beta, d_beta = (parse_real(f) for f in fields)
        except ValueError as e:
            raise ParseError(str(e), number)
        if d_beta == 0:
            raise ParseError("d_beta must be nonzero", number)
        terms.append((a_beta, b_beta, d_beta))
    return RootDatum(terms=tuple(terms))
