"""
Zeta Evaluation
Truncated Euler products for log Z_S and log Z_R in their convergence
half-planes, the Ruelle-from-Selberg factorization and truncation bounds.
"""

import logging
import math
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from app.config.settings import settings
from app.core.exceptions import (
    InvalidIpTable, OutsideHalfPlane, ParseError, TailTooLarge, UnknownTauHook,
)
from app.core.validation import parse_int, parse_real, strip_comment
from app.models.schemas import (
    IpEntry, IpTable, LengthSpectrum, SpaceParams, WeightMult, ZetaKind,
)

logger = logging.getLogger(__name__)

TRIVIAL_HOOK = "triv"


# ------------------ symmetric powers ------------------
def symmetric_power_weights(weights_nbar: Sequence[WeightMult], k: int) -> List[Tuple[float, int]]:
    """
    a-weights of S^k(n-bar) with multiplicities.

    A weight space of dimension m contributes C(m + j - 1, j) monomials of
    degree j; equal total weights are merged.
    """
    if k == 0:
        return [(0.0, 1)]

    merged: Dict[float, Tuple[float, int]] = {}
    for parts in product(range(k + 1), repeat=len(weights_nbar)):
        if sum(parts) != k:
            continue
        weight = sum(j * w.weight for j, w in zip(parts, weights_nbar))
        count = 1
        for j, w in zip(parts, weights_nbar):
            count *= int(comb(w.mult + j - 1, j, exact=True))
        key = round(weight, 12)
        previous = merged.get(key, (weight, 0))
        merged[key] = (previous[0], previous[1] + count)
    return sorted(merged.values())


def _weight_table(params: SpaceParams, k_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Flattened (mu, count) over all symmetric degrees 0..k_max."""
    mus, counts = [], []
    for k in range(k_max + 1):
        for weight, count in symmetric_power_weights(params.weights_nbar, k):
            mus.append(weight)
            counts.append(count)
    return np.asarray(mus, dtype=float), np.asarray(counts, dtype=float)


def _spectrum_arrays(spec: LengthSpectrum) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    lengths = np.array([e.length for e in spec.entries], dtype=float)
    mults = np.array([e.mult for e in spec.entries], dtype=float)
    traces = np.array([e.trace for e in spec.entries], dtype=float)
    return lengths, mults, traces


# ------------------ Euler products ------------------
def selberg_log_product(
    s: complex,
    spec: LengthSpectrum,
    params: SpaceParams,
    k_max: Optional[int] = None,
    strict: Optional[bool] = None,
    traces: Optional[Sequence[float]] = None,
) -> complex:
    """
    log Z_S(s) truncated at the spectrum and at symmetric degree k_max.

    Args:
        s: Point with Re(s) > rho
        spec: Primitive length spectrum
        params: Space parameters (rho and the n-bar weights)
        k_max: Highest symmetric power, default K_MAX_DEFAULT
        strict: Raise TailTooLarge when the truncation bound exceeds TAIL_THRESHOLD
        traces: Per-class traces replacing the spectrum's own column

    Returns:
        complex: Sum of principal logs log(1 - tr e^{-(s + rho + mu) l})
    """
    s = complex(s)
    k_max = settings.K_MAX_DEFAULT if k_max is None else k_max
    strict = settings.STRICT_TAIL if strict is None else strict
    if s.real <= params.rho:
        raise OutsideHalfPlane(f"Re(s) = {s.real} must exceed rho = {params.rho}")
    if k_max < 0:
        raise ValueError("k_max must be non-negative")

    _check_tail(s, spec, params, k_max, ZetaKind.selberg, strict)
    if not spec.entries:
        return 0j

    lengths, mults, own_traces = _spectrum_arrays(spec)
    trace_col = own_traces if traces is None else np.asarray(traces, dtype=float)
    mus, counts = _weight_table(params, k_max)

    exponent = -np.outer(lengths, s + params.rho + mus)
    x = trace_col[:, None] * np.exp(exponent)
    terms = (mults[:, None] * counts[None, :]) * np.log1p(-x)
    return complex(np.sum(terms))


def ruelle_log_direct(s: complex, spec: LengthSpectrum, params: SpaceParams) -> complex:
    """(-1)^{n-1} sum over primitive classes of log(1 - tr e^{-s l})."""
    s = complex(s)
    if s.real <= 2 * params.rho:
        raise OutsideHalfPlane(f"Re(s) = {s.real} must exceed 2 rho = {2 * params.rho}")
    if not spec.entries:
        return 0j

    lengths, mults, traces = _spectrum_arrays(spec)
    sign = -1.0 if (params.n - 1) % 2 else 1.0
    return complex(sign * np.sum(mults * np.log1p(-traces * np.exp(-s * lengths))))


def tau_traces(spec: LengthSpectrum, hook: str) -> Optional[List[float]]:
    """Trace column for an IpTable hook; None means the spectrum's own traces."""
    if hook == TRIVIAL_HOOK:
        return None
    column = []
    for entry in spec.entries:
        if hook not in entry.tau_traces:
            raise UnknownTauHook(f"no trace for hook {hook!r} at length {entry.length}")
        column.append(entry.tau_traces[hook])
    return column


def missing_hooks(spec: LengthSpectrum, ip: IpTable) -> List[str]:
    """Hooks of the table that some spectrum record carries no trace for."""
    hooks = sorted({entry.tau_hook for rows in ip.rows.values() for entry in rows} - {TRIVIAL_HOOK})
    return [hook for hook in hooks if any(hook not in e.tau_traces for e in spec.entries)]


def ruelle_log_factored(
    s: complex,
    spec: LengthSpectrum,
    params: SpaceParams,
    ip: IpTable,
    k_max: Optional[int] = None,
) -> complex:
    """
    log Z_R(s) = sum_p (-1)^p sum_{(tau, lambda)} dim_tau log Z_S(s + rho - lambda, tau).

    dim_tau counts the weight lines of V_tau, each carrying the hook's trace.
    """
    s = complex(s)
    if s.real <= 2 * params.rho:
        raise OutsideHalfPlane(f"Re(s) = {s.real} must exceed 2 rho = {2 * params.rho}")
    validate_ip_table(ip, params)

    total = 0j
    for p in sorted(ip.rows):
        sign = -1.0 if p % 2 else 1.0
        for entry in ip.rows[p]:
            shifted = s + params.rho - entry.lam
            traces = tau_traces(spec, entry.tau_hook)
            value = selberg_log_product(shifted, spec, params, k_max, strict=False, traces=traces)
            total += sign * entry.dim_tau * value
    return total


# ------------------ truncation bounds ------------------
def truncation_tail_bound(
    s: complex,
    spec: LengthSpectrum,
    params: SpaceParams,
    k_max: Optional[int] = None,
    kind: ZetaKind = ZetaKind.selberg,
) -> float:
    """
    Upper bound on the modulus of the omitted log-product mass.

    Classes beyond l_max: with #{l <= x} <= C e^{2 rho x} and a per-class
    weight e^{-beta l}, the omitted sum is at most
    beta C e^{-(beta - 2 rho) L} / (beta - 2 rho), times the symmetric-power
    factor prod (1 - e^{-w l})^{-m} and 1/(1 - |x|).

    Symmetric degrees beyond k_max: at most C(k+d-1, k) weights of degree k,
    each below q^k with q = e^{-w_min l}; the ratio of successive terms is
    bounded by r = q (K+1+d)/(K+2), so the tail is N_{K+1} q^{K+1}/(1 - r).
    """
    s = complex(s)
    k_max = settings.K_MAX_DEFAULT if k_max is None else k_max
    sigma = s.real
    rho = params.rho
    beta = sigma + rho if kind == ZetaKind.selberg else sigma
    if beta <= 2 * rho:
        return math.inf

    L = spec.l_max
    trace_max = max([1.0] + [abs(e.trace) for e in spec.entries])
    w_min = min(w.weight for w in params.weights_nbar)
    dim = sum(w.mult for w in params.weights_nbar)

    x_max = trace_max * math.exp(-beta * L)
    if x_max >= 1:
        return math.inf
    amplitude = trace_max / (1 - x_max)
    if kind == ZetaKind.selberg:
        amplitude *= (1 - math.exp(-w_min * L)) ** (-dim)
    class_tail = amplitude * beta * spec.growth_const * math.exp(-(beta - 2 * rho) * L) / (beta - 2 * rho)

    if kind == ZetaKind.ruelle:
        return class_tail

    k_tail = 0.0
    n_next = float(comb(k_max + dim, k_max + 1, exact=True))
    for entry in spec.entries:
        q = math.exp(-w_min * entry.length)
        ratio = q * (k_max + 1 + dim) / (k_max + 2)
        if ratio >= 1:
            return math.inf
        x0 = abs(entry.trace) * math.exp(-beta * entry.length)
        if x0 >= 1:
            return math.inf
        k_tail += entry.mult * x0 / (1 - x0) * n_next * q ** (k_max + 1) / (1 - ratio)

    return class_tail + k_tail


def factored_tail_bound(s: complex, spec: LengthSpectrum, params: SpaceParams, ip: IpTable,
                        k_max: Optional[int] = None) -> float:
    """Sum of the Selberg bounds at every shifted argument, weighted by dim_tau."""
    s = complex(s)
    return sum(
        entry.dim_tau * truncation_tail_bound(s + params.rho - entry.lam, spec, params, k_max, ZetaKind.selberg)
        for entries in ip.rows.values()
        for entry in entries
    )


def _check_tail(s: complex, spec: LengthSpectrum, params: SpaceParams, k_max: int,
                kind: ZetaKind, strict: bool) -> float:
    tail = truncation_tail_bound(s, spec, params, k_max, kind)
    if tail > settings.TAIL_THRESHOLD:
        if strict:
            raise TailTooLarge(
                f"truncation bound {tail:.3e} at s={s} exceeds {settings.TAIL_THRESHOLD:.1e}; "
                "raise l_max or k_max, or disable strict mode"
            )
        logger.warning(f"Truncation bound {tail:.3e} at s={s} above {settings.TAIL_THRESHOLD:.1e} (non-strict)")
    return tail


# ------------------ I_p tables ------------------
def validate_ip_table(ip: IpTable, params: SpaceParams) -> IpTable:
    """Shifts rho - lambda lie in [-rho, rho]; dimensions add up to 2^{n-1}."""
    tol = settings.PARAM_TOL * max(1.0, params.rho)
    total_dim = 0
    for p, entries in ip.rows.items():
        if not 0 <= p <= params.n - 1:
            raise InvalidIpTable(f"degree p={p} outside 0..{params.n - 1}")
        for entry in entries:
            shift = params.rho - entry.lam
            if abs(shift) > params.rho + tol:
                raise InvalidIpTable(
                    f"shift rho - lambda = {shift} for p={p} lies outside [-rho, rho]"
                )
            total_dim += entry.dim_tau
    expected = 2 ** (params.n - 1)
    if total_dim != expected:
        raise InvalidIpTable(f"dimensions sum to {total_dim}, expected 2^(n-1) = {expected}")
    return ip


def build_ip_table(rows: Dict[int, Sequence[Tuple[str, float, int]]], params: SpaceParams) -> IpTable:
    table = IpTable(rows={
        p: tuple(IpEntry(tau_hook=hook, lam=lam, dim_tau=dim) for hook, lam, dim in entries)
        for p, entries in rows.items()
    })
    return validate_ip_table(table, params)


def default_ip_table(params: SpaceParams) -> IpTable:
    """Exterior powers of n for the root system {alpha}: weight pT, dimension C(n-1, p)."""
    distinct = {w.weight for w in params.weights_nbar}
    if len(distinct) != 1:
        raise InvalidIpTable("no default I_p table for the root system {alpha/2, alpha}; supply --ip")

    rows = {}
    for p in range(params.n):
        hook = TRIVIAL_HOOK if p in (0, params.n - 1) else f"ext{p}"
        rows[p] = [(hook, p * params.T, int(comb(params.n - 1, p, exact=True)))]
    return build_ip_table(rows, params)


def parse_ip_table(text: str, params: SpaceParams) -> IpTable:
    """Lines `p hook lambda [dim_tau]`, whitespace separated, `#` comments."""
    rows: Dict[int, List[Tuple[str, float, int]]] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = strip_comment(line)
        if not content:
            continue
        fields = content.split()
        if len(fields) not in (3, 4):
            raise ParseError(f"expected `p hook lambda [dim]`, got {len(fields)} fields", number)
        try:
            p = parse_int(fields[0])
            lam = parse_real(fields[2])
            dim = parse_int(fields[3]) if len(fields) == 4 else 1
        except ValueError as e:
            raise ParseError(str(e), number)
        if dim <= 0:
            raise ParseError("dim_tau must be positive", number)
        rows.setdefault(p, []).append((fields[1], lam, dim))
    return build_ip_table(rows, params)
