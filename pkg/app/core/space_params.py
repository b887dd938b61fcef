"""
Space Parameters
Geometric, topological and bundle constants of Y and its compact dual X_d.
"""

import logging
import math
from typing import Iterable, List, Optional, Tuple

from app.config.settings import relative_close, settings
from app.core.exceptions import (
    DimensionOdd, EmptyWeights, InvalidParameter, InvalidWeights,
    NotHalfInteger, RhoMismatch,
)
from app.core.validation import positive
from app.models.schemas import SigmaData, SpaceParams, WeightMult

logger = logging.getLogger(__name__)


def build_space_params(
    n: int,
    T: float,
    rho: float,
    vol_Y: float,
    vol_Xd: float,
    dim_chi: int,
    weights_nbar: Iterable[Tuple[float, int]],
) -> SpaceParams:
    """
    Validate the raw constants and derive euler_ratio, d_Y and K.

    euler_ratio = (-1)^{n/2} vol_Y / vol_Xd is the ratio chi(Y)/chi(X_d);
    K = 2 pi dim_chi euler_ratio / T is the functional-equation constant.
    """
    if n < 2 or n % 2 != 0:
        raise DimensionOdd(f"n must be even and >= 2, got {n}")

    errors = [
        message for message in (
            positive("T", T), positive("rho", rho), positive("vol_Y", vol_Y),
            positive("vol_Xd", vol_Xd), positive("dim_chi", dim_chi),
        ) if message
    ]
    if errors:
        raise InvalidParameter("; ".join(errors))

    weights = [WeightMult(weight=float(w), mult=int(m)) for w, m in weights_nbar]
    if not weights:
        raise EmptyWeights("weights_nbar must not be empty")

    # Root system is {alpha} or {alpha/2, alpha}
    distinct = sorted({w.weight for w in weights})
    if len(distinct) > 2 or not all(
        relative_close(w, T) or relative_close(w, T / 2) for w in distinct
    ):
        raise InvalidWeights(f"weights must be drawn from {{T/2, T}} = {{{T / 2}, {T}}}, got {distinct}")

    half_sum = 0.5 * sum(w.mult * w.weight for w in weights)
    if not relative_close(half_sum, rho):
        raise RhoMismatch(f"rho={rho} but half the weighted root sum is {half_sum}")

    sign = -1 if (n // 2) % 2 else 1
    euler_ratio = sign * vol_Y / vol_Xd
    K = 2 * math.pi * dim_chi * euler_ratio / T

    return SpaceParams(
        n=n, T=T, rho=rho, vol_Y=vol_Y, vol_Xd=vol_Xd, dim_chi=dim_chi,
        weights_nbar=tuple(weights), euler_ratio=euler_ratio, d_Y=-sign, K=K,
    )


def epsilon_sigma(rho: float, T: float, eps_alpha: float) -> float:
    """Residue of rho/T + eps_alpha modulo Z, an exact element of {0, 1/2}."""
    if eps_alpha not in (0.0, 0.5):
        raise InvalidParameter(f"eps_alpha must be 0 or 1/2, got {eps_alpha}")
    if not (rho > 0 and T > 0):
        raise InvalidParameter("rho and T must be positive")

    doubled = 2.0 * (rho / T + eps_alpha)
    nearest = round(doubled)
    if abs(doubled - nearest) > 2 * settings.PARAM_TOL:
        raise NotHalfInteger(f"rho/T + eps_alpha = {doubled / 2} is not in Z/2")
    return 0.5 if nearest % 2 else 0.0


def lattice_points(sigma: SigmaData, T: float, bound: float) -> List[float]:
    """All s in T(eps_sigma + Z) with 0 < s <= bound, ascending."""
    eps = sigma.eps_sigma
    first = 0 if eps > 0 else 1
    last = math.floor(bound / T - eps + settings.PARAM_TOL)
    return [T * (k + eps) for k in range(first, last + 1)]


def dual_lattice_points(sigma: SigmaData, T: float, count: int) -> List[float]:
    """The first `count` points of T(N - eps_sigma), N = {1, 2, ...}."""
    return [T * (k - sigma.eps_sigma) for k in range(1, count + 1)]


def compute_c_sigma(norm_rho: float, norm_rho_m: float, norm_mu_plus_rho_m: float) -> float:
    """c(sigma) = |rho|^2 + |rho_m|^2 - |mu_sigma + rho_m|^2."""
    return norm_rho ** 2 + norm_rho_m ** 2 - norm_mu_plus_rho_m ** 2


def trivial_singularity_factor(params: SpaceParams) -> float:
    """2 d_Y dim_chi vol_Y / vol_Xd, the order multiplier of the lattice singularities."""
    return 2 * params.d_Y * params.dim_chi * params.vol_Y / params.vol_Xd


def describe(params: SpaceParams, sigma: Optional[SigmaData] = None) -> str:
    text = (f"n={params.n} T={params.T} rho={params.rho} "
            f"euler_ratio={params.euler_ratio:.6g} d_Y={params.d_Y} K={params.K:.6g}")
    if sigma is not None:
        text += f" eps_sigma={sigma.eps_sigma} branch={sigma.branch.value}"
    return text
