"""
Identity Service
Randomized verification suites for the algebraic and numerical identities
the counting law rests on. Every suite is reproducible from its seed.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from app.config.settings import settings
from app.config.space_config import parse_space_config
from app.core.counting import leading_coefficient_error, n_main_term, winding_count
from app.core.exceptions import BoundaryHit
from app.core.fe_factor import (
    fe_integrand, phi_asymptotic, phi_quadrature, trig_residual, trig_residual_bound,
)
from app.core.fuchsian import fuchsian_enumerate, octagon_generators
from app.core.model_zeta import count_catalog_in_region, merge_items, model_logderiv
from app.core.sigma_poly import heat_coeffs_from_poly, poly_from_heat_coeffs
from app.core.space_params import build_space_params
from app.core.zeta_eval import (
    default_ip_table, factored_tail_bound, ruelle_log_direct, ruelle_log_factored, truncation_tail_bound,
)
from app.models.schemas import (
    Branch, IdentityReport, LengthSpectrum, Rectangle, SingularityCatalog, SpaceConfig, SpaceParams, ZetaKind,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["suite", "trials", "max_error", "threshold", "passed"]
IDENTITY_SUITES = [
    "leading", "heat", "trig", "counter",
    "phi-asymptotic", "phi-derivative", "main-term", "ruelle", "spectrum-stability",
]

REFERENCE_SETS = {
    # genus-2 surface, T = 2, K = -pi, tan branch
    "n2": "n = 2\nT = 2\nrho = 1\nvol_Y = 12.566370614359172\nvol_Xd = 12.566370614359172\n"
          "dim_chi = 1\nweights = 2:1\np_coeffs = 1\n",
    # same surface, cot branch
    "n2_cot": "n = 2\nT = 2\nrho = 1\nvol_Y = 12.566370614359172\nvol_Xd = 12.566370614359172\n"
              "dim_chi = 1\nweights = 2:1\np_coeffs = 1\neps_alpha = 1/2\n",
    # synthetic 4-manifold, P(w) = w^3 - w/4
    "n4": "n = 4\nT = 1\nrho = 1.5\nvol_Y = 1\nvol_Xd = 1\ndim_chi = 1\nweights = 1:3\np_coeffs = 1, -0.25\n",
}


def reference_config(name: str) -> SpaceConfig:
    return parse_space_config(REFERENCE_SETS[name], source=f"<reference {name}>")


def scan_heights() -> np.ndarray:
    count = int(round((settings.SCAN_T_MAX - settings.SCAN_T_MIN) / settings.SCAN_T_STEP)) + 1
    return np.linspace(settings.SCAN_T_MIN, settings.SCAN_T_MAX, count)


def random_space_params(rng: np.random.Generator) -> SpaceParams:
    """A valid parameter set: even n, root system {alpha} or {alpha/2, alpha}, rho from the weights."""
    n = int(rng.choice([2, 4, 6, 8]))
    T = float(rng.uniform(0.5, 3.0))
    if n > 2 and rng.random() < 0.5:
        m_half = int(rng.integers(1, n - 1))
        weights = [(T / 2, m_half), (T, n - 1 - m_half)]
    else:
        weights = [(T, n - 1)]
    rho = 0.5 * sum(w * m for w, m in weights)
    return build_space_params(
        n, T, rho,
        vol_Y=float(rng.uniform(0.1, 100.0)),
        vol_Xd=float(rng.uniform(0.1, 100.0)),
        dim_chi=int(rng.integers(1, 5)),
        weights_nbar=weights,
    )


def random_catalog(rng: np.random.Generator, max_items: int = 20, box: float = 3.0) -> SingularityCatalog:
    """Up to max_items singularities with orders in [-3, 3] minus 0, closed under conjugation."""
    raw = []
    while len(raw) < max_items:
        order = int(rng.choice([-3, -2, -1, 1, 2, 3]))
        z = complex(rng.uniform(-box, box), rng.uniform(0.05, box))
        if rng.random() < 0.2:
            raw.append((complex(z.real, 0.0), order))
            continue
        if len(raw) + 2 > max_items:
            break
        raw.extend([(z, order), (z.conjugate(), order)])
    return merge_items(raw)


def random_rectangle(rng: np.random.Generator, catalog: SingularityCatalog, box: float = 4.0,
                     clearance: float = 1e-3) -> Rectangle:
    """Random rectangle whose boundary stays clearance away from every singularity."""
    while True:
        re = np.sort(rng.uniform(-box, box, 2))
        im = np.sort(rng.uniform(-box, box, 2))
        if re[1] - re[0] < 0.1 or im[1] - im[0] < 0.1:
            continue
        rect = Rectangle(re_min=float(re[0]), re_max=float(re[1]), im_min=float(im[0]), im_max=float(im[1]))
        near = False
        for item in catalog.items:
            z = item.location
            dx = min(abs(z.real - rect.re_min), abs(z.real - rect.re_max))
            dy = min(abs(z.imag - rect.im_min), abs(z.imag - rect.im_max))
            if (dx < clearance and rect.im_min - clearance <= z.imag <= rect.im_max + clearance) or \
               (dy < clearance and rect.re_min - clearance <= z.real <= rect.re_max + clearance):
                near = True
                break
        if not near:
            return rect


def spectrum_mismatches(lower: LengthSpectrum, upper: LengthSpectrum) -> int:
    """Records of either spectrum below lower.l_max with no equal (length, mult) partner in the other."""
    tol = settings.TRACE_BUCKET_TOL
    cutoff = lower.l_max * (1 - tol)

    def below(spec: LengthSpectrum) -> List[Tuple[float, int]]:
        return [(e.length, e.mult) for e in spec.entries if e.length < cutoff]

    def unmatched(a: List[Tuple[float, int]], b: List[Tuple[float, int]]) -> int:
        return sum(
            1 for length, mult in a
            if not any(abs(length - other) <= tol * length and mult == m for other, m in b)
        )

    first, second = below(lower), below(upper)
    missing = unmatched(first, second) + unmatched(second, first)
    if missing:
        logger.warning(f"{missing} length records change between l_max={lower.l_max:.6g} and {upper.l_max:.6g}")
    return missing


class IdentityService:
    """Service running the identity suites."""

    def __init__(self, seed: Optional[int] = None, word_len: Optional[int] = None):
        self.seed = settings.DEFAULT_SEED if seed is None else seed
        self.word_len = settings.IDENTITY_WORD_LEN if word_len is None else word_len

    def _rng(self, offset: int) -> np.random.Generator:
        # each suite draws from its own stream so suites can be run alone
        return np.random.default_rng([self.seed, offset])

    def leading_coefficient(self, trials: int) -> IdentityReport:
        rng = self._rng(1)
        worst = max(leading_coefficient_error(random_space_params(rng)) for _ in range(trials))
        return self._report("leading_coefficient", trials, worst, 1e-12)

    def heat_roundtrip(self, trials: int) -> IdentityReport:
        rng = self._rng(2)
        worst = 0.0
        for _ in range(trials):
            n = int(rng.choice([2, 4, 6, 8]))
            T = float(rng.uniform(0.5, 3.0))
            coeffs = [1.0] + rng.uniform(-5, 5, n // 2 - 1).tolist()
            back = poly_from_heat_coeffs(heat_coeffs_from_poly(coeffs, n, T), n, T)
            scale = max(1.0, max(abs(c) for c in coeffs))
            worst = max(worst, max(abs(a - b) for a, b in zip(coeffs, back)) / scale)
        return self._report("heat_roundtrip", trials, worst, 1e-12)

    def trig_grid(self, trials: int) -> IdentityReport:
        """Residual over its envelope on a sigma1 x t grid; passes when every ratio is <= 1."""
        side = max(2, int(math.ceil(math.sqrt(trials))))
        worst = 0.0
        count = 0
        for branch in (Branch.tan, Branch.cot):
            for sigma1 in np.linspace(-3, 3, side):
                for magnitude in np.linspace(1, 10, side):
                    for t in (magnitude, -magnitude):
                        ratio = abs(trig_residual(branch, float(sigma1), float(t))) / trig_residual_bound(t)
                        worst = max(worst, ratio)
                        count += 1
        return self._report("trig_grid", count, worst, 1.0)

    def counter(self, trials: int, rectangles: int = 50) -> IdentityReport:
        """Winding numbers against catalog counts; max_error is the number of mismatches."""
        rng = self._rng(4)
        mismatches = 0
        cases = 0
        for _ in range(trials):
            catalog = random_catalog(rng)
            for _ in range(rectangles):
                rect = random_rectangle(rng, catalog)
                try:
                    expected = count_catalog_in_region(catalog, rect)
                except BoundaryHit:
                    continue
                got = winding_count(lambda s: model_logderiv(catalog, s), rect)
                cases += 1
                if got != expected:
                    mismatches += 1
                    logger.warning(f"Winding {got} != catalog count {expected} on {rect.corners()}")
        return self._report("counter", cases, float(mismatches), 0.0)

    # ------------------ reference-set suites ------------------
    def asymptotic_envelope(self, trials: int) -> IdentityReport:
        """
        |phi + re_part + i im_part| on sigma1 + it over the scan heights, both
        reference sets; fails outright when phi never outgrows the floor.
        """
        worst, peak, count = 0.0, 0.0, 0
        for name in ("n2", "n4"):
            config = reference_config(name)
            p = config.params
            for t in scan_heights():
                s = complex(settings.SCAN_SIGMA1, t)
                value = phi_quadrature(s, config.sigma, p.K, p.T)
                im_part, re_part = phi_asymptotic(s.real, t, config.sigma, p.K, p.T, p.n)
                worst = max(worst, abs(value + complex(re_part, im_part)))
                peak = max(peak, abs(value))
                count += 1
        if peak <= settings.PHI_GROWTH_FLOOR:
            logger.warning(f"max |phi| = {peak:.3e} never exceeds {settings.PHI_GROWTH_FLOOR:.1e}")
        return self._report("phi_asymptotic", count, worst, settings.PHI_ENVELOPE,
                            ok=peak > settings.PHI_GROWTH_FLOOR)

    def derivative_identity(self, trials: int) -> IdentityReport:
        """Central difference of phi against the integrand, tan and cot branches, |Im s| >= 0.5."""
        rng = self._rng(5)
        h = settings.DERIVATIVE_STEP
        rel_tol = settings.QUAD_MIN_REL_TOL
        worst = 0.0
        for name in ("n4", "n2_cot"):
            config = reference_config(name)
            sigma, K, T = config.sigma, config.params.K, config.params.T
            for _ in range(trials):
                s = complex(rng.uniform(-2, 2), rng.choice([-1, 1]) * rng.uniform(0.5, 2))
                derivative = (phi_quadrature(s + h, sigma, K, T, rel_tol)
                              - phi_quadrature(s - h, sigma, K, T, rel_tol)) / (2 * h)
                exact = fe_integrand(s, sigma, K, T)
                worst = max(worst, abs(derivative - exact) / max(1.0, abs(exact)))
        return self._report("phi_derivative", 2 * trials, worst, settings.DERIVATIVE_REL_TOL)

    def main_term_consistency(self, trials: int) -> IdentityReport:
        """|n_main(t) - Im phi(it) / 2 pi| over the scan heights, both reference sets."""
        worst, count = 0.0, 0
        for name in ("n2", "n4"):
            config = reference_config(name)
            p = config.params
            for t in scan_heights():
                from_phi = phi_quadrature(complex(0, t), config.sigma, p.K, p.T).imag / (2 * math.pi)
                worst = max(worst, abs(n_main_term(t, config.sigma, p.K, p.n) - from_phi))
                count += 1
        return self._report("main_term", count, worst, settings.MAIN_TERM_ENVELOPE)

    def octagon_spectrum(self, word_len: int) -> LengthSpectrum:
        p = reference_config("n2").params
        return fuchsian_enumerate(octagon_generators(), word_len, rho=p.rho, T=p.T)

    def ruelle_factorization(self, trials: int) -> IdentityReport:
        """Direct against factored Ruelle products on the genus-2 octagon spectrum."""
        params = reference_config("n2").params
        spec = self.octagon_spectrum(self.word_len)
        if spec.l_max < settings.RUELLE_MIN_L_MAX:
            logger.warning(
                f"Octagon spectrum at word length {self.word_len} is complete only below "
                f"l_max={spec.l_max:.4g} < {settings.RUELLE_MIN_L_MAX:g}"
            )
        ip = default_ip_table(params)
        k_max = settings.K_MAX_DEFAULT
        rng = self._rng(6)
        worst, tail = 0.0, 0.0
        for _ in range(trials):
            s = complex(rng.uniform(2 * params.rho + 0.5, 2 * params.rho + 3), rng.uniform(-5, 5))
            direct = ruelle_log_direct(s, spec, params)
            factored = ruelle_log_factored(s, spec, params, ip, k_max=k_max)
            worst = max(worst, abs(direct - factored))
            tail = max(tail, truncation_tail_bound(s, spec, params, k_max, ZetaKind.ruelle)
                       + factored_tail_bound(s, spec, params, ip, k_max))
        logger.info(f"Ruelle products agree to {worst:.3e}; truncation bound against the full group {tail:.3e}")
        return self._report("ruelle", trials, worst, settings.RUELLE_ABS_TOL)

    def spectrum_stability(self, trials: int) -> IdentityReport:
        """Mismatched (length, mult) records below the shorter enumeration's l_max."""
        lower = self.octagon_spectrum(max(1, self.word_len - 2))
        upper = self.octagon_spectrum(self.word_len)
        mismatches = spectrum_mismatches(lower, upper)
        return self._report("spectrum_stability", len(lower.entries), float(mismatches), 0.0)

    def run(self, suites: List[str], trials: int) -> List[IdentityReport]:
        runners: Dict[str, Callable[[int], IdentityReport]] = {
            "leading": self.leading_coefficient,
            "heat": self.heat_roundtrip,
            "trig": self.trig_grid,
            "counter": self.counter,
            "phi-asymptotic": self.asymptotic_envelope,
            "phi-derivative": self.derivative_identity,
            "main-term": self.main_term_consistency,
            "ruelle": self.ruelle_factorization,
            "spectrum-stability": self.spectrum_stability,
        }
        return [runners[name](trials) for name in suites]

    @staticmethod
    def _report(suite: str, trials: int, max_error: float, threshold: float, ok: bool = True) -> IdentityReport:
        report = IdentityReport(
            suite=suite, trials=trials, max_error=max_error, threshold=threshold,
            passed=ok and max_error <= threshold,
        )
        logger.info(f"Identity suite {suite}: {trials} trials, max error {max_error:.3e} (threshold {threshold:.1e})")
        return report
