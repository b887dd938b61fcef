from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ------------------ CORE ENUMS ------------------
class Branch(str, Enum):
    """Trigonometric kernel of the functional-equation exponent."""
    tan = "tan"
    cot = "cot"


class ZetaKind(str, Enum):
    selberg = "selberg"
    ruelle = "ruelle"


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


# ------------------ SPACE PARAMETERS ------------------
class WeightMult(FrozenModel):
    weight: float = Field(gt=0)
    mult: int = Field(gt=0)


class SpaceParams(FrozenModel):
    n: int
    T: float = Field(gt=0)
    rho: float = Field(gt=0)
    vol_Y: float = Field(gt=0)
    vol_Xd: float = Field(gt=0)
    dim_chi: int = Field(gt=0)
    weights_nbar: Tuple[WeightMult, ...]
    euler_ratio: float
    d_Y: int
    K: float

    @property
    def basis_weights(self) -> List[float]:
        """a-weights of a basis of n-bar, each weight repeated by its multiplicity."""
        return [w.weight for w in self.weights_nbar for _ in range(w.mult)]


class SigmaData(FrozenModel):
    eps_sigma: float
    coeffs: Tuple[float, ...]
    c_sigma: Optional[float] = None

    @field_validator("eps_sigma")
    @classmethod
    def _half_or_zero(cls, value: float) -> float:
        if value not in (0.0, 0.5):
            raise ValueError("eps_sigma must be 0 or 1/2")
        return value

    @property
    def n(self) -> int:
        return 2 * len(self.coeffs)

    @property
    def branch(self) -> Branch:
        return Branch.tan if self.eps_sigma == 0.5 else Branch.cot


class SpaceConfig(FrozenModel):
    params: SpaceParams
    sigma: SigmaData
    eps_alpha: float = 0.0


class RootDatum(FrozenModel):
    terms: Tuple[Tuple[float, float, float], ...]

    @field_validator("terms")
    @classmethod
    def _nonzero_denominators(cls, terms):
        for a_beta, b_beta, d_beta in terms:
            if d_beta == 0:
                raise ValueError("d_beta must be nonzero")
        return terms


# ------------------ LENGTH SPECTRA ------------------
class SpectrumEntry(FrozenModel):
    length: float = Field(gt=0)
    mult: int = Field(gt=0)
    trace: float = 1.0
    tau_traces: Dict[str, float] = Field(default_factory=dict)


class LengthSpectrum(FrozenModel):
    entries: Tuple[SpectrumEntry, ...] = ()
    l_max: float = Field(gt=0)
    growth_const: float = Field(gt=0)
    rho: Optional[float] = None
    T: Optional[float] = None

    @model_validator(mode="after")
    def _sorted_and_complete(self):
        lengths = [e.length for e in self.entries]
        if any(b < a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("entries must be sorted ascending by length")
        if lengths and lengths[-1] > self.l_max:
            raise ValueError("every length must be <= l_max")
        return self


class IpEntry(FrozenModel):
    tau_hook: str
    lam: float
    dim_tau: int = Field(default=1, gt=0)


class IpTable(FrozenModel):
    rows: Dict[int, Tuple[IpEntry, ...]]


# ------------------ MODEL ZETA ------------------
class ModelSpectrum(FrozenModel):
    ay_eigs: Tuple[Tuple[float, int], ...] = ()
    include_zero: bool = False
    zero_mult: int = Field(default=0, ge=0)
    lattice_cutoff: int = Field(default=0, ge=0)
    q: int

    @field_validator("ay_eigs")
    @classmethod
    def _valid_eigs(cls, eigs):
        for s_j, m_j in eigs:
            if s_j < 0 or m_j <= 0:
                raise ValueError("eigenvalues must be >= 0 with positive multiplicity")
        return eigs


class CatalogItem(FrozenModel):
    re: float
    im: float
    order: int

    @property
    def location(self) -> complex:
        return complex(self.re, self.im)


class SingularityCatalog(FrozenModel):
    items: Tuple[CatalogItem, ...] = ()


class Rectangle(FrozenModel):
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @model_validator(mode="after")
    def _oriented(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("rectangle needs re_min < re_max and im_min < im_max")
        return self

    def corners(self) -> List[complex]:
        """Counter-clockwise, starting at the lower-left corner."""
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]


class ModelFile(FrozenModel):
    """Everything `count`, `ruelle-count` and `check-fe` need from `model-build`."""
    config: SpaceConfig
    model: ModelSpectrum
    catalog: SingularityCatalog


# ------------------ REPORTS ------------------
class IdentityReport(BaseModel):
    suite: str
    trials: int
    max_error: float
    threshold: float
    passed: bool
