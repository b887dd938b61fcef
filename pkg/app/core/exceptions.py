"""
Error Hierarchy
Validation failures map to CLI exit code 1, numerical failures to exit code 2.
"""

from typing import Optional


class ZetaToolkitError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = 1


class ValidationFailure(ZetaToolkitError, ValueError):
    """Input data violates a documented precondition or invariant."""

    exit_code = 1


class NumericalFailure(ZetaToolkitError, ArithmeticError):
    """A numerical procedure could not reach its guarantee."""

    exit_code = 2


# ------------------ space_params ------------------
class DimensionOdd(ValidationFailure):
    pass


class RhoMismatch(ValidationFailure):
    pass


class EmptyWeights(ValidationFailure):
    pass


class InvalidWeights(ValidationFailure):
    pass


class NotHalfInteger(ValidationFailure):
    pass


class InvalidParameter(ValidationFailure):
    pass


# ------------------ sigma_poly ------------------
class NotMonic(ValidationFailure):
    pass


class WrongLength(ValidationFailure):
    pass


class NotOdd(ValidationFailure):
    pass


class DegreeMismatch(ValidationFailure):
    pass


# ------------------ fe_factor ------------------
class TooCloseToRealAxis(ValidationFailure):
    pass


class NonNegativeSigma1(ValidationFailure):
    pass


class PoleOnPath(ValidationFailure):
    pass


class ToleranceNotMet(NumericalFailure):
    pass


# ------------------ zeta_eval ------------------
class OutsideHalfPlane(ValidationFailure):
    pass


class UnknownTauHook(ValidationFailure):
    pass


class InvalidIpTable(ValidationFailure):
    pass


class TailTooLarge(NumericalFailure):
    pass


# ------------------ model_zeta ------------------
class NonIntegerOrder(ValidationFailure):
    pass


class OnSingularity(ValidationFailure):
    pass


class BoundaryHit(ValidationFailure):
    pass


class RegionNotCovered(ValidationFailure):
    pass


# ------------------ counting ------------------
class PanelLimit(NumericalFailure):
    pass


class NonIntegerWinding(NumericalFailure):
    pass


# ------------------ spectrum_io ------------------
class ParseError(ValidationFailure):
    """Malformed text input; carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsortedLengths(ParseError):
    pass


class NonPositiveLength(ParseError):
    pass


class EllipticElementFound(ValidationFailure):
    pass


class SpectrumOverflow(NumericalFailure):
    pass


# ------------------ cli ------------------
class ConfigError(ValidationFailure):
    """Space configuration rejected; `key` names the failing entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class ConfigMissing(ValidationFailure):
    pass


class UnknownSubcommand(ValidationFailure):
    pass
