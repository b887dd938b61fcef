"""
Length Spectrum Files
Parser and canonical writer for the text spectrum format, and the
generator-matrix file read by spectrum-gen.

Format:
    version 1
    rho 1
    T 2
    l_max 12
    growth_const 1
    # length mult [trace] [hook=value ...]
    3.05714183896199 24 1
"""

import logging
from typing import Dict, List, Optional, Tuple

from app.config.settings import format_float, settings
from app.core.exceptions import NonPositiveLength, ParseError, UnsortedLengths
from app.core.validation import parse_int, parse_real, strip_comment
from app.models.schemas import LengthSpectrum, SpectrumEntry

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
HEADER_KEYS = ("version", "rho", "T", "l_max", "growth_const")
REQUIRED_HEADERS = ("version", "l_max", "growth_const")

Matrix = Tuple[float, float, float, float]


def _parse_record(fields: List[str], number: int) -> SpectrumEntry:
    if len(fields) < 2:
        raise ParseError("record needs at least `length mult`", number)

    try:
        length = parse_real(fields[0])
    except ValueError as e:
        raise ParseError(str(e), number)
    if length <= 0:
        raise NonPositiveLength(f"length {fields[0]} must be positive", number)

    try:
        mult = parse_int(fields[1])
    except ValueError as e:
        raise ParseError(str(e), number)
    if mult <= 0:
        raise ParseError(f"multiplicity {fields[1]} must be positive", number)

    rest = fields[2:]
    trace = 1.0
    if rest and "=" not in rest[0]:
        try:
            trace = parse_real(rest.pop(0))
        except ValueError as e:
            raise ParseError(str(e), number)

    hooks: Dict[str, float] = {}
    for token in rest:
        if "=" not in token:
            raise ParseError(f"unexpected token {token!r}; hook traces look like name=value", number)
        name, value = token.split("=", 1)
        if not name or name in hooks:
            raise ParseError(f"bad or repeated hook {name!r}", number)
        try:
            hooks[name] = parse_real(value)
        except ValueError as e:
            raise ParseError(str(e), number)

    return SpectrumEntry(length=length, mult=mult, trace=trace, tau_traces=hooks)


def parse_spectrum(text: str) -> LengthSpectrum:
    """
    Parse spectrum text.

    Raises:
        ParseError: malformed line or missing header, with its line number
        UnsortedLengths: a record shorter than its predecessor
        NonPositiveLength: a record with length <= 0
    """
    headers: Dict[str, float] = {}
    entries: List[SpectrumEntry] = []

    for number, line in enumerate(text.splitlines(), start=1):
        content = strip_comment(line)
        if not content:
            continue
        fields = content.split()

        if fields[0] in HEADER_KEYS:
            if entries:
                raise ParseError(f"header {fields[0]!r} after the first record", number)
            if len(fields) != 2:
                raise ParseError(f"header {fields[0]!r} takes exactly one value", number)
            if fields[0] in headers:
                raise ParseError(f"duplicate header {fields[0]!r}", number)
            try:
                headers[fields[0]] = parse_real(fields[1])
            except ValueError as e:
                raise ParseError(str(e), number)
            continue
        if fields[0][:1].isalpha():
            raise ParseError(f"unknown header {fields[0]!r}", number)

        entry = _parse_record(fields, number)
        if entries and entry.length < entries[-1].length:
            raise UnsortedLengths(
                f"length {entry.length} follows {entries[-1].length}; records must ascend", number
            )
        if "l_max" in headers and entry.length > headers["l_max"]:
            raise ParseError(f"length {entry.length} exceeds l_max {headers['l_max']}", number)
        entries.append(entry)

    for key in REQUIRED_HEADERS:
        if key not in headers:
            raise ParseError(f"missing header {key!r}")
    if headers["version"] != FORMAT_VERSION:
        raise ParseError(f"unsupported version {headers['version']}")
    for key in ("l_max", "growth_const", "rho", "T"):
        if key in headers and headers[key] <= 0:
            raise ParseError(f"header {key!r} must be positive")

    return LengthSpectrum(
        entries=tuple(entries),
        l_max=headers["l_max"],
        growth_const=headers["growth_const"],
        rho=headers.get("rho"),
        T=headers.get("T"),
    )


def write_spectrum(spec: LengthSpectrum) -> str:
    """Canonical text: fixed header order, 15 significant digits, trace always written."""
    lines = [f"version {FORMAT_VERSION}"]
    if spec.rho is not None:
        lines.append(f"rho {format_float(spec.rho)}")
    if spec.T is not None:
        lines.append(f"T {format_float(spec.T)}")
    lines.append(f"l_max {format_float(spec.l_max)}")
    lines.append(f"growth_const {format_float(spec.growth_const)}")

    for entry in spec.entries:
        fields = [format_float(entry.length), str(entry.mult), format_float(entry.trace)]
        fields += [f"{name}={format_float(value)}" for name, value in sorted(entry.tau_traces.items())]
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def parse_generators(text: str) -> List[Matrix]:
    """Four floats per line, row-major 2x2, determinant 1."""
    matrices: List[Matrix] = []
    for number, line in enumerate(text.splitlines(), start=1):
        content = strip_comment(line)
        if not content:
            continue
        fields = content.split()
        if len(fields) != 4:
            raise ParseError(f"expected 4 matrix entries, got {len(fields)}", number)
        try:
            a, b, c, d = (parse_real(f) for f in fields)
        except ValueError as e:
            raise ParseError(str(e), number)
        det = a * d - b * c
        scale = max(1.0, abs(a * d), abs(b * c))
        if abs(det - 1.0) > settings.PARAM_TOL * scale:
            raise ParseError(f"determinant is {det}, expected 1", number)
        matrices.append((a, b, c, d))
    if not matrices:
        raise ParseError("no generator matrices found")
    return matrices


def write_generators(matrices: List[Matrix], comment: Optional[str] = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines += [" ".join(format_float(x) for x in m) for m in matrices]
    return "\n".join(lines) + "\n"
