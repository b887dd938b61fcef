"""
Zeta Counting Toolkit
Command-line entry point: configuration, spectra, models and scans wired to
CSV / JSON-lines output.

    python -m app.main <subcommand> [options]
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from app.config.settings import settings
from app.config.space_config import load_space_config
from app.core.counting import ruelle_count_rectangle
from app.core.exceptions import (
    ConfigMissing, InvalidIpTable, ParseError, UnknownSubcommand, ValidationFailure, ZetaToolkitError,
)
from app.core.fuchsian import fuchsian_enumerate, octagon_generators
from app.core.spectrum_io import parse_generators, parse_spectrum, write_spectrum
from app.core.zeta_eval import (
    default_ip_table, factored_tail_bound, missing_hooks, parse_ip_table, ruelle_log_direct,
    ruelle_log_factored, selberg_log_product, truncation_tail_bound,
)
from app.models.schemas import IpTable, LengthSpectrum, OutputFormat, SpaceConfig, SpaceParams, ZetaKind
from app.services.identity_service import IDENTITY_SUITES, REPORT_COLUMNS, IdentityService
from app.services.model_service import ModelService
from app.services.output_service import OutputService
from app.services.scan_service import (
    CHECK_COLUMNS, COUNT_COLUMNS, DIAGNOSTIC_COLUMNS, PHI_COLUMNS, ScanService,
)

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "phi", "zeta-eval", "count", "ruelle-count", "spectrum-gen", "model-build", "check-fe", "identities",
)

ZETA_COLUMNS = ["re", "im", "method", "re_log", "im_log", "tail_bound"]

FILE_GRAMMARS = """\
file formats:
  space config (--config)   key=value lines, '#' comments
      n=2  T=2  rho=1  vol_Y=12.566370614359172  vol_Xd=12.566370614359172
      dim_chi=1  eps_alpha=0  weights=2:1  p_coeffs=1
      (heat_coeffs=c_-n/2,...,c_-1 or root_datum=FILE replaces p_coeffs; c_sigma optional)
  root datum (root_datum=)   lines 'a_beta b_beta d_beta': P(w) = prod (a_beta w + b_beta)/d_beta
  length spectrum (--spectrum)
      header lines 'version 1', 'rho R', 'T R', 'l_max R', 'growth_const R'
      then records 'length mult [trace] [hook=value ...]', ascending
  I_p table (--ip)           lines 'p hook lambda [dim_tau]'; hook 'triv' is trivial tau
  generators (--generators)  lines 'a b c d' (row-major 2x2, determinant 1)
  model file (--model)       JSON written by model-build
exit codes: 0 success, 1 validation error, 2 numerical failure
"""


class CliArgumentParser(argparse.ArgumentParser):
    """Usage errors are validation failures (exit 1), not argparse's exit 2."""

    def error(self, message: str):
        raise ValidationFailure(f"{self.prog}: {message}")


# ------------------ logging ------------------
def configure_logging(level: str) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.LOG_FILE:
        try:
            handlers.append(logging.FileHandler(settings.LOG_FILE))
        except PermissionError:
            # Fallback to console-only logging if file permissions fail
            print("Warning: Cannot write to log file. Using console logging only.", file=sys.stderr)

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


# ------------------ argument parsing ------------------
def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.csv.value)
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    common.add_argument("--log-level", default=settings.LOG_LEVEL)
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = CliArgumentParser(
        prog=settings.APP_NAME,
        description="Singularity counting for Selberg and Ruelle zeta functions of rank-one spaces.",
        epilog=FILE_GRAMMARS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    sub = parser.add_subparsers(dest="command", parser_class=CliArgumentParser)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(
            name, parents=[common], help=help_text, epilog=FILE_GRAMMARS,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )

    p = add("phi", "functional-equation exponent on a vertical line")
    p.add_argument("--config", type=Path)
    p.add_argument("--sigma1", type=float, default=-1.0)
    p.add_argument("--t-min", type=float, default=5.0)
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--rel-tol", type=float, default=None)

    p = add("zeta-eval", "truncated Euler products")
    p.add_argument("--spectrum", type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--re", type=float, required=True)
    p.add_argument("--im", type=float, default=0.0)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--selberg", dest="kind", action="store_const", const=ZetaKind.selberg.value)
    kind.add_argument("--ruelle", dest="kind", action="store_const", const=ZetaKind.ruelle.value)
    p.set_defaults(kind=ZetaKind.selberg.value)
    p.add_argument("--k-max", type=int, default=settings.K_MAX_DEFAULT)
    p.add_argument("--ip", type=Path, help="I_p table for the factored Ruelle product")
    p.add_argument("--no-strict", action="store_true", help="warn instead of failing on large truncation bounds")

    p = add("count", "winding counts against the main term along the imaginary axis")
    p.add_argument("--model", type=Path)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--a", type=float, default=None, help="abscissa of the S(t) contour (default rho + 1)")
    p.add_argument("--diagnostics", type=Path, help="write growth diagnostics to this file")

    p = add("ruelle-count", "signed singularity count of Z_R in a rectangle")
    p.add_argument("--model", type=Path)
    p.add_argument("--ip", type=Path)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--t", type=float, required=True)

    p = add("spectrum-gen", "primitive length spectrum from generator matrices")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--generators", type=Path)
    source.add_argument("--preset", choices=["octagon"])
    p.add_argument("--word-len", type=int, required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--oriented", action="store_true", help="count g and g^-1 as distinct classes")
    p.add_argument("--growth-const", type=float, default=None)
    p.add_argument("--config", type=Path, help="space config supplying rho and T headers")

    p = add("model-build", "model zeta function with the prescribed singularities")
    p.add_argument("--config", type=Path)
    p.add_argument("--eigs", default="", help="spectral points s:m, comma separated")
    p.add_argument("--zero-mult", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=0, help="number of trivial lattice points")
    p.add_argument("--catalog-out", type=Path)

    p = add("check-fe", "functional-equation checks")
    p.add_argument("--config", type=Path)
    p.add_argument("--model", type=Path)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--rel-tol", type=float, default=None)

    p = add("identities", "randomized identity suites")
    p.add_argument("--config", type=Path, help="validated before the suites run")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--suite", action="append", choices=IDENTITY_SUITES)
    p.add_argument("--word-len", type=int, default=settings.IDENTITY_WORD_LEN,
                   help="octagon word length for the ruelle and spectrum-stability suites")
    p.add_argument("--with-counter", action="store_true", help="include the winding-number suite")

    return parser


# ------------------ helpers ------------------
def _require(path: Optional[Path], flag: str) -> Path:
    if path is None:
        raise ConfigMissing(f"{flag} is required for this subcommand")
    return path


def _config(args: argparse.Namespace) -> SpaceConfig:
    return load_space_config(_require(args.config, "--config"))


def _read(path: Path, what: str) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {what} {path}: {e}")


def _emit(args: argparse.Namespace, rows: List[Dict], columns: List[str]) -> None:
    text = OutputService(args.format).write(rows, columns, args.out)
    if args.out is None:
        sys.stdout.write(text)


# ------------------ subcommands ------------------
def cmd_phi(args: argparse.Namespace) -> int:
    service = ScanService(_config(args), args.rel_tol)
    _emit(args, service.phi_scan(args.sigma1, args.t_min, args.t_max, args.step), PHI_COLUMNS)
    return 0


def cmd_zeta_eval(args: argparse.Namespace) -> int:
    config = _config(args)
    params = config.params
    spec = parse_spectrum(_read(_require(args.spectrum, "--spectrum"), "spectrum"))
    s = complex(args.re, args.im)
    strict = not args.no_strict

    rows = []
    if args.kind == ZetaKind.selberg.value:
        value = selberg_log_product(s, spec, params, args.k_max, strict=strict)
        tail = truncation_tail_bound(s, spec, params, args.k_max, ZetaKind.selberg)
        rows.append({"re": s.real, "im": s.imag, "method": "selberg", "re_log": value.real,
                     "im_log": value.imag, "tail_bound": tail})
    else:
        direct = ruelle_log_direct(s, spec, params)
        rows.append({"re": s.real, "im": s.imag, "method": "ruelle_direct", "re_log": direct.real,
                     "im_log": direct.imag,
                     "tail_bound": truncation_tail_bound(s, spec, params, args.k_max, ZetaKind.ruelle)})
        ip = parse_ip_table(_read(args.ip, "I_p table"), params) if args.ip else _default_ip(spec, params)
        if ip is not None:
            factored = ruelle_log_factored(s, spec, params, ip, args.k_max)
            rows.append({"re": s.real, "im": s.imag, "method": "ruelle_factored", "re_log": factored.real,
                         "im_log": factored.imag,
                         "tail_bound": factored_tail_bound(s, spec, params, ip, args.k_max)})
    _emit(args, rows, ZETA_COLUMNS)
    return 0


def _default_ip(spec: LengthSpectrum, params: SpaceParams) -> Optional[IpTable]:
    """Default I_p table, or None when the spectrum cannot feed it."""
    try:
        ip = default_ip_table(params)
    except InvalidIpTable as e:
        logger.warning(f"Skipping the factored Ruelle product: {e}")
        return None
    missing = missing_hooks(spec, ip)
    if missing:
        logger.warning(f"Skipping the factored Ruelle product: spectrum has no traces for {', '.join(missing)}; supply --ip")
        return None
    return ip


def cmd_count(args: argparse.Namespace) -> int:
    model_file = ModelService().load(_require(args.model, "--model"))
    service = ScanService(model_file.config)
    rows = service.count_scan(model_file, args.t_max, args.step, args.a)
    _emit(args, rows, COUNT_COLUMNS)

    if args.diagnostics:
        t_min = min(2.0, args.t_max)
        diag = service.diagnostics(model_file, t_min, args.t_max, args.step, args.a)
        OutputService(args.format).write(diag, DIAGNOSTIC_COLUMNS, args.diagnostics)
    return 0


def cmd_ruelle_count(args: argparse.Namespace) -> int:
    model_file = ModelService().load(_require(args.model, "--model"))
    params = model_file.config.params
    ip = parse_ip_table(_read(args.ip, "I_p table"), params) if args.ip else default_ip_table(params)

    # every tau reuses the model catalog; dim_tau copies of it
    catalogs = []
    for p in sorted(ip.rows):
        sign = -1 if p % 2 else 1
        for entry in ip.rows[p]:
            catalogs.extend([(model_file.catalog, params.rho - entry.lam, sign)] * entry.dim_tau)

    count = ruelle_count_rectangle(catalogs, args.a, args.b, args.t, params.rho)
    rows = [{"a": args.a, "b": args.b, "t": args.t, "count": count, "count_over_t_n": count / args.t ** params.n}]
    _emit(args, rows, ["a", "b", "t", "count", "count_over_t_n"])
    return 0


def cmd_spectrum_gen(args: argparse.Namespace) -> int:
    if args.preset == "octagon":
        generators = octagon_generators()
    else:
        generators = parse_generators(_read(_require(args.generators, "--generators"), "generators"))

    rho = T = None
    if args.config:
        config = load_space_config(args.config)
        rho, T = config.params.rho, config.params.T

    spec = fuchsian_enumerate(
        generators, args.word_len, args.scale, oriented=args.oriented,
        growth_const=args.growth_const, rho=rho, T=T,
    )
    text = write_spectrum(spec)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
        logger.info(f"Wrote spectrum with {len(spec.entries)} lengths to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_model_build(args: argparse.Namespace) -> int:
    service = ModelService()
    model_file = service.build(_config(args), service.parse_eigs(args.eigs), args.zero_mult, args.cutoff)
    service.save(model_file, _require(args.out, "--out"))
    if args.catalog_out:
        args.catalog_out.parent.mkdir(parents=True, exist_ok=True)
        args.catalog_out.write_text(service.catalog_jsonl(model_file.catalog), encoding="utf-8")
    return 0


def cmd_check_fe(args: argparse.Namespace) -> int:
    model_file = ModelService().load(args.model) if args.model else None
    if args.config:
        config = _config(args)
    elif model_file is not None:
        config = model_file.config
    else:
        raise ConfigMissing("--config or --model is required for check-fe")

    rows = ScanService(config, args.rel_tol).check_fe(args.points, args.seed, model_file)
    _emit(args, rows, CHECK_COLUMNS)
    return 0 if all(row["passed"] for row in rows) else 2


def cmd_identities(args: argparse.Namespace) -> int:
    if args.config:
        load_space_config(args.config)
    suites = args.suite or ["leading", "heat", "trig"] + (["counter"] if args.with_counter else [])
    reports = IdentityService(args.seed, args.word_len).run(suites, args.trials)
    _emit(args, [r.model_dump() for r in reports], REPORT_COLUMNS)
    return 0 if all(r.passed for r in reports) else 2


HANDLERS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "phi": cmd_phi,
    "zeta-eval": cmd_zeta_eval,
    "count": cmd_count,
    "ruelle-count": cmd_ruelle_count,
    "spectrum-gen": cmd_spectrum_gen,
    "model-build": cmd_model_build,
    "check-fe": cmd_check_fe,
    "identities": cmd_identities,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Execute one subcommand; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and not argv[0].startswith("-") and argv[0] not in SUBCOMMANDS:
            raise UnknownSubcommand(f"unknown subcommand {argv[0]!r}; expected one of {', '.join(SUBCOMMANDS)}")
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UnknownSubcommand(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
        configure_logging("DEBUG" if settings.DEBUG else args.log_level)
        logger.debug(f"Running {args.command} with {vars(args)}")
        return HANDLERS[args.command](args)
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except ZetaToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: invalid input: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
