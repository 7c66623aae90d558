"""
Command-line interface for briesz with Pydantic configuration support.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

import yaml

from .__init__ import __version__
from .exceptions import ConfigurationError, NumericalGuardError
from .experiments import ExperimentRunner
from .models import EXPERIMENT_KINDS, ExperimentConfig, load_config_from_file
from .report import write_report

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3

SUBCOMMAND_HELP = {
    "kernel": "Tabulate the Bochner-Riesz kernel and its Lq norms",
    "apply": "Apply B_R^alpha to a test function or GridFunction file",
    "norms": "Lebesgue and Grand Lebesgue norms of a function",
    "young": "Randomized sharp Young inequality trials",
    "converge": "Lp convergence of B_R f to f",
    "uconverge": "Uniform convergence of B_R f to f",
    "gls": "Grand Lebesgue transfer ratios over a test family",
    "gauss-limit": "Convergence of B_R^(R^2/2) f0 to the Gaussian self-convolution",
    "bounds": "Table of bound coefficients W and kernel norms over (p, r)",
    "lowerbound": "Search of sup W over (alpha, R) against the Gaussian reference",
}

_PSI_KINDS = {"power": "power", "iwsb": "iwaniec_sbordone", "point": "single_point"}
_PSI_KEYS = {"alpha": "alpha_exp", "beta": "beta_exp", "r": "point"}


def setup_logging(verbosity: int = 0) -> None:
    """Setup logging based on verbosity level."""
    levels = [logging.WARNING, logging.INFO, logging.DEBUG]
    level = levels[min(verbosity, len(levels) - 1)]
    logging.basicConfig(
        level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )


def parse_psi(psi_str: str) -> Dict[str, Any]:
    """
    Parse a generating function string to a GeneratingFunction dictionary.

    Accepted forms are 'power:m=2', 'iwsb:a=1,b=3,alpha=1,beta=0' and
    'point:r=2'.
    """
    if not psi_str:
        return {}

    name, _, params = psi_str.partition(":")
    name = name.strip()
    if name not in _PSI_KINDS:
        raise ConfigurationError(f"Unknown psi kind '{name}', expected one of {', '.join(_PSI_KINDS)}")

    psi: Dict[str, Any] = {"kind": _PSI_KINDS[name]}
    for part in params.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ConfigurationError(f"Malformed psi parameter '{part}' in '{psi_str}'")
        key, value = part.split("=", 1)
        key = key.strip()
        psi[_PSI_KEYS.get(key, key)] = float(value.strip())
    return psi


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Experiment configuration from the config file and command line overrides."""
    kind = args.command

    # Load config if provided, otherwise the defaults of the subcommand
    if args.config:
        config_dict = load_config_from_file(args.config).to_dict()
    else:
        config_dict = ExperimentConfig.for_kind(kind).to_dict()
    config_dict["kind"] = kind

    # Override config with command line arguments
    if args.alpha is not None:
        config_dict.setdefault("operator", {})["alpha"] = args.alpha
    if args.R:
        config_dict.setdefault("operator", {})["R"] = args.R
    if args.method:
        config_dict.setdefault("operator", {})["method"] = args.method
    if args.pad_factor is not None:
        config_dict.setdefault("operator", {})["pad_factor"] = args.pad_factor
    if args.dim is not None:
        config_dict["grid"] = {"dim": args.dim}
    if args.p is not None:
        config_dict.setdefault("norms", {})["p"] = args.p
        if kind == "bounds":
            config_dict.setdefault("bounds", {})["p"] = [args.p]
    if args.r:
        config_dict.setdefault("norms", {})["r"] = args.r
        if kind == "bounds":
            config_dict.setdefault("bounds", {})["r"] = args.r
    if args.psi:
        config_dict.setdefault("norms", {})["psi"] = parse_psi(args.psi)
    if args.seed is not None:
        config_dict["seed"] = args.seed
    if args.input:
        config_dict["input_path"] = args.input
    if args.out:
        config_dict.setdefault("output", {})["path"] = args.out
    if args.format:
        config_dict.setdefault("output", {})["format"] = args.format

    return ExperimentConfig(**config_dict)


def experiment_command(args: argparse.Namespace) -> None:
    """Handle an experiment subcommand."""
    config = build_config(args)
    runner = ExperimentRunner(config=config)
    report = runner.run()
    write_report(report, config.output.path, config.output.format)
    if len(report.rejected):
        logger.warning(f"{len(report.rejected)} rows rejected, see the reason column")
    logger.info(f"{args.command} completed successfully")


def exit_code(error: BaseException) -> int:
    """Process exit code of a failed command."""
    if isinstance(error, NumericalGuardError):
        return EXIT_GUARD
    if isinstance(error, (ConfigurationError, ValueError, FileNotFoundError, yaml.YAMLError)):
        return EXIT_CONFIG
    return EXIT_FAILURE


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Configuration file (YAML or JSON)")
    parser.add_argument("--out", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], help="Report format (default: csv)")
    parser.add_argument("--seed", type=int, help="Seed of the random generator")
    parser.add_argument("--alpha", type=float, help="Bochner-Riesz order alpha")
    parser.add_argument("--dim", type=int, choices=[1, 2, 3], help="Spatial dimension (default grid)")
    parser.add_argument("--R", type=float, nargs="+", help="Multiplier radii")
    parser.add_argument("--p", type=float, help="Lebesgue exponent p (inf allowed)")
    parser.add_argument("--r", type=float, nargs="+", help="Target exponents r")
    parser.add_argument(
        "--psi",
        help="Generating function (e.g., 'power:m=2', 'iwsb:a=1,b=3,alpha=1,beta=0', 'point:r=2')",
    )
    parser.add_argument("--input", help="GridFunction JSON file used as input function")
    parser.add_argument("--method", choices=["spectral", "direct"], help="Operator implementation")
    parser.add_argument("--pad-factor", type=int, help="Zero-padding factor of spectral operators")


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point for CLI."""
    parser = argparse.ArgumentParser(
        description="briesz - Bochner-Riesz means, kernel norms and Grand Lebesgue bounds",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Kernel values and Lq norms in two dimensions
  briesz kernel --dim 2 --alpha 0.5 --out kernel.csv

  # Lp convergence of a smooth bump
  briesz converge --alpha 0.5 --R 2 4 8 16 32 --p 2

  # Sharp Young trials with a fixed seed
  briesz young --seed 7 --out young.csv

  # Grand Lebesgue transfer with an Iwaniec-Sbordone generating function
  briesz gls --psi iwsb:a=1,b=3,alpha=1,beta=0 --r 4 6 8

  # Lower-bound search from a configuration file
  briesz lowerbound --config lowerbound.yaml --format json
        """,
    )

    parser.add_argument("--version", action="version", version=f"briesz {__version__}")

    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase verbosity (use -v or -vv)",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for kind in EXPERIMENT_KINDS:
        sub = subparsers.add_parser(kind, help=SUBCOMMAND_HELP[kind])
        _add_common_arguments(sub)
        sub.set_defaults(func=experiment_command)

    # Parse arguments
    args = parser.parse_args(argv)

    # Setup logging
    setup_logging(args.verbose)

    # Execute command
    if hasattr(args, "func"):
        try:
            args.func(args)
        except Exception as e:
            logger.error(f"Command failed: {e}")
            sys.exit(exit_code(e))
    else:
        parser.print_help()
        sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()
