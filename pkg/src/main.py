#!/usr/bin/env python3
"""
multiaccess: steady-state analysis of multi-channel multiple-access systems.
Command-line entry point.
"""

import argparse
import sys
from typing import List, Optional

import structlog
from rich.console import Console
from rich.markup import escape

from src.cli.commands import cmd_exact, cmd_simulate, cmd_sweep, cmd_verify
from src.common.config import load_config
from src.common.exceptions import (
    ConditioningError,
    InvalidParameterError,
    MultiAccessError,
    OracleScopeError,
    ScenarioSchemaError,
    UndefinedMetricError,
)
from src.common.log_setup import configure_logging
from src.common.types import OutputFormat

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_SCOPE = 4
EXIT_CONDITIONING = 5
EXIT_UNDEFINED = 6


def positive_int(text: str) -> int:
    """argparse type for strictly positive integers."""
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def seed_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return value


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with its four subcommands."""
    parser = argparse.ArgumentParser(
        prog="multiaccess",
        description="Steady-state analysis of multi-channel multiple-access systems",
    )
    parser.add_argument("--config", help="Path to a YAML configuration file")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Override the configured log level",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    formats = [f.value for f in OutputFormat]

    exact = subparsers.add_parser("exact", help="Exact product-form analysis")
    exact.add_argument("scenario", help="Scenario JSON file")
    exact.add_argument("--format", choices=formats, default="table")
    exact.add_argument("--csv", help="Also write the metrics as CSV to this path")

    simulate = subparsers.add_parser("simulate", help="Simulate and compare with the exact analysis")
    simulate.add_argument("scenario", help="Scenario JSON file")
    simulate.add_argument("--transitions", type=positive_int, help="Number of simulated transitions")
    simulate.add_argument("--seed", type=seed_value, help="Random seed")
    simulate.add_argument("--format", choices=formats, default="table")
    simulate.add_argument("--csv", help="Also write the comparison as CSV to this path")

    verify = subparsers.add_parser("verify", help="Check the product form against the brute-force oracle")
    verify.add_argument("scenario", help="Scenario JSON file")
    verify.add_argument("--format", choices=formats, default="table")

    sweep = subparsers.add_parser("sweep", help="Run a parameter sweep")
    sweep.add_argument("spec", help="Sweep JSON file")
    sweep.add_argument("--format", choices=formats, default="table")
    sweep.add_argument("--csv", help="Write the sweep CSV here instead of the file named in the spec")

    return parser


def dispatch(args: argparse.Namespace, console: Console) -> int:
    config = load_config(args.config)
    level = args.log_level or config.logging.level
    configure_logging(level, config.logging.format)
    fmt = OutputFormat(args.format)

    if args.command == "exact":
        return cmd_exact(args.scenario, config, fmt=fmt, csv_path=args.csv, console=console)
    if args.command == "simulate":
        return cmd_simulate(
            args.scenario,
            config,
            transitions=args.transitions,
            seed=args.seed,
            fmt=fmt,
            csv_path=args.csv,
            console=console,
        )
    if args.command == "verify":
        return cmd_verify(args.scenario, config, fmt=fmt, console=console)
    return cmd_sweep(args.spec, config, fmt=fmt, csv_path=args.csv, console=console)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line.

    Returns:
        int: Process exit code (0 success, 2 usage, 3 schema, 4 oracle scope,
            5 conditioning, 6 undefined metric or invalid parameter, 1 other)
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    console = Console()
    errors = Console(stderr=True)

    try:
        return dispatch(args, console)
    except ScenarioSchemaError as e:
        errors.print(f"[red]invalid input:[/red] {escape(str(e))}")
        return EXIT_SCHEMA
    except OracleScopeError as e:
        errors.print(f"[red]out of scope:[/red] {escape(str(e))}")
        return EXIT_SCOPE
    except ConditioningError as e:
        errors.print(f"[red]numerical conditioning:[/red] {escape(str(e))}")
        return EXIT_CONDITIONING
    except (UndefinedMetricError, InvalidParameterError) as e:
        errors.print(f"[red]error:[/red] {escape(str(e))}")
        return EXIT_UNDEFINED
    except MultiAccessError as e:
        errors.print(f"[red]error:[/red] {escape(str(e))}")
        return EXIT_FAILURE
    except Exception as e:
        logger.exception("unexpected_error", error=str(e))
        errors.print(f"[red]unexpected error:[/red] {escape(str(e))}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
