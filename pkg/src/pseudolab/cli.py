#!/usr/bin/env python3
"""
pseudolab CLI tool

Command line interface for running the controllability experiments
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import NoReturn

from pydantic import ValidationError

from pseudolab import __version__
from pseudolab.config import FAMILIES, ExperimentConfig, get_runtime_settings

EXIT_OK = 0
EXIT_INVALID_CONFIG = 1
EXIT_EXPERIMENT_FAILED = 2
EXIT_USAGE = 64


class _ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors on their own exit code, apart from family failures."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _get_version() -> str:
    """Installed pseudolab version, or the source-tree version when not installed."""
    try:
        return version("pseudolab")
    except PackageNotFoundError:
        return __version__


def _print_validation_error(exc: ValidationError) -> None:
    """Print one line per invalid field."""
    print(f"Error: invalid configuration ({exc.error_count()} problem(s))")
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<root>"
        print(f"  {location}: {error['msg']}")


def load_config(path: str | Path) -> ExperimentConfig | None:
    """Load and validate a configuration file.

    Prints the problem and returns None if the file is missing or invalid.
    """
    config_path = Path(path).expanduser()
    if not config_path.is_file():
        print(f"Error: configuration file not found: {config_path}")
        return None
    try:
        return ExperimentConfig.from_json_file(config_path)
    except ValidationError as exc:
        _print_validation_error(exc)
        return None


def _log_level(verbose: bool, quiet: bool) -> int | str:
    if verbose:
        return logging.DEBUG
    if quiet:
        return logging.WARNING
    return get_runtime_settings().log_level


def run_command(config_path: str, only: str | None = None, out: str | None = None, verbose: bool = False, quiet: bool = False) -> int:
    """Run experiments and return the process exit code.

    Args:
        config_path: JSON configuration file
        only: Run this family instead of the configured list
        out: Output directory overriding the configured one
        verbose: Log at DEBUG
        quiet: Log warnings and errors only

    Returns:
        0 on success, 1 on an invalid configuration, 2 if any family failed
    """
    from pseudolab.experiments import run_experiments
    from pseudolab.logger import set_level

    set_level(_log_level(verbose, quiet))
    config = load_config(config_path)
    if config is None:
        return EXIT_INVALID_CONFIG

    manifest = run_experiments(config, only=only, out=out)
    for family, message in manifest.failures.items():
        print(f"Error: {family} failed: {message}")
    if not manifest.ok:
        return EXIT_EXPERIMENT_FAILED
    print(f"Wrote {sum(len(files) for files in manifest.files.values())} file(s) to {manifest.output_dir}")
    return EXIT_OK


def config_command() -> int:
    """Print the default configuration as JSON."""
    print(ExperimentConfig().to_json())
    return EXIT_OK


def main(argv: list[str] | None = None) -> None:
    """
    CLI main entry point
    """
    parser = _ArgumentParser(description="pseudolab experiment runner. Run a subcommand to execute experiments or print a configuration.")
    parser.add_argument("--version", action="version", version=f"pseudolab {_get_version()}")
    subparsers = parser.add_subparsers(dest="command", required=True, help="Subcommands")

    run_parser = subparsers.add_parser("run", help="Run experiment families")
    run_parser.add_argument("--config", required=True, help="Path to the JSON configuration")
    run_parser.add_argument("--only", choices=FAMILIES, default=None, help="Run a single family (default: the configured list)")
    run_parser.add_argument("--out", default=None, help="Output directory (default: output_dir of the configuration)")
    verbosity = run_parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    verbosity.add_argument("--quiet", action="store_true", help="Log warnings and errors only")

    subparsers.add_parser("config", help="Print the default configuration as JSON")

    args = parser.parse_args(argv)

    if args.command == "run":
        exit_code = run_command(args.config, only=args.only, out=args.out, verbose=args.verbose, quiet=args.quiet)
    else:
        exit_code = config_command()
    if exit_code != EXIT_OK:
        sys.exit(exit_code)


if __name__ == "__main__":
    main()
