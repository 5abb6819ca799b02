"""
Main entry point for quasilie.

This module provides the command-line interface: global options, one
sub-command per registered command, and the exit-code contract

* 0 - success, or verdict true
* 1 - verdict false (not closed, not a scheme, no decomposition, ...)
* 2 - input error (bad flags, documents or fields)
* 3 - numerical failure (blow-up, non-generic solutions, timeouts)
"""

import argparse
import asyncio
import sys
from typing import Any, Dict, Optional, Sequence

from . import __version__
from .commands import CommandRegistry, create_registry
from .config import AnalysisConfig
from .errors import EXIT_INPUT_ERROR
from .logging_config import configure_logging, get_logger


GLOBAL_OPTIONS = ("command", "env_file", "log_level", "log_file", "seed", "debug", "json")


def build_parser(registry: CommandRegistry) -> argparse.ArgumentParser:
    """Build the argument parser with one sub-parser per command."""
    parser = argparse.ArgumentParser(
        description="quasilie - Lie systems, quasi-Lie schemes and superposition rules",
        prog="quasilie",
    )

    parser.add_argument(
        "--env-file",
        dest="env_file",
        type=str,
        help="Path to configuration file (.env format)",
    )

    parser.add_argument(
        "--log-level",
        dest="log_level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level (default: INFO, or QUASILIE_LOG_LEVEL)",
    )

    parser.add_argument(
        "--log-file",
        dest="log_file",
        type=str,
        help="Path to log file (optional)",
    )

    parser.add_argument(
        "--seed",
        type=int,
        help="Default random seed (overrides QUASILIE_SEED)",
    )

    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug mode",
    )

    parser.add_argument(
        "--json",
        action="store_true",
        help="Print the JSON report even for commands with text output",
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"quasilie {__version__}",
    )

    registry.add_subparsers(parser)
    return parser


def create_config_from_args(args: argparse.Namespace) -> AnalysisConfig:
    """Create the analysis configuration from the environment and the flags."""
    config = AnalysisConfig.from_env(args.env_file)

    if args.log_level:
        config.log_level = args.log_level.upper()

    if args.log_file:
        config.log_file = args.log_file

    if args.seed is not None:
        config.seed = args.seed

    if args.debug:
        config.debug_mode = True
        config.log_level = "DEBUG"

    return config


def command_arguments(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k not in GLOBAL_OPTIONS}


async def main_async(config: AnalysisConfig, command: str, arguments: Dict[str, Any], as_json: bool) -> int:
    """Run one command and write its output; returns the exit status."""
    registry = create_registry(config)
    result = await registry.execute_command(command, arguments)
    sys.stdout.write(result.output(prefer_report=as_json or not result.success))
    sys.stdout.flush()
    return result.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the quasilie command line."""
    parser = build_parser(create_registry())
    args = parser.parse_args(list(argv) if argv is not None else None)

    try:
        config = create_config_from_args(args)
        config.validate()
    except ValueError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    configure_logging(config)
    logger = get_logger("main")
    logger.debug(f"Running '{args.command}' with {config}")

    try:
        return asyncio.run(main_async(config, args.command, command_arguments(args), args.json))
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
