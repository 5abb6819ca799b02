"""
Base Command Implementation for quasilie

This module provides the base classes for all quasilie commands, ensuring
consistent parameter validation, timeouts, error handling and exit codes
across the command implementations.
"""

import argparse
import asyncio
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Optional, Type

from pydantic import BaseModel, ConfigDict, ValidationError

from ..config import AnalysisConfig
from ..errors import (
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_VERDICT_FALSE,
    ConfigurationError,
    NumericalError,
    QuasiLieError,
)
from ..logging_config import get_logger
from ..parsers.parser_factory import ParserFactory, get_default_factory
from ..reports import ErrorReport, Report


class CommandTimeoutError(NumericalError):
    code = "E_TIMEOUT"


class InternalError(NumericalError):
    """An unexpected exception escaped a command."""

    code = "E_INTERNAL"


class CommandParameters(BaseModel):
    """Base class of the validated parameters of a command."""

    model_config = ConfigDict(extra="forbid")


@dataclass
class CommandResult:
    """
    Standardized result structure for all commands.

    ``report`` is the structured report printed as JSON; ``text`` replaces it
    on stdout for commands whose natural output is text (a DSL field, a CSV
    trajectory). ``exit_code`` follows the command-line contract.
    """

    success: bool
    report: Optional[Report] = None
    text: Optional[str] = None
    exit_code: int = EXIT_OK
    error: Optional[QuasiLieError] = None

    @property
    def error_code(self) -> Optional[str]:
        return self.error.code if self.error is not None else None

    def output(self, prefer_report: bool = False) -> str:
        """Text written to stdout."""
        if self.text is not None and not prefer_report:
            return self.text
        if self.report is not None:
            return self.report.to_json() + "\n"
        return ""

    @classmethod
    def success_result(
        cls,
        report: Report,
        verdict: bool = True,
        text: Optional[str] = None,
        exit_code: Optional[int] = None,
    ) -> "CommandResult":
        """Create a success result; a false verdict maps to exit status 1."""
        if exit_code is None:
            exit_code = EXIT_OK if verdict else EXIT_VERDICT_FALSE
        return cls(success=True, report=report, text=text, exit_code=exit_code)

    @classmethod
    def error_result(cls, command: str, error: QuasiLieError) -> "CommandResult":
        """Create an error result carrying the error report."""
        return cls(
            success=False,
            report=ErrorReport.from_error(command, error),
            exit_code=error.exit_code,
            error=error,
        )


class BaseCommand(ABC):
    """
    Abstract base class for all quasilie commands.

    Subclasses declare their parameters as a pydantic model in ``Parameters``
    and describe the matching command-line flags in :meth:`configure_parser`.
    :meth:`execute` validates, runs under the configured timeout and turns
    every exception into a ``CommandResult``; it never raises.
    """

    Parameters: ClassVar[Type[CommandParameters]] = CommandParameters

    def __init__(
        self,
        config: Optional[AnalysisConfig] = None,
        parser_factory: Optional[ParserFactory] = None,
        logger=None,
        timeout_seconds: Optional[float] = None,
    ):
        self.config = config or AnalysisConfig()
        self.parser_factory = parser_factory or get_default_factory()
        self.logger = logger or get_logger(f"commands.{self.__class__.__name__}")
        self.timeout_seconds = timeout_seconds or self.config.command_timeout

        self.name = self.get_command_name()
        self.description = self.get_command_description()

    @abstractmethod
    def get_command_name(self) -> str:
        """Return the subcommand name."""

    @abstractmethod
    def get_command_description(self) -> str:
        """Return the one-line help text of the subcommand."""

    @abstractmethod
    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        """Add the subcommand's flags; destinations match ``Parameters`` fields."""

    @abstractmethod
    async def _execute_command(self, params: Any) -> CommandResult:
        """
        Run the command with validated parameters.

        Args:
            params: Instance of ``Parameters``

        Returns:
            CommandResult with the report

        Raises:
            QuasiLieError: Converted to an error result by :meth:`execute`
        """

    def get_parameter_schema(self) -> Dict[str, Any]:
        """Return the JSON schema for command parameters."""
        return self.Parameters.model_json_schema()

    def validate_parameters(self, params: Dict[str, Any]) -> CommandParameters:
        """
        Validate command parameters against the ``Parameters`` model.

        Raises:
            ConfigurationError: If parameter validation fails
        """
        try:
            return self.Parameters.model_validate(params)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in item['loc']) or 'parameters'}: {item['msg']}"
                for item in e.errors()
            )
            raise ConfigurationError(f"Invalid parameters for {self.name}: {problems}") from e

    async def execute(self, params: Optional[Dict[str, Any]] = None) -> CommandResult:
        """
        Validate the parameters and run the command under the timeout.

        Args:
            params: Command parameters dictionary

        Returns:
            CommandResult; errors are folded into it with their exit status
        """
        start_time = time.perf_counter()
        params = {k: v for k, v in (params or {}).items() if v is not None}

        try:
            validated = self.validate_parameters(params)
            result = await asyncio.wait_for(
                self._execute_command(validated), timeout=self.timeout_seconds
            )
        except QuasiLieError as e:
            level = "warning" if e.exit_code == EXIT_INPUT_ERROR else "error"
            getattr(self.logger, level)(f"Command {self.name} failed [{e.code}]: {e}")
            result = CommandResult.error_result(self.name, e)
        except asyncio.TimeoutError:
            error = CommandTimeoutError(
                f"Command {self.name} timed out after {self.timeout_seconds} seconds",
                timeout_seconds=self.timeout_seconds,
            )
            self.logger.error(str(error))
            result = CommandResult.error_result(self.name, error)
        except Exception as e:
            self.logger.error(f"Command {self.name} error: {e}", exc_info=True)
            result = CommandResult.error_result(
                self.name, InternalError(f"Command {self.name} failed: {e}")
            )

        execution_time_ms = (time.perf_counter() - start_time) * 1000
        if result.success:
            self.logger.debug(
                f"Command {self.name} finished in {execution_time_ms:.2f}ms "
                f"with exit code {result.exit_code}"
            )
        return result

    async def run_blocking(self, fn, *args, **kwargs):
        """Run CPU-bound work in a worker thread so the timeout can fire."""
        return await asyncio.to_thread(fn, *args, **kwargs)

