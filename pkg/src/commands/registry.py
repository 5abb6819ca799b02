"""
Command registry for quasilie.

This module manages registration, discovery and execution of commands. The
entry point builds its argparse sub-parsers from the registry, so every
registered command is reachable from the command line.
"""

import argparse
from typing import Any, Dict, Iterator, List, Optional, Type

from pydantic import BaseModel, ConfigDict

from ..config import AnalysisConfig
from ..errors import ConfigurationError
from ..logging_config import get_logger
from .base import BaseCommand, CommandResult


class CommandRegistrationError(Exception):
    """Exception raised when command registration fails."""


class CommandMetadata(BaseModel):
    """Metadata for a registered command."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    description: str
    command: BaseCommand


class CommandRegistry:
    """
    Registry of the available commands.

    Commands are kept in registration order, which is also the order of the
    sub-commands in ``--help``.
    """

    def __init__(self):
        self.logger = get_logger(__name__)
        self._commands: Dict[str, CommandMetadata] = {}

    def register_command(self, command: BaseCommand) -> None:
        """
        Register a command instance under its name.

        Raises:
            CommandRegistrationError: If the name is empty or already taken
        """
        name = command.get_command_name()
        if not name or not isinstance(name, str):
            raise CommandRegistrationError("Command name must be a non-empty string")
        if name in self._commands:
            raise CommandRegistrationError(f"Command '{name}' is already registered")

        self._commands[name] = CommandMetadata(
            name=name,
            description=command.get_command_description(),
            command=command,
        )
        self.logger.debug(f"Command '{name}' registered")

    def unregister_command(self, name: str) -> bool:
        if name in self._commands:
            del self._commands[name]
            return True
        self.logger.warning(f"Attempted to unregister unknown command '{name}'")
        return False

    def has_command(self, name: str) -> bool:
        return name in self._commands

    def get_command(self, name: str) -> Optional[BaseCommand]:
        metadata = self._commands.get(name)
        return metadata.command if metadata else None

    def get_command_names(self) -> List[str]:
        return list(self._commands)

    def add_subparsers(self, parser: argparse.ArgumentParser) -> None:
        """Add one sub-parser per registered command to ``parser``."""
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        subparsers.required = True
        for metadata in self._commands.values():
            sub = subparsers.add_parser(
                metadata.name, help=metadata.description, description=metadata.description
            )
            metadata.command.configure_parser(sub)

    async def execute_command(
        self, name: str, arguments: Optional[Dict[str, Any]] = None
    ) -> CommandResult:
        """
        Execute a registered command.

        Unknown names produce an error result (input error) rather than raising.
        """
        command = self.get_command(name)
        if command is None:
            error = ConfigurationError(
                f"Unknown command '{name}'; available: {', '.join(self._commands)}"
            )
            return CommandResult.error_result(name, error)
        self.logger.debug(f"Executing command '{name}'")
        return await command.execute(arguments)

    def __len__(self) -> int:
        return len(self._commands)

    def __contains__(self, name: str) -> bool:
        return name in self._commands

    def __iter__(self) -> Iterator[str]:
        return iter(self._commands)


def create_registry(
    config: Optional[AnalysisConfig] = None,
    command_classes: Optional[List[Type[BaseCommand]]] = None,
) -> CommandRegistry:
    """Build a registry holding one instance of every command class."""
    from . import COMMAND_CLASSES

    config = config or AnalysisConfig()
    registry = CommandRegistry()
    for command_class in command_classes or COMMAND_CLASSES:
        registry.register_command(command_class(config=config))
    return registry
