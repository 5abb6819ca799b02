"""Command implementations for the quasilie command line."""

from .base import BaseCommand, CommandParameters, CommandResult, CommandTimeoutError, InternalError
from .algebra import BracketCommand, CloseCommand, SchemeCommand
from .systems import CertifyCommand, DecomposeCommand, LiftCommand
from .numerics import IntegrateCommand, SampleCommand
from .superposition import SuperposeCommand, VerifyCommand
from .registry import CommandMetadata, CommandRegistrationError, CommandRegistry, create_registry

COMMAND_CLASSES = [
    BracketCommand,
    CloseCommand,
    SchemeCommand,
    LiftCommand,
    DecomposeCommand,
    CertifyCommand,
    IntegrateCommand,
    SampleCommand,
    SuperposeCommand,
    VerifyCommand,
]

__all__ = [
    'BaseCommand',
    'CommandParameters',
    'CommandResult',
    'CommandTimeoutError',
    'InternalError',
    'BracketCommand',
    'CloseCommand',
    'SchemeCommand',
    'LiftCommand',
    'DecomposeCommand',
    'CertifyCommand',
    'IntegrateCommand',
    'SampleCommand',
    'SuperposeCommand',
    'VerifyCommand',
    'CommandMetadata',
    'CommandRegistrationError',
    'CommandRegistry',
    'create_registry',
    'COMMAND_CLASSES',
]
