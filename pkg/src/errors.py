"""
Exception hierarchy for quasilie.

Every error carries a stable ``code`` used in command reports and an
``exit_code`` used by the command-line entry point:

* 2 - input errors (malformed fields, mismatched variables, bad documents)
* 3 - numerical failures (domain errors, poles, non-generic solution sets)
"""

from typing import Any, Dict, Optional, Sequence


EXIT_OK = 0
EXIT_VERDICT_FALSE = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


class QuasiLieError(Exception):
    """Base exception for all quasilie errors."""

    code = "E_GENERIC"
    exit_code = EXIT_INPUT_ERROR

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary for report serialization."""
        return {
            "code": self.code,
            "message": self.message,
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


class InputError(QuasiLieError):
    """Errors caused by invalid user input."""


class NumericalError(QuasiLieError):
    """Errors raised by numerical evaluation or integration."""

    code = "E_NUMERICAL"
    exit_code = EXIT_NUMERICAL_ERROR


class VariableMismatchError(InputError):
    """Raised when two objects are defined over different variable lists."""

    code = "E_VARIABLES"

    def __init__(self, left: Sequence[str], right: Sequence[str]):
        super().__init__(
            f"Variable lists differ: {list(left)} vs {list(right)}",
            left=list(left),
            right=list(right),
        )


class LengthMismatchError(InputError):
    code = "E_LENGTH"


class DegreeLimitError(InputError):
    code = "E_DEGREE"


class CatalogError(InputError):
    code = "E_CATALOG"


class SchemeError(InputError):
    code = "E_SCHEME"


class BasisError(InputError):
    """Raised when basis fields are linearly dependent."""

    code = "E_BASIS"


class ConstraintViolationError(InputError):
    """Raised when Riccati-type coefficient constraints do not hold."""

    code = "E_CONSTRAINT"


class FamilyMismatchError(InputError):
    code = "E_FAMILY"


class ConfigurationError(InputError):
    code = "E_CONFIG"


class UnboundParameterError(InputError):
    """Raised when a symbolic parameter function must be evaluated numerically."""

    code = "E_UNBOUND"


class ParseError(InputError):
    """Raised when DSL or document parsing fails."""

    code = "E_PARSE"

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        source: Optional[str] = None,
    ):
        super().__init__(message, line=line, column=column, source=source)
        self.line = line
        self.column = column
        self.source = source

    def __str__(self) -> str:
        if self.line is not None and self.column is not None:
            return f"{self.message} (line {self.line}, column {self.column})"
        return self.message


class UnknownIdentifierError(ParseError):
    code = "E_IDENTIFIER"


class TimeDomainError(NumericalError):
    """Raised when a time expression is evaluated outside its domain."""

    code = "E_DOMAIN"

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message, t=t)
        self.t = t


class OutOfRangeError(NumericalError):
    code = "E_RANGE"


class BlowUpError(NumericalError):
    """Raised when an operation needs a pole-free trajectory and gets a pole."""

    code = "E_BLOWUP"

    def __init__(self, message: str, t_event: Optional[float] = None):
        super().__init__(message, t_event=t_event)
        self.t_event = t_event


class NonGenericError(NumericalError):
    """Raised when a set of particular solutions is not generic."""

    code = "E_NONGENERIC"

    def __init__(self, message: str, determinant: Optional[float] = None):
        super().__init__(message, determinant=determinant)
        self.determinant = determinant


class IntegrationError(NumericalError):
    code = "E_INTEGRATION"


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)
