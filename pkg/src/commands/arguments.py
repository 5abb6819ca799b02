"""Parsing of command-line values (lists, spans, scalings) for quasilie commands."""

from typing import Dict, List, Optional, Sequence, Tuple

from ..config import parse_span
from ..errors import ConfigurationError, ParseError
from ..systems.families import Riccati2Spec
from ..systems.time_expr import time_expr
from ..systems.transform import ScalingTransform


def split_top_level(text: str, separators: str = ",;") -> List[str]:
    """Split on separators that are not inside parentheses."""
    parts, depth, current = [], 0, []
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char in separators and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    parts.append("".join(current).strip())
    return [p for p in parts if p]


def parse_float_list(text: str, name: str, length: Optional[int] = None) -> List[float]:
    """
    Parse ``"1, -0.5, 2e-3"`` into floats.

    Raises:
        ConfigurationError: If an item is not a number or the length is wrong
    """
    try:
        values = [float(item) for item in split_top_level(text)]
    except ValueError as e:
        raise ConfigurationError(f"--{name}: {e}") from e
    if not values:
        raise ConfigurationError(f"--{name} needs at least one number")
    if length is not None and len(values) != length:
        raise ConfigurationError(f"--{name} needs {length} numbers, got {len(values)}")
    return values


def parse_window(text: str, name: str = "span") -> Tuple[float, float]:
    """
    Parse an ``a:b`` span.

    Raises:
        ConfigurationError: If the span is malformed or empty
    """
    try:
        return parse_span(text)
    except ValueError as e:
        raise ConfigurationError(f"--{name}: {e}") from e


def parse_paths(text: str, name: str, count: Optional[int] = None) -> List[str]:
    paths = [p for p in (item.strip() for item in text.split(",")) if p]
    if count is not None and len(paths) != count:
        raise ConfigurationError(f"--{name} needs {count} comma-separated files, got {len(paths)}")
    return paths


def parse_scaling(
    text: str,
    variables: Sequence[str],
    riccati: Optional[Riccati2Spec] = None,
) -> ScalingTransform:
    """
    Parse a ``--transform`` value into a diagonal scaling.

    Accepted forms:

    * ``riccati2`` - the velocity scaling vbar = a3^(-1/2) v of the system's
      riccati2 block;
    * ``v=exp(-t/2)`` items (unlisted variables keep factor 1);
    * one factor per variable, ``1, exp(-t/2)``.

    Raises:
        ConfigurationError: If the text does not fit the variables
        ParseError: If a factor is not a valid time expression
    """
    text = text.strip()
    if text == "riccati2":
        if riccati is None:
            raise ConfigurationError("--transform riccati2 needs a system in riccati2 form")
        return ScalingTransform.velocity_scaling(riccati.a3, variables)

    items = split_top_level(text)
    if not items:
        raise ConfigurationError("--transform is empty")
    named = all("=" in item for item in items)
    if named:
        factors: Dict[str, str] = {}
        for item in items:
            name, expr = (part.strip() for part in item.split("=", 1))
            if name not in variables:
                raise ConfigurationError(
                    f"--transform names unknown variable '{name}'; variables are {list(variables)}"
                )
            factors[name] = expr
        values = [factors.get(name, "1") for name in variables]
    else:
        if len(items) != len(variables):
            raise ConfigurationError(
                f"--transform needs {len(variables)} factors for {list(variables)}, got {len(items)}"
            )
        values = items

    try:
        return ScalingTransform.of(variables, [time_expr(v) for v in values])
    except ParseError:
        raise
    except Exception as e:
        raise ParseError(f"--transform: cannot parse {text!r}: {e}") from e


def describe_scaling(transform: ScalingTransform) -> Dict[str, str]:
    return {name: str(g) for name, g in zip(transform.variables, transform.factors)}
