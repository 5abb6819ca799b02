"""
Field list documents for quasilie.

A field list holds one DSL field per line, optionally labelled, after an
optional ``variables:`` header (default ``x, v``)::

    # lift of x'' + 3 x x' + x^3 = f(t)
    variables: x, v
    X1 = v*d/dx - (3*x*v + x^3)*d/dv
    X2 = d/dv
"""

import re
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from ..algebra.field_space import FieldSpace
from ..algebra.polynomial import PolyVectorField
from ..errors import ParseError
from .base import DocumentParser, ParserResult
from .field_parser import DEFAULT_VARIABLES, format_field, parse_field


_LABEL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=")
_HEADER = re.compile(r"^\s*variables\s*:(.*)$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class FieldList:
    """Labelled fields over a shared variable list."""

    variables: Tuple[str, ...]
    names: Tuple[str, ...]
    fields: Tuple[PolyVectorField, ...]

    def space(self) -> FieldSpace:
        return FieldSpace.from_fields(list(self.fields))

    def to_text(self) -> str:
        lines = [f"variables: {', '.join(self.variables)}"]
        lines += [f"{name} = {format_field(f)}" for name, f in zip(self.names, self.fields)]
        return "\n".join(lines) + "\n"


def parse_variables(text: str, line: Optional[int] = None) -> Tuple[str, ...]:
    """Parse a comma or space separated variable list."""
    names = tuple(n for n in re.split(r"[,\s]+", text.strip()) if n)
    if not names:
        raise ParseError("Empty variable list", line=line, column=1)
    for name in names:
        if not _NAME.match(name) or name == "t":
            raise ParseError(f"Invalid variable name '{name}'", line=line, column=1)
    if len(set(names)) != len(names):
        raise ParseError(f"Duplicate variable names in {list(names)}", line=line, column=1)
    return names


def parse_field_list(content: str, variables: Optional[Tuple[str, ...]] = None) -> FieldList:
    """
    Parse the text of a field list.

    Raises:
        ParseError: With the line and column inside the document
    """
    variables = tuple(variables) if variables else None
    names: List[str] = []
    fields: List[PolyVectorField] = []
    for number, raw in enumerate(content.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        header = _HEADER.match(line)
        if header:
            if fields or variables is not None:
                raise ParseError("variables: must come before the fields", line=number, column=1)
            variables = parse_variables(header.group(1), number)
            continue
        if variables is None:
            variables = DEFAULT_VARIABLES

        offset = 0
        label = _LABEL.match(line)
        if label:
            offset = label.end()
            name = label.group(1)
        else:
            name = f"F{len(fields) + 1}"
        try:
            fields.append(parse_field(line[offset:], variables))
        except ParseError as e:
            e.line = number
            e.column = (e.column or 1) + offset
            e.details.update(line=e.line, column=e.column)
            raise
        names.append(name)

    if not fields:
        raise ParseError("Field list contains no fields", line=1, column=1)
    return FieldList(variables or DEFAULT_VARIABLES, tuple(names), tuple(fields))


class FieldListParser(DocumentParser):
    """Parser for ``.fields`` documents."""

    def get_supported_extensions(self) -> Set[str]:
        return {".fields", ".vf", ".txt"}

    async def parse_content(self, content: str, file_path: Optional[str] = None) -> ParserResult:
        field_list = parse_field_list(content)
        return ParserResult(
            document=field_list,
            metadata={
                "variables": list(field_list.variables),
                "field_count": len(field_list.fields),
            },
        )
