"""
System documents for quasilie.

A system document is a YAML (or JSON) mapping describing one time-dependent
system in exactly one of four forms::

    format_version: 1
    variables: [x, v]
    fields:                      # sum of coefficient(t) * field
      - field: v*d/dx - (3*x*v + x^3)*d/dv
      - {coefficient: "f(t)", field: d/dv}
    functions: {f: "sin(t)"}     # optional bindings of parameter functions
    interval: [0, 2]

or ``sode: {x: "f(t) - 3*x*v - x^3"}`` with ``positions``/``velocities``,
``ghj: {g: "1", h: "t", j: "cos(t)"}``, or
``riccati2: {a0: "1", a1: "0", a2: "t", a3: "exp(t)"}``.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Set, Tuple, Union

import sympy
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..algebra.polynomial import state_symbols
from ..errors import FamilyMismatchError, ParseError, UnknownIdentifierError
from ..systems.families import GHJFamily, Riccati2Spec, match_ghj, riccati2
from ..systems.tdvf import SODE, TDVF, lift_sode
from ..systems.time_expr import DEFAULT_INTERVAL, T, TimeExpr, time_expr
from .base import DocumentParser, ParserResult
from .field_list_parser import parse_variables
from .field_parser import parse_field


FORMAT_VERSION = 1

Expression = Union[str, int]


class TermSpec(BaseModel):
    """One ``coefficient(t) * field`` term."""

    model_config = ConfigDict(extra="forbid")

    coefficient: Expression = "1"
    field: str


class GHJBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    g: Expression = "0"
    h: Expression = "0"
    j: Expression = "0"


class Riccati2Block(BaseModel):
    """a-coefficients of the second-order Riccati equation; b0, b1 are derived when absent."""

    model_config = ConfigDict(extra="forbid")

    a0: Expression = "0"
    a1: Expression = "0"
    a2: Expression = "0"
    a3: Expression = "1"
    b0: Optional[Expression] = None
    b1: Optional[Expression] = None


class SystemSpec(BaseModel):
    """Validated contents of a system document."""

    model_config = ConfigDict(extra="forbid")

    format_version: int = FORMAT_VERSION
    name: Optional[str] = None
    variables: Optional[List[str]] = None
    positions: Optional[List[str]] = None
    velocities: Optional[List[str]] = None

    fields: Optional[List[Union[str, TermSpec]]] = None
    sode: Optional[Dict[str, Expression]] = None
    ghj: Optional[GHJBlock] = None
    riccati2: Optional[Riccati2Block] = None

    functions: Dict[str, Expression] = Field(default_factory=dict)
    interval: Optional[Tuple[float, float]] = None
    rtol: Optional[float] = Field(default=None, gt=0)
    atol: Optional[float] = Field(default=None, gt=0)
    max_step: Optional[float] = Field(default=None, gt=0)
    seed: Optional[int] = None

    @field_validator("format_version")
    @classmethod
    def _known_version(cls, value: int) -> int:
        if value != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {value}")
        return value

    @field_validator("interval")
    @classmethod
    def _ordered_interval(cls, value):
        if value is not None and not value[0] < value[1]:
            raise ValueError(f"interval start must be below its end: {list(value)}")
        return value

    @model_validator(mode="after")
    def _exactly_one_form(self) -> "SystemSpec":
        forms = [name for name in ("fields", "sode", "ghj", "riccati2") if getattr(self, name) is not None]
        if len(forms) != 1:
            raise ValueError(
                f"exactly one of fields, sode, ghj, riccati2 is required; got {forms or 'none'}"
            )
        return self

    @property
    def form(self) -> str:
        return next(name for name in ("fields", "sode", "ghj", "riccati2") if getattr(self, name) is not None)


@dataclass(frozen=True)
class LoadedSystem:
    """
    A system document turned into domain objects.

    ``tdvf`` is always present (the lift for second-order forms); ``sode``
    is present for the second-order forms; ``family`` when the system belongs
    to the g, h, j family; ``riccati`` for the riccati2 form.
    """

    spec: SystemSpec
    variables: Tuple[str, ...]
    tdvf: TDVF
    sode: Optional[SODE] = None
    family: Optional[GHJFamily] = None
    riccati: Optional[Riccati2Spec] = None

    @property
    def interval(self) -> Tuple[float, float]:
        return tuple(self.spec.interval) if self.spec.interval else DEFAULT_INTERVAL

    def require_family(self) -> GHJFamily:
        if self.family is None:
            raise FamilyMismatchError(
                f"System in '{self.spec.form}' form is not a member of the g,h,j family"
            )
        return self.family


def _time(value: Expression, where: str) -> TimeExpr:
    try:
        return time_expr(str(value))
    except ParseError as e:
        raise ParseError(f"{where}: {e.message}") from e
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ParseError(f"{where}: cannot parse {value!r}") from e


def _bindings(spec: SystemSpec) -> Dict[str, TimeExpr]:
    return {name: _time(value, f"functions.{name}") for name, value in spec.functions.items()}


def parse_state_expression(text: Expression, variables: Tuple[str, ...], where: str) -> sympy.Expr:
    """
    Parse a right-hand side in t, parameter functions and the state variables.

    Raises:
        UnknownIdentifierError: If a name is neither ``t`` nor a state variable
        ParseError: If the text is not an expression
    """
    symbols = state_symbols(variables)
    local: Mapping[str, object] = {"t": T, **dict(zip(variables, symbols))}
    try:
        expr = sympy.sympify(str(text), locals=dict(local))
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ParseError(f"{where}: cannot parse {text!r}") from e
    unknown = expr.free_symbols - set(symbols) - {T}
    if unknown:
        names = sorted(str(s) for s in unknown)
        raise UnknownIdentifierError(f"{where}: unknown identifiers {names}; variables are {list(variables)}")
    return expr


def _second_order_names(spec: SystemSpec) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    positions = tuple(spec.positions) if spec.positions else None
    velocities = tuple(spec.velocities) if spec.velocities else None
    if positions is None and spec.sode:
        positions = tuple(spec.sode)
    if positions is None:
        positions = ("x",)
    if velocities is None:
        if spec.variables and len(spec.variables) == 2 * len(positions):
            velocities = tuple(spec.variables[len(positions):])
        elif positions == ("x",):
            velocities = ("v",)
        else:
            velocities = tuple(f"{p}_dot" for p in positions)
    parse_variables(" ".join(positions + velocities))
    return positions, velocities


def build_system(spec: SystemSpec) -> LoadedSystem:
    """
    Turn a validated SystemSpec into a LoadedSystem.

    Raises:
        ParseError: If an expression or field cannot be parsed
        UnknownIdentifierError: If an expression uses undeclared names
        ConstraintViolationError: If riccati2 coefficients break the constraints
    """
    bindings = _bindings(spec)
    interval = tuple(spec.interval) if spec.interval else DEFAULT_INTERVAL

    if spec.fields is not None:
        variables = parse_variables(" ".join(spec.variables or ["x", "v"]))
        terms = []
        for k, item in enumerate(spec.fields):
            term = TermSpec(field=item) if isinstance(item, str) else item
            coeff = _time(term.coefficient, f"fields[{k}].coefficient")
            try:
                vf = parse_field(term.field, variables)
            except ParseError as e:
                e.message = f"fields[{k}]: {e.message}"
                raise
            terms.append((coeff, vf))
        tdvf = TDVF.from_terms(variables, terms).bind(bindings)
        return LoadedSystem(spec, variables, tdvf)

    positions, velocities = _second_order_names(spec)
    variables = positions + velocities
    family: Optional[GHJFamily] = None
    riccati: Optional[Riccati2Spec] = None

    if spec.sode is not None:
        missing = set(positions) - set(spec.sode)
        if missing or set(spec.sode) - set(positions):
            raise ParseError(
                f"sode must give one right-hand side per position {list(positions)}, got {list(spec.sode)}"
            )
        exprs = [parse_state_expression(spec.sode[p], variables, f"sode.{p}") for p in positions]
        sode = SODE.from_expressions(positions, velocities, exprs).bind(bindings)
        if positions == ("x",) and velocities == ("v",):
            try:
                family = match_ghj(sode, interval)
            except FamilyMismatchError:
                family = None
    elif spec.ghj is not None:
        if variables != ("x", "v"):
            raise ParseError("The ghj form is defined over positions [x] and velocities [v]")
        block = spec.ghj
        family = GHJFamily(
            _time(block.g, "ghj.g"), _time(block.h, "ghj.h"), _time(block.j, "ghj.j")
        ).bind(bindings)
        sode = family.sode()
    else:
        if variables != ("x", "v"):
            raise ParseError("The riccati2 form is defined over positions [x] and velocities [v]")
        block = spec.riccati2
        riccati = Riccati2Spec.from_coefficients(
            *(_time(getattr(block, name), f"riccati2.{name}") for name in ("a0", "a1", "a2", "a3"))
        )
        if block.b0 is not None or block.b1 is not None:
            riccati = Riccati2Spec(
                riccati.a0, riccati.a1, riccati.a2, riccati.a3,
                _time(block.b0, "riccati2.b0") if block.b0 is not None else riccati.b0,
                _time(block.b1, "riccati2.b1") if block.b1 is not None else riccati.b1,
            )
        riccati = riccati.bind(bindings)
        sode = riccati2(riccati, validate=True, interval=interval)

    return LoadedSystem(spec, variables, lift_sode(sode), sode, family, riccati)


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "document"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_system_document(content: str, source: Optional[str] = None) -> LoadedSystem:
    """
    Parse the text of a system document.

    Raises:
        ParseError: On YAML syntax or schema errors (with line and column for YAML)
    """
    try:
        data = yaml.safe_load(content)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ParseError(
            f"Invalid YAML: {getattr(e, 'problem', None) or e}",
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
            source=source,
        ) from e
    if not isinstance(data, dict):
        raise ParseError("A system document must be a mapping", line=1, column=1, source=source)
    try:
        spec = SystemSpec.model_validate(data)
    except ValidationError as e:
        raise ParseError(f"Invalid system document: {_validation_message(e)}", source=source) from e
    return build_system(spec)


class SystemDocumentParser(DocumentParser):
    """Parser for YAML and JSON system documents."""

    def get_supported_extensions(self) -> Set[str]:
        return {".yaml", ".yml", ".json"}

    async def parse_content(self, content: str, file_path: Optional[str] = None) -> ParserResult:
        system = parse_system_document(content, file_path)
        parameters: List[str] = system.tdvf.parameter_functions()
        return ParserResult(
            document=system,
            metadata={
                "form": system.spec.form,
                "variables": list(system.variables),
                "unbound_functions": sorted(parameters),
                "family": system.family is not None,
            },
        )
