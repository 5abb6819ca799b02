"""
Vector-field DSL for quasilie.

Fields are written as sums of polynomial multiples of coordinate fields:

    v*d/dx - (3*x*v + x^3)*d/dv

Polynomial arithmetic supports +, -, *, division by rational constants,
non-negative integer powers with ``^`` and parentheses. Rational literals use
``p/q``; floating-point literals are rejected. ``0`` is the zero field.
``format_field`` prints the canonical form that parses back to an equal field.
"""

from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from ..algebra.polynomial import MAX_INPUT_DEGREE, Polynomial, PolyVectorField
from ..errors import DegreeLimitError, ParseError, QuasiLieError, UnknownIdentifierError
from ..logging_config import get_logger


logger = get_logger(__name__)

DEFAULT_VARIABLES: Tuple[str, ...] = ("x", "v")

FIELD_GRAMMAR = r"""
?start: sum

?sum: product
    | "-" product        -> neg
    | sum "+" product    -> add
    | sum "-" product    -> sub

?product: power
    | product "*" power  -> mul
    | product "/" power  -> div

?power: atom
    | atom "^" exponent  -> pow

?exponent: atom
    | "-" atom           -> neg

?atom: INT               -> number
    | FLOAT              -> float_literal
    | DERIV              -> partial
    | NAME               -> name
    | "(" sum ")"

DERIV.2: /d\/d[A-Za-z_][A-Za-z0-9_]*/
FLOAT.2: /[0-9]+\.[0-9]*([eE][+-]?[0-9]+)?/ | /[0-9]+[eE][+-]?[0-9]+/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
INT: /[0-9]+/

%import common.WS
%ignore WS
"""

Value = Union[Polynomial, PolyVectorField]


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(FIELD_GRAMMAR, parser="lalr", propagate_positions=True)


def _position(meta) -> Tuple[Optional[int], Optional[int]]:
    if meta is None or getattr(meta, "empty", True):
        return None, None
    return meta.line, meta.column


class _FieldBuilder(Transformer):
    """Evaluates the parse tree to a Polynomial or a PolyVectorField."""

    def __init__(self, variables: Tuple[str, ...]):
        super().__init__()
        self.variables = variables

    def _zero_field(self) -> PolyVectorField:
        return PolyVectorField.zero(self.variables)

    def number(self, children) -> Polynomial:
        return Polynomial.constant(self.variables, int(children[0]))

    def float_literal(self, children):
        token: Token = children[0]
        raise ParseError(
            f"Floating-point literal {token} is not allowed in fields; use p/q",
            line=token.line,
            column=token.column,
        )

    def name(self, children) -> Polynomial:
        token: Token = children[0]
        if str(token) not in self.variables:
            raise UnknownIdentifierError(
                f"Unknown identifier '{token}'; variables are {list(self.variables)}",
                line=token.line,
                column=token.column,
            )
        return Polynomial.variable(self.variables, str(token))

    def partial(self, children) -> PolyVectorField:
        token: Token = children[0]
        target = str(token)[3:]
        if target not in self.variables:
            raise UnknownIdentifierError(
                f"Unknown identifier '{target}' in {token}; variables are {list(self.variables)}",
                line=token.line,
                column=token.column + 3,
            )
        return PolyVectorField.partial(self.variables, target)

    def neg(self, children) -> Value:
        return -children[0]

    def _combine(self, left: Value, right: Value, meta) -> Tuple[Value, Value]:
        if isinstance(left, PolyVectorField) == isinstance(right, PolyVectorField):
            return left, right
        # a zero polynomial is also the zero field
        if isinstance(left, Polynomial) and left.is_zero():
            return self._zero_field(), right
        if isinstance(right, Polynomial) and right.is_zero():
            return left, self._zero_field()
        line, column = _position(meta)
        raise ParseError(
            "Cannot add a polynomial and a vector field; multiply by d/d<var>",
            line=line,
            column=column,
        )

    @v_args(meta=True)
    def add(self, meta, children) -> Value:
        left, right = self._combine(children[0], children[1], meta)
        return left + right

    @v_args(meta=True)
    def sub(self, meta, children) -> Value:
        left, right = self._combine(children[0], children[1], meta)
        return left - right

    @v_args(meta=True)
    def mul(self, meta, children) -> Value:
        left, right = children
        if isinstance(left, PolyVectorField) and isinstance(right, PolyVectorField):
            line, column = _position(meta)
            raise ParseError("Cannot multiply two vector fields", line=line, column=column)
        if isinstance(left, PolyVectorField):
            return left * right
        if isinstance(right, PolyVectorField):
            return right * left
        return left * right

    @v_args(meta=True)
    def div(self, meta, children) -> Value:
        left, right = children
        line, column = _position(meta)
        if isinstance(right, PolyVectorField) or not right.is_constant():
            raise ParseError("Division is only allowed by rational constants", line=line, column=column)
        if right.is_zero():
            raise ParseError("Division by zero", line=line, column=column)
        return left * (1 / right.coefficient((0,) * len(self.variables)))

    @v_args(meta=True)
    def pow(self, meta, children) -> Polynomial:
        base, exponent = children
        line, column = _position(meta)
        if isinstance(base, PolyVectorField):
            raise ParseError("Vector fields cannot be raised to a power", line=line, column=column)
        if isinstance(exponent, PolyVectorField) or not exponent.is_constant():
            raise ParseError("Exponent must be a non-negative integer", line=line, column=column)
        value = exponent.coefficient((0,) * len(self.variables))
        if value.denominator != 1 or value < 0:
            raise ParseError(
                f"Exponent must be a non-negative integer, got {value}", line=line, column=column
            )
        if not base.is_constant() and value > MAX_INPUT_DEGREE:
            raise DegreeLimitError(
                f"Power {value} exceeds the input degree limit {MAX_INPUT_DEGREE}",
                line=line,
                column=column,
            )
        return base ** int(value)


def _end_position(src: str) -> Tuple[int, int]:
    lines = src.split("\n")
    return len(lines), len(lines[-1]) + 1


def _evaluate(src: str, variables: Sequence[str]) -> Value:
    variables = tuple(variables)
    try:
        tree = _parser().parse(src)
    except UnexpectedEOF:
        line, column = _end_position(src)
        raise ParseError("Unexpected end of input", line=line, column=column) from None
    except UnexpectedInput as e:
        line, column = e.line, e.column
        if line is None or line < 1:
            line, column = _end_position(src)
        found = getattr(e, "token", None) or getattr(e, "char", None)
        detail = f" near {str(found)!r}" if found is not None else ""
        raise ParseError(f"Syntax error{detail}", line=line, column=column) from None
    try:
        return _FieldBuilder(variables).transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, QuasiLieError):
            raise e.orig_exc from None
        raise


def parse_field(src: str, variables: Sequence[str] = DEFAULT_VARIABLES) -> PolyVectorField:
    """
    Parse a vector field in the DSL.

    Args:
        src: Field text, e.g. ``2*x*d/dx + 4*v*d/dv``
        variables: Declared variable names in order

    Returns:
        The field with exact rational coefficients

    Raises:
        ParseError: On syntax errors, floats or non-integer exponents
        UnknownIdentifierError: If a name is not a declared variable
        DegreeLimitError: If a component exceeds the input degree limit
    """
    value = _evaluate(src, variables)
    if isinstance(value, Polynomial):
        if not value.is_zero():
            raise ParseError(f"Expected a vector field, got the polynomial {format_polynomial(value)}")
        value = PolyVectorField.zero(tuple(variables))
    if value.degree > MAX_INPUT_DEGREE:
        raise DegreeLimitError(
            f"Field degree {value.degree} exceeds the input limit {MAX_INPUT_DEGREE}"
        )
    return value


def parse_polynomial(src: str, variables: Sequence[str] = DEFAULT_VARIABLES) -> Polynomial:
    """Parse a polynomial in the DSL (no ``d/d`` terms)."""
    value = _evaluate(src, variables)
    if isinstance(value, PolyVectorField):
        raise ParseError("Expected a polynomial, got a vector field")
    return value


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _format_monomial(variables: Sequence[str], exponent: Sequence[int]) -> str:
    factors = []
    for name, power in zip(variables, exponent):
        if power == 1:
            factors.append(name)
        elif power > 1:
            factors.append(f"{name}^{power}")
    return "*".join(factors)


def _format_unsigned_term(variables: Sequence[str], exponent, magnitude: Fraction) -> str:
    monomial = _format_monomial(variables, exponent)
    if not monomial:
        return _format_rational(magnitude)
    if magnitude == 1:
        return monomial
    return f"{_format_rational(magnitude)}*{monomial}"


def format_polynomial(p: Polynomial) -> str:
    """Canonical text of a polynomial, terms in descending lex order."""
    terms = sorted(p.terms.items(), reverse=True)
    if not terms:
        return "0"
    parts = []
    for k, (exponent, coeff) in enumerate(terms):
        text = _format_unsigned_term(p.variables, exponent, abs(coeff))
        if k == 0:
            parts.append(f"-{text}" if coeff < 0 else text)
        else:
            parts.append(f" - {text}" if coeff < 0 else f" + {text}")
    return "".join(parts)


def _format_component(p: Polynomial, name: str) -> Tuple[bool, str]:
    """(negative, text) of one ``P*d/d<name>`` term."""
    terms = p.terms
    if len(terms) == 1:
        ((exponent, coeff),) = terms.items()
        if _format_monomial(p.variables, exponent) == "" and abs(coeff) == 1:
            return coeff < 0, f"d/d{name}"
        return coeff < 0, f"{_format_unsigned_term(p.variables, exponent, abs(coeff))}*d/d{name}"
    return False, f"({format_polynomial(p)})*d/d{name}"


def format_field(field: PolyVectorField) -> str:
    """
    Canonical DSL text of a field; the zero field prints as ``0``.

    ``parse_field(format_field(X), X.variables) == X`` for every field.
    """
    parts = []
    for name, component in zip(field.variables, field.components):
        if component.is_zero():
            continue
        negative, text = _format_component(component, name)
        if not parts:
            parts.append(f"-{text}" if negative else text)
        else:
            parts.append(f" - {text}" if negative else f" + {text}")
    return "".join(parts) or "0"
