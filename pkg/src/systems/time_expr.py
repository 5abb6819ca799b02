"""
Scalar functions of time for quasilie.

A ``TimeExpr`` is a sympy expression in the real symbol ``t`` built from
rational constants, +, -, *, /, integer powers, square roots, exp, sin and
cos. Symbolic parameter functions such as ``f(t)`` are allowed so that
decompositions can be stated for arbitrary coefficients; they must be bound
before numerical evaluation.
"""

import math
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence, Set, Tuple, Union

import numpy as np
import sympy
from sympy.core.function import AppliedUndef

from ..errors import ParseError, TimeDomainError, UnboundParameterError


T = sympy.Symbol("t", real=True)

TimeExpr = sympy.Expr
TimeLike = Union[TimeExpr, int, str]

DEFAULT_INTERVAL: Tuple[float, float] = (0.0, 2.0)
DEFAULT_SAMPLE_COUNT = 257
DEFAULT_SAMPLE_TOLERANCE = 1e-12

_ALLOWED_FUNCTIONS = (sympy.exp, sympy.sin, sympy.cos)


def time_function(name: str) -> TimeExpr:
    """A symbolic parameter function ``name(t)``."""
    return sympy.Function(name)(T)


def time_expr(value: TimeLike) -> TimeExpr:
    """
    Convert a value to a validated TimeExpr.

    Strings are parsed with ``t`` bound to the real time symbol.

    Raises:
        ParseError: If the expression uses unsupported nodes or floats
    """
    if isinstance(value, str):
        expr = sympy.sympify(value, locals={"t": T})
    else:
        expr = sympy.sympify(value)
    validate_time_expr(expr)
    return expr


def validate_time_expr(expr: sympy.Expr) -> None:
    """Check that ``expr`` only uses the supported node types."""
    for node in sympy.preorder_traversal(expr):
        if isinstance(node, sympy.Float):
            raise ParseError(f"Float literal {node} is not exact; use p/q rationals")
        if isinstance(node, sympy.Symbol):
            if node != T:
                raise ParseError(f"Unknown symbol '{node}' in time expression")
        elif isinstance(node, (sympy.Rational, sympy.NumberSymbol)):
            continue
        elif isinstance(node, (sympy.Add, sympy.Mul, sympy.Derivative)):
            continue
        elif isinstance(node, sympy.Pow):
            exponent = node.exp
            if not (isinstance(exponent, sympy.Rational) and exponent.q in (1, 2)):
                if node.base != sympy.E:
                    raise ParseError(f"Unsupported power {node}")
        elif isinstance(node, AppliedUndef):
            if node.args != (T,):
                raise ParseError(f"Parameter function {node} must depend on t only")
        elif isinstance(node, _ALLOWED_FUNCTIONS):
            continue
        elif isinstance(node, (sympy.Tuple,)):
            continue
        elif node.is_Atom:
            continue
        else:
            raise ParseError(f"Unsupported operation {type(node).__name__} in {expr}")


def parameter_functions(expr: TimeExpr) -> Set[str]:
    """Names of the unbound parameter functions used by ``expr``."""
    return {node.func.__name__ for node in expr.atoms(AppliedUndef)}


def is_constant_time(expr: TimeExpr) -> bool:
    """True when ``expr`` is a rational (or numeric) constant."""
    return not expr.free_symbols and not expr.atoms(AppliedUndef)


def bind_parameters(expr: TimeExpr, functions: Mapping[str, TimeExpr]) -> TimeExpr:
    """Substitute parameter functions by concrete TimeExprs and evaluate derivatives."""
    if not functions:
        return expr
    replacements = {
        node: functions[node.func.__name__]
        for node in expr.atoms(AppliedUndef)
        if node.func.__name__ in functions
    }
    if not replacements:
        return expr
    return expr.subs(replacements).doit()


def diff_time(expr: TimeExpr) -> TimeExpr:
    """Exact derivative d/dt."""
    return sympy.diff(expr, T)


@lru_cache(maxsize=4096)
def _compile(expr: TimeExpr) -> Callable[[float], float]:
    return sympy.lambdify([T], expr, modules="math")


def compile_time(expr: TimeExpr) -> Callable[[float], float]:
    """
    Compile a TimeExpr to a float function of t.

    Raises:
        UnboundParameterError: If ``expr`` still uses parameter functions
    """
    unbound = parameter_functions(expr)
    if unbound:
        raise UnboundParameterError(
            f"Parameter functions {sorted(unbound)} must be bound before evaluation",
            functions=sorted(unbound),
        )
    return _compile(expr)


def eval_time(expr: TimeExpr, t: float) -> float:
    """
    Evaluate a TimeExpr at time t.

    Raises:
        TimeDomainError: On division by zero, square root of a negative
            number, or overflow
        UnboundParameterError: If parameter functions are unbound
    """
    fn = compile_time(expr)
    try:
        value = fn(float(t))
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise TimeDomainError(f"Cannot evaluate {expr} at t={t}: {e}", t=float(t)) from e
    value = float(value)
    if not math.isfinite(value):
        raise TimeDomainError(f"{expr} is not finite at t={t}", t=float(t))
    return value


def chebyshev_points(interval: Sequence[float], count: int = DEFAULT_SAMPLE_COUNT) -> np.ndarray:
    """Chebyshev points of the first kind on [a, b], in increasing order."""
    a, b = float(interval[0]), float(interval[1])
    k = np.arange(count)
    nodes = np.cos(np.pi * (2 * k + 1) / (2 * count))[::-1]
    return 0.5 * (a + b) + 0.5 * (b - a) * nodes


def sample_time(expr: TimeExpr, times: Iterable[float]) -> np.ndarray:
    return np.array([eval_time(expr, t) for t in times])


def same_time_expr(
    a: TimeLike,
    b: TimeLike,
    interval: Sequence[float] = DEFAULT_INTERVAL,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    tolerance: float = DEFAULT_SAMPLE_TOLERANCE,
) -> bool:
    """
    Decide equality of two TimeExprs.

    Structural equality after simplification is tried first; otherwise both
    sides are sampled at Chebyshev points of ``interval``. Expressions with
    unbound parameter functions are only compared structurally.
    """
    a, b = sympy.sympify(a), sympy.sympify(b)
    difference = sympy.expand(a - b)
    if difference == 0:
        return True
    if sympy.simplify(difference) == 0:
        return True
    if parameter_functions(difference):
        return False
    try:
        for t in chebyshev_points(interval, sample_count):
            va, vb = eval_time(a, t), eval_time(b, t)
            if abs(va - vb) > tolerance * max(1.0, abs(va), abs(vb)):
                return False
    except TimeDomainError:
        return False
    return True

