"""
Time-dependent vector fields and second-order systems for quasilie.

A ``TDVF`` is a finite sum of (TimeExpr coefficient, PolyVectorField) terms
over a shared variable list. Terms are kept in canonical form: coefficients
are split into a rational factor and a symbolic remainder, and terms with the
same remainder are merged, so the lift of
x'' = f(t) - 3 x x' - x^3 reads back as exactly ``[(1, X1), (f, X2)]``.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..algebra.field_space import ClosureResult, FieldSpace, close_under_bracket, span_contains
from ..algebra.polynomial import (
    MAX_INPUT_DEGREE,
    Exponent,
    PolyVectorField,
    Slot,
    monomial_field,
    state_symbols,
    to_fraction,
)
from ..errors import (
    DegreeLimitError,
    LengthMismatchError,
    ParseError,
    TimeDomainError,
    VariableMismatchError,
)
from ..logging_config import get_logger
from .time_expr import (
    DEFAULT_INTERVAL,
    DEFAULT_SAMPLE_COUNT,
    DEFAULT_SAMPLE_TOLERANCE,
    T,
    TimeExpr,
    bind_parameters,
    compile_time,
    eval_time,
    parameter_functions,
    same_time_expr,
    time_expr,
)


logger = get_logger(__name__)

Term = Tuple[TimeExpr, PolyVectorField]


def _rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _split(coeff: TimeExpr) -> Tuple[Fraction, TimeExpr]:
    """Split a coefficient into (rational factor, symbolic remainder)."""
    rational, rest = sympy.sympify(coeff).as_coeff_Mul()
    if not isinstance(rational, sympy.Rational):
        return Fraction(1), sympy.sympify(coeff)
    return to_fraction(rational), rest


def _canonical_terms(variables: Tuple[str, ...], terms: Iterable[Term]) -> Tuple[Term, ...]:
    merged: Dict[TimeExpr, PolyVectorField] = {}
    order: List[TimeExpr] = []
    for coeff, vf in terms:
        if vf.variables != variables:
            raise VariableMismatchError(variables, vf.variables)
        coeff = sympy.expand(sympy.sympify(coeff))
        if coeff == 0 or vf.is_zero():
            continue
        addends = coeff.args if isinstance(coeff, sympy.Add) else (coeff,)
        for addend in addends:
            rational, rest = _split(addend)
            if rest not in merged:
                merged[rest] = PolyVectorField.zero(variables)
                order.append(rest)
            merged[rest] = merged[rest] + vf * rational
    return tuple((rest, merged[rest]) for rest in order if not merged[rest].is_zero())


@dataclass(frozen=True)
class TDVF:
    """
    Time-dependent vector field sum_k c_k(t) V_k(x).

    The zero TDVF has an empty term list. Instances are built through
    :meth:`from_terms`, which canonicalizes.
    """

    variables: Tuple[str, ...]
    terms: Tuple[Term, ...] = ()

    @classmethod
    def from_terms(cls, variables: Sequence[str], terms: Iterable[Term]) -> "TDVF":
        variables = tuple(variables)
        terms = [(time_expr(c) if isinstance(c, str) else c, vf) for c, vf in terms]
        return cls(variables, _canonical_terms(variables, terms))

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "TDVF":
        return cls(tuple(variables), ())

    @classmethod
    def autonomous(cls, vf: PolyVectorField) -> "TDVF":
        return cls.from_terms(vf.variables, [(sympy.Integer(1), vf)])

    @classmethod
    def from_slot_coefficients(
        cls, variables: Sequence[str], slots: Mapping[Slot, TimeExpr]
    ) -> "TDVF":
        """Inverse of :meth:`slot_coefficients`."""
        variables = tuple(variables)
        terms = [
            (coeff, monomial_field(variables, index, exponent))
            for (index, exponent), coeff in slots.items()
        ]
        return cls.from_terms(variables, terms)

    # Inspection -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def coefficients(self) -> Tuple[TimeExpr, ...]:
        return tuple(c for c, _ in self.terms)

    @property
    def fields(self) -> Tuple[PolyVectorField, ...]:
        return tuple(vf for _, vf in self.terms)

    def parameter_functions(self) -> List[str]:
        names = set()
        for c, _ in self.terms:
            names |= parameter_functions(c)
        return sorted(names)

    def slot_coefficients(self) -> Dict[Slot, TimeExpr]:
        """Time-dependent coefficient of every monomial field x^e d/dx_i."""
        result: Dict[Slot, TimeExpr] = {}
        for coeff, vf in self.terms:
            for slot, value in vf.slots().items():
                scaled = coeff * sympy.Rational(value.numerator, value.denominator)
                result[slot] = result.get(slot, sympy.Integer(0)) + scaled
        return {s: sympy.expand(c) for s, c in result.items() if sympy.expand(c) != 0}

    def component_exprs(self) -> Tuple[sympy.Expr, ...]:
        """Components as sympy expressions in t and the state symbols."""
        totals = [sympy.Integer(0)] * len(self.variables)
        for coeff, vf in self.terms:
            for i, component in enumerate(vf.as_exprs()):
                totals[i] = totals[i] + coeff * component
        return tuple(sympy.expand(c) for c in totals)

    # Arithmetic -----------------------------------------------------------

    def __add__(self, other: "TDVF") -> "TDVF":
        if self.variables != other.variables:
            raise VariableMismatchError(self.variables, other.variables)
        return TDVF.from_terms(self.variables, self.terms + other.terms)

    def __sub__(self, other: "TDVF") -> "TDVF":
        return self + other.scale(-1)

    def scale(self, coeff) -> "TDVF":
        """Multiply every coefficient by a TimeExpr."""
        coeff = sympy.sympify(coeff)
        return TDVF.from_terms(self.variables, [(coeff * c, vf) for c, vf in self.terms])

    def bind(self, functions: Mapping[str, TimeExpr]) -> "TDVF":
        """Substitute parameter functions by concrete time expressions."""
        return TDVF.from_terms(
            self.variables, [(bind_parameters(c, functions), vf) for c, vf in self.terms]
        )

    # Evaluation -----------------------------------------------------------

    def frozen_at(self, t: float) -> Tuple[Tuple[float, PolyVectorField], ...]:
        """The field at a fixed time, as float-weighted polynomial fields."""
        return tuple((eval_time(c, t), vf) for c, vf in self.terms)

    def evaluate(self, t: float, point: Sequence[float]) -> np.ndarray:
        """Value of the field at (t, point)."""
        result = np.zeros(len(self.variables))
        state = [float(p) for p in point]
        for weight, vf in self.frozen_at(t):
            result += weight * np.array(vf.evaluate(state), dtype=float)
        return result

    def compile(self) -> Callable[[float, np.ndarray], np.ndarray]:
        """
        Compile to a float right-hand side f(t, y) for the integrators.

        Raises:
            UnboundParameterError: If parameter functions are still symbolic
        """
        for c, _ in self.terms:
            compile_time(c)
        symbols = state_symbols(self.variables)
        fn = sympy.lambdify([T, *symbols], list(self.component_exprs()), modules="math")
        n = len(self.variables)

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            try:
                return np.array(fn(t, *y), dtype=float).reshape(n)
            except (ValueError, ZeroDivisionError, OverflowError) as e:
                raise TimeDomainError(f"Right-hand side undefined at t={t}: {e}", t=t) from e

        return rhs

    def same_as(
        self,
        other: "TDVF",
        interval: Sequence[float] = DEFAULT_INTERVAL,
        sample_count: int = DEFAULT_SAMPLE_COUNT,
        tolerance: float = DEFAULT_SAMPLE_TOLERANCE,
    ) -> bool:
        """Slot-wise equality, structural first and sampled as a fallback."""
        if self.variables != other.variables:
            return False
        mine, theirs = self.slot_coefficients(), other.slot_coefficients()
        for slot in set(mine) | set(theirs):
            a = mine.get(slot, sympy.Integer(0))
            b = theirs.get(slot, sympy.Integer(0))
            if not same_time_expr(a, b, interval, sample_count, tolerance):
                return False
        return True

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*[{vf}]" for c, vf in self.terms)


@dataclass(frozen=True)
class SODE:
    """
    Second-order system x_i'' = F_i(t, x, x') with polynomial state dependence.

    ``rhs[i]`` is a canonical tuple of (TimeExpr, exponent) pairs where the
    exponent ranges over the 2n state variables (positions then velocities).
    """

    positions: Tuple[str, ...]
    velocities: Tuple[str, ...]
    rhs: Tuple[Tuple[Tuple[TimeExpr, Exponent], ...], ...]

    def __post_init__(self):
        n = len(self.positions)
        if len(self.velocities) != n or len(self.rhs) != n:
            raise LengthMismatchError(
                f"{n} positions, {len(self.velocities)} velocities, {len(self.rhs)} equations"
            )
        names = self.positions + self.velocities
        if len(set(names)) != len(names) or "t" in names:
            raise VariableMismatchError(self.positions, self.velocities)
        for equation in self.rhs:
            for _, exponent in equation:
                if len(exponent) != 2 * n:
                    raise LengthMismatchError(
                        f"Monomial {exponent} does not match {2 * n} state variables"
                    )

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def state_variables(self) -> Tuple[str, ...]:
        return self.positions + self.velocities

    @classmethod
    def from_expressions(
        cls,
        positions: Sequence[str],
        velocities: Sequence[str],
        expressions: Sequence,
    ) -> "SODE":
        """
        Build a SODE from right-hand sides given as sympy expressions.

        Expressions may use ``t`` (the symbol :data:`T`), parameter functions
        and the state symbols; they must be polynomial in the state.

        Raises:
            ParseError: If a right-hand side is not polynomial in the state
            DegreeLimitError: If a term exceeds the input degree limit
        """
        positions, velocities = tuple(positions), tuple(velocities)
        symbols = state_symbols(positions + velocities)
        equations = []
        for expr in expressions:
            expr = sympy.sympify(expr)
            try:
                poly = sympy.Poly(sympy.expand(expr), *symbols)
            except sympy.PolynomialError as e:
                raise ParseError(f"Right-hand side {expr} is not polynomial in the state") from e
            terms = []
            for exponent, coeff in poly.terms():
                if sum(exponent) > MAX_INPUT_DEGREE:
                    raise DegreeLimitError(
                        f"Term degree {sum(exponent)} exceeds the input limit {MAX_INPUT_DEGREE}"
                    )
                if coeff.free_symbols - {T}:
                    raise ParseError(f"Coefficient {coeff} depends on unknown symbols")
                terms.append((time_expr(coeff), tuple(exponent)))
            equations.append(terms)
        return cls.from_terms(positions, velocities, equations)

    @classmethod
    def from_terms(
        cls,
        positions: Sequence[str],
        velocities: Sequence[str],
        equations: Sequence[Iterable[Tuple[TimeExpr, Exponent]]],
    ) -> "SODE":
        """Canonicalize (merge equal monomials, drop zeros, sort descending)."""
        canonical = []
        for terms in equations:
            merged: Dict[Exponent, TimeExpr] = {}
            for coeff, exponent in terms:
                exponent = tuple(int(e) for e in exponent)
                merged[exponent] = merged.get(exponent, sympy.Integer(0)) + sympy.sympify(coeff)
            cleaned = [(sympy.expand(c), e) for e, c in merged.items()]
            cleaned = [(c, e) for c, e in cleaned if c != 0]
            canonical.append(tuple(sorted(cleaned, key=lambda item: item[1], reverse=True)))
        return cls(tuple(positions), tuple(velocities), tuple(canonical))

    def rhs_exprs(self) -> Tuple[sympy.Expr, ...]:
        symbols = state_symbols(self.state_variables)
        result = []
        for equation in self.rhs:
            total = sympy.Integer(0)
            for coeff, exponent in equation:
                monomial = sympy.Mul(*[s ** e for s, e in zip(symbols, exponent)])
                total += coeff * monomial
            result.append(total)
        return tuple(result)

    def coefficient(self, i: int, exponent: Exponent) -> TimeExpr:
        for coeff, e in self.rhs[i]:
            if e == tuple(exponent):
                return coeff
        return sympy.Integer(0)

    def bind(self, functions: Mapping[str, TimeExpr]) -> "SODE":
        return SODE.from_terms(
            self.positions,
            self.velocities,
            [[(bind_parameters(c, functions), e) for c, e in eq] for eq in self.rhs],
        )

    def evaluate(self, t: float, x: Sequence[float], v: Sequence[float]) -> np.ndarray:
        """F(t, x, v) as floats."""
        state = list(x) + list(v)
        out = np.zeros(self.n)
        for i, equation in enumerate(self.rhs):
            for coeff, exponent in equation:
                term = eval_time(coeff, t)
                for value, power in zip(state, exponent):
                    if power:
                        term *= value ** power
                out[i] += term
        return out


def lift_sode(s: SODE) -> TDVF:
    """
    First-order lift of a SODE: x_i' = v_i, v_i' = F_i(t, x, v).

    The lift is a TDVF over (x_1..x_n, v_1..v_n).
    """
    variables = s.state_variables
    n = s.n
    terms: List[Term] = []
    for i in range(n):
        exponent = tuple(1 if k == n + i else 0 for k in range(2 * n))
        terms.append((sympy.Integer(1), monomial_field(variables, i, exponent)))
    for i, equation in enumerate(s.rhs):
        for coeff, exponent in equation:
            terms.append((coeff, monomial_field(variables, n + i, exponent)))
    return TDVF.from_terms(variables, terms)


@dataclass(frozen=True)
class Decomposition:
    """
    Result of :func:`decompose_onto_basis`.

    On success ``coefficients`` holds one TimeExpr per basis field. On
    failure it is None, ``failing_terms`` lists the terms whose fields are not
    in the span and ``residual`` is the part of X left after reduction.
    """

    coefficients: Optional[Tuple[TimeExpr, ...]]
    failing_terms: Tuple[Term, ...] = ()
    residual: Optional[TDVF] = None

    @property
    def succeeded(self) -> bool:
        return self.coefficients is not None

    @property
    def witness(self) -> Optional[PolyVectorField]:
        """First term field that is not in the span."""
        return self.failing_terms[0][1] if self.failing_terms else None

    def recombine(self, basis: FieldSpace) -> TDVF:
        """sum_a c_a(t) X_a, the inverse of a successful decomposition."""
        if self.coefficients is None:
            raise ValueError("Cannot recombine a failed decomposition")
        return TDVF.from_terms(basis.variables, list(zip(self.coefficients, basis.basis)))


def decompose_onto_basis(
    X: TDVF,
    basis: FieldSpace,
    interval: Sequence[float] = DEFAULT_INTERVAL,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    tolerance: float = DEFAULT_SAMPLE_TOLERANCE,
) -> Decomposition:
    """
    Write X(t) = sum_a c_a(t) X_a over a basis of fields.

    Each term is reduced with span_contains and its coefficients accumulated.
    If some term field is outside the span, the combined slot coefficients
    are reduced against the exact echelon form instead and the residual is
    tested for zero, structurally first and by sampling on ``interval``.

    Raises:
        VariableMismatchError: If X and the basis use different variables
    """
    if X.variables != basis.variables:
        raise VariableMismatchError(basis.variables, X.variables)

    r = basis.dimension
    coefficients = [sympy.Integer(0)] * r
    failing: List[Term] = []
    for coeff, vf in X.terms:
        membership = span_contains(basis, vf)
        if not membership.is_member:
            failing.append((coeff, vf))
            continue
        for a, value in enumerate(membership.coordinates):
            if value:
                coefficients[a] += coeff * sympy.Rational(value.numerator, value.denominator)

    if not failing:
        return Decomposition(tuple(sympy.expand(c) for c in coefficients))

    coordinates, residual = basis.reduce_slots(X.slot_coefficients(), to_scalar=_rational)
    leftover = {
        slot: sympy.expand(value)
        for slot, value in residual.items()
        if not same_time_expr(value, 0, interval, sample_count, tolerance)
    }
    if not leftover:
        logger.debug("Decomposition needed slot-level reduction")
        return Decomposition(tuple(sympy.expand(c) for c in coordinates))

    logger.debug(f"Decomposition failed; {len(failing)} term fields outside the span")
    return Decomposition(
        None,
        failing_terms=tuple(failing),
        residual=TDVF.from_slot_coefficients(X.variables, leftover),
    )


@dataclass(frozen=True)
class LieSystemCertificate:
    """Evidence that a TDVF is (or is not) a Lie system."""

    closure: ClosureResult
    decomposition: Decomposition

    @property
    def is_lie_system(self) -> bool:
        return self.closure.closed and self.decomposition.succeeded

    @property
    def dimension(self) -> int:
        return self.closure.dimension


def is_lie_system(
    X: TDVF,
    generators: Optional[Sequence[PolyVectorField]] = None,
    max_dim: int = 64,
) -> LieSystemCertificate:
    """
    Close the generators (the term fields of X by default) under brackets
    and decompose X onto the closure.
    """
    generators = list(generators) if generators else list(X.fields)
    if not generators:
        generators = [PolyVectorField.partial(X.variables, X.variables[0])]
    closure = close_under_bracket(generators, max_dim=max_dim)
    if not closure.closed:
        return LieSystemCertificate(closure, Decomposition(None, failing_terms=X.terms))
    return LieSystemCertificate(closure, decompose_onto_basis(X, closure.space))
