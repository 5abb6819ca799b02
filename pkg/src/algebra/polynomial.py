"""
Exact polynomial vector fields for quasilie.

Polynomials are sparse elements of ``QQ[x1, ..., xn]`` (sympy's polynomial
rings with lexicographic order), so every value has a unique canonical term
map from exponent vectors to exact rationals. A ``PolyVectorField`` holds one
polynomial per variable, the coefficient of the corresponding partial
derivative, and is the unit of all bracket algebra.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from ..errors import DegreeLimitError, LengthMismatchError, VariableMismatchError


MAX_INPUT_DEGREE = 16

Exponent = Tuple[int, ...]
Slot = Tuple[int, Exponent]
Scalar = Union[int, Fraction, Rational]


@lru_cache(maxsize=None)
def polynomial_ring(variables: Tuple[str, ...]) -> PolyRing:
    """Return the (cached) ring QQ[variables] with lexicographic order."""
    return PolyRing(state_symbols(variables), QQ, lex)


@lru_cache(maxsize=None)
def state_symbols(variables: Tuple[str, ...]) -> Tuple[sympy.Symbol, ...]:
    """Return the sympy symbols used for the state variables."""
    return tuple(sympy.Symbol(name) for name in variables)


def to_fraction(value) -> Fraction:
    """Convert an exact rational (int, Fraction, sympy Rational, QQ element) to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, float):
        raise TypeError(f"Floats are not exact rationals: {value!r}")
    try:
        return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))
    except Exception as e:
        raise TypeError(f"Not an exact rational: {value!r}") from e


def _to_qq(value: Scalar):
    f = to_fraction(value)
    return QQ(f.numerator, f.denominator)


def _check_same(left: Sequence[str], right: Sequence[str]) -> None:
    if tuple(left) != tuple(right):
        raise VariableMismatchError(left, right)


@dataclass(frozen=True)
class Polynomial:
    """
    Polynomial with exact rational coefficients over an ordered variable list.

    The wrapped ring element is canonical: zero terms are never stored and
    equal polynomials have identical term maps.
    """

    variables: Tuple[str, ...]
    element: PolyElement

    # Construction ---------------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        return cls(variables, polynomial_ring(variables).zero)

    @classmethod
    def constant(cls, variables: Sequence[str], value: Scalar) -> "Polynomial":
        variables = tuple(variables)
        return cls(variables, polynomial_ring(variables).ground_new(_to_qq(value)))

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatchError((name,), variables)
        return cls(variables, polynomial_ring(variables).gens[variables.index(name)])

    @classmethod
    def from_terms(
        cls,
        variables: Sequence[str],
        terms: Mapping[Exponent, Scalar],
        check_degree: bool = True,
    ) -> "Polynomial":
        """
        Build a polynomial from a map of exponent vectors to rationals.

        Raises:
            LengthMismatchError: If an exponent vector has the wrong length
            DegreeLimitError: If an input term exceeds the degree limit
        """
        variables = tuple(variables)
        ring = polynomial_ring(variables)
        clean: Dict[Exponent, object] = {}
        for exponent, coeff in terms.items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != len(variables):
                raise LengthMismatchError(
                    f"Exponent {exponent} does not match variables {list(variables)}"
                )
            if any(e < 0 for e in exponent):
                raise ValueError(f"Negative exponent in {exponent}")
            if check_degree and sum(exponent) > MAX_INPUT_DEGREE:
                raise DegreeLimitError(
                    f"Term degree {sum(exponent)} exceeds the input limit {MAX_INPUT_DEGREE}"
                )
            clean[exponent] = clean.get(exponent, QQ.zero) + _to_qq(coeff)
        return cls(variables, ring.from_dict({k: v for k, v in clean.items() if v}))

    @classmethod
    def from_expr(cls, variables: Sequence[str], expr: sympy.Expr) -> "Polynomial":
        """Convert a sympy expression in the state symbols with rational coefficients."""
        variables = tuple(variables)
        poly = sympy.Poly(sympy.expand(expr), *state_symbols(variables), domain=QQ)
        return cls.from_terms(variables, dict(poly.terms()), check_degree=False)

    # Inspection -----------------------------------------------------------

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        """Canonical term map (exponent vector -> exact rational)."""
        return {tuple(m): to_fraction(c) for m, c in self.element.terms()}

    def is_zero(self) -> bool:
        return not self.element

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.element.monoms())

    @property
    def degree(self) -> int:
        """Total degree (-1 for the zero polynomial)."""
        if self.is_zero():
            return -1
        return max(sum(m) for m in self.element.monoms())

    def coefficient(self, exponent: Exponent) -> Fraction:
        return self.terms.get(tuple(exponent), Fraction(0))

    def as_expr(self) -> sympy.Expr:
        return self.element.as_expr()

    def evaluate(self, point: Sequence) -> object:
        """Evaluate at a point; exact for rational points, float otherwise."""
        if len(point) != len(self.variables):
            raise LengthMismatchError(
                f"Point of length {len(point)} for variables {list(self.variables)}"
            )
        exact = all(not isinstance(p, float) for p in point)
        total = Fraction(0) if exact else 0.0
        for exponent, coeff in self.terms.items():
            term = coeff if exact else float(coeff)
            for value, power in zip(point, exponent):
                if power:
                    term = term * value ** power
            total = total + term
        return total

    # Arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> PolyElement:
        if isinstance(other, Polynomial):
            _check_same(self.variables, other.variables)
            return other.element
        return self.element.ring.ground_new(_to_qq(other))

    def __add__(self, other) -> "Polynomial":
        return Polynomial(self.variables, self.element + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        return Polynomial(self.variables, self.element - self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return Polynomial(self.variables, self._coerce(other) - self.element)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.variables, -self.element)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, PolyVectorField):
            return NotImplemented
        return Polynomial(self.variables, self.element * self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Polynomial powers must be non-negative integers, got {exponent!r}")
        return Polynomial(self.variables, self.element ** exponent)

    def diff(self, name: str) -> "Polynomial":
        """Partial derivative with respect to the named variable."""
        if name not in self.variables:
            raise VariableMismatchError((name,), self.variables)
        gen = self.element.ring.gens[self.variables.index(name)]
        return Polynomial(self.variables, self.element.diff(gen))

    def __repr__(self) -> str:
        return f"Polynomial({self.as_expr()})"


@dataclass(frozen=True)
class PolyVectorField:
    """
    Vector field sum_i P_i(x) d/dx_i with exact polynomial components.

    Components share the field's variable list; the zero field has all
    components zero. Equality is exact.
    """

    variables: Tuple[str, ...]
    components: Tuple[Polynomial, ...]

    def __post_init__(self):
        if len(self.components) != len(self.variables):
            raise LengthMismatchError(
                f"{len(self.components)} components for {len(self.variables)} variables"
            )
        for component in self.components:
            _check_same(self.variables, component.variables)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "PolyVectorField":
        variables = tuple(variables)
        return cls(variables, tuple(Polynomial.zero(variables) for _ in variables))

    @classmethod
    def from_components(
        cls, variables: Sequence[str], components: Mapping[str, Polynomial]
    ) -> "PolyVectorField":
        """Build a field from a name -> component map; missing names are zero."""
        variables = tuple(variables)
        for name in components:
            if name not in variables:
                raise VariableMismatchError((name,), variables)
        return cls(
            variables,
            tuple(components.get(name, Polynomial.zero(variables)) for name in variables),
        )

    @classmethod
    def partial(cls, variables: Sequence[str], name: str) -> "PolyVectorField":
        """The coordinate field d/d(name)."""
        variables = tuple(variables)
        return cls.from_components(variables, {name: Polynomial.constant(variables, 1)})

    @classmethod
    def from_slots(
        cls, variables: Sequence[str], slots: Mapping[Slot, Scalar]
    ) -> "PolyVectorField":
        """Inverse of :meth:`slots`."""
        variables = tuple(variables)
        per_component: Dict[int, Dict[Exponent, Scalar]] = {}
        for (index, exponent), coeff in slots.items():
            per_component.setdefault(index, {})[exponent] = coeff
        return cls(
            variables,
            tuple(
                Polynomial.from_terms(variables, per_component.get(i, {}), check_degree=False)
                for i in range(len(variables))
            ),
        )

    def component(self, name: str) -> Polynomial:
        return self.components[self.variables.index(name)]

    def slots(self) -> Dict[Slot, Fraction]:
        """Coordinates of the field on the monomial fields x^e d/dx_i."""
        result: Dict[Slot, Fraction] = {}
        for index, component in enumerate(self.components):
            for exponent, coeff in component.terms.items():
                result[(index, exponent)] = coeff
        return result

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @property
    def degree(self) -> int:
        return max((c.degree for c in self.components), default=-1)

    def evaluate(self, point: Sequence) -> Tuple:
        return tuple(c.evaluate(point) for c in self.components)

    def apply(self, p: Polynomial) -> Polynomial:
        """Directional derivative of a scalar polynomial along this field."""
        return lie_derivative_scalar(self, p)

    def as_exprs(self) -> Tuple[sympy.Expr, ...]:
        return tuple(c.as_expr() for c in self.components)

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        _check_same(self.variables, other.variables)
        return PolyVectorField(
            self.variables, tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        _check_same(self.variables, other.variables)
        return PolyVectorField(
            self.variables, tuple(a - b for a, b in zip(self.components, other.components))
        )

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField(self.variables, tuple(-c for c in self.components))

    def __mul__(self, scalar) -> "PolyVectorField":
        """Multiply by a rational constant or a scalar polynomial."""
        return PolyVectorField(self.variables, tuple(c * scalar for c in self.components))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        parts = [
            f"({c.as_expr()})*d/d{name}"
            for name, c in zip(self.variables, self.components)
            if not c.is_zero()
        ]
        return f"PolyVectorField({' + '.join(parts) or '0'})"


def lie_derivative_scalar(A: PolyVectorField, p: Polynomial) -> Polynomial:
    """
    Return sum_i A^i dp/dx^i exactly.

    Raises:
        VariableMismatchError: If A and p use different variable lists
    """
    _check_same(A.variables, p.variables)
    result = Polynomial.zero(A.variables)
    for name, component in zip(A.variables, A.components):
        if component.is_zero():
            continue
        result = result + component * p.diff(name)
    return result


def bracket(A: PolyVectorField, B: PolyVectorField) -> PolyVectorField:
    """
    Lie bracket [A, B] with components A(B^i) - B(A^i).

    Raises:
        VariableMismatchError: If A and B use different variable lists
    """
    _check_same(A.variables, B.variables)
    return PolyVectorField(
        A.variables,
        tuple(
            lie_derivative_scalar(A, b) - lie_derivative_scalar(B, a)
            for a, b in zip(A.components, B.components)
        ),
    )


def linear_combination(
    coeffs: Sequence[Scalar],
    fields: Sequence[PolyVectorField],
    variables: Optional[Sequence[str]] = None,
) -> PolyVectorField:
    """
    Exact sum_a c_a X_a.

    Args:
        coeffs: Exact rational coefficients
        fields: Fields sharing one variable list
        variables: Variable list used for the empty combination

    Raises:
        LengthMismatchError: If the two lists differ in length
    """
    if len(coeffs) != len(fields):
        raise LengthMismatchError(
            f"{len(coeffs)} coefficients for {len(fields)} fields"
        )
    if not fields:
        return PolyVectorField.zero(tuple(variables or ()))
    result = PolyVectorField.zero(fields[0].variables)
    for coeff, field in zip(coeffs, fields):
        if to_fraction(coeff) != 0:
            result = result + field * coeff
    return result


def monomial_field(variables: Sequence[str], index: int, exponent: Iterable[int]) -> PolyVectorField:
    """The field x^exponent d/dx_index."""
    variables = tuple(variables)
    component = Polynomial.from_terms(variables, {tuple(exponent): 1}, check_degree=False)
    return PolyVectorField.from_components(variables, {variables[index]: component})
