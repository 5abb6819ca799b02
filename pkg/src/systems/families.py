"""
Second-order Riccati-type families for quasilie.

* ``GHJFamily`` - x'' + 3 x x' + x^3 + g (x' + x^2) + h x + j = 0, whose
  lift decomposes on the sl(3, R) realization for every (g, h, j).
* ``Riccati2Spec`` - x'' + (b0 + b1 x) x' + a0 + a1 x + a2 x^2 + a3 x^3 = 0
  with a3 > 0, a3(0) = 1, b1 = 3 sqrt(a3) and b0 = a2/sqrt(a3) - a3'/(2 a3).

Both are turned into canonical ``SODE`` values with every family term moved
to the right-hand side.
"""

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import sympy

from ..errors import ConstraintViolationError, FamilyMismatchError, TimeDomainError
from ..logging_config import get_logger
from .tdvf import SODE
from .time_expr import (
    DEFAULT_INTERVAL,
    DEFAULT_SAMPLE_COUNT,
    DEFAULT_SAMPLE_TOLERANCE,
    T,
    TimeExpr,
    TimeLike,
    bind_parameters,
    chebyshev_points,
    diff_time,
    eval_time,
    parameter_functions,
    same_time_expr,
    time_expr,
)


logger = get_logger(__name__)

POSITIONS = ("x",)
VELOCITIES = ("v",)

# exponents over (x, v)
_XV = (1, 1)
_X3 = (3, 0)
_V = (0, 1)
_X2 = (2, 0)
_X = (1, 0)
_ONE = (0, 0)


@dataclass(frozen=True)
class GHJFamily:
    """x'' = -3 x v - x^3 - g (v + x^2) - h x - j."""

    g: TimeExpr
    h: TimeExpr
    j: TimeExpr

    @classmethod
    def of(cls, g: TimeLike = 0, h: TimeLike = 0, j: TimeLike = 0) -> "GHJFamily":
        return cls(time_expr(g), time_expr(h), time_expr(j))

    @classmethod
    def forced(cls, f: TimeLike) -> "GHJFamily":
        """x'' + 3 x x' + x^3 = f(t), i.e. g = h = 0 and j = -f."""
        return cls(sympy.Integer(0), sympy.Integer(0), -time_expr(f))

    def sode(self) -> SODE:
        return family_ghj(self.g, self.h, self.j)

    def bind(self, functions: Mapping[str, TimeExpr]) -> "GHJFamily":
        return GHJFamily(
            bind_parameters(self.g, functions),
            bind_parameters(self.h, functions),
            bind_parameters(self.j, functions),
        )

    def companion_residual(self, t: float, w: float, w1: float, w2: float, w3: float) -> float:
        """w''' + g w'' + h w' + j w for the linear companion equation."""
        return w3 + eval_time(self.g, t) * w2 + eval_time(self.h, t) * w1 + eval_time(self.j, t) * w


def family_ghj(g: TimeLike, h: TimeLike, j: TimeLike) -> SODE:
    """SODE of the g, h, j family over (x, v)."""
    g, h, j = time_expr(g), time_expr(h), time_expr(j)
    return SODE.from_terms(
        POSITIONS,
        VELOCITIES,
        [[
            (sympy.Integer(-3), _XV),
            (sympy.Integer(-1), _X3),
            (-g, _V),
            (-g, _X2),
            (-h, _X),
            (-j, _ONE),
        ]],
    )


_FAMILY_MONOMIALS = {_XV, _X3, _V, _X2, _X, _ONE}


def match_ghj(s: SODE, interval: Sequence[float] = DEFAULT_INTERVAL) -> GHJFamily:
    """
    Recognize a SODE as a member of the g, h, j family.

    Raises:
        FamilyMismatchError: If the SODE has another shape
    """
    if s.n != 1:
        raise FamilyMismatchError(f"The g,h,j family is scalar; got {s.n} equations")
    extra = {e for _, e in s.rhs[0]} - _FAMILY_MONOMIALS
    if extra:
        raise FamilyMismatchError(f"Monomials {sorted(extra)} are not in the g,h,j family")

    def coeff(e):
        return s.coefficient(0, e)

    if not same_time_expr(coeff(_XV), -3, interval):
        raise FamilyMismatchError(f"Coefficient of x*v must be -3, got {coeff(_XV)}")
    if not same_time_expr(coeff(_X3), -1, interval):
        raise FamilyMismatchError(f"Coefficient of x^3 must be -1, got {coeff(_X3)}")
    if not same_time_expr(coeff(_V), coeff(_X2), interval):
        raise FamilyMismatchError(
            f"Coefficients of v and x^2 must agree, got {coeff(_V)} and {coeff(_X2)}"
        )
    return GHJFamily(-coeff(_V), -coeff(_X), -coeff(_ONE))


def _find_violation(
    lhs: TimeExpr, rhs: TimeExpr, interval: Sequence[float], sample_count: int, tolerance: float
) -> Optional[float]:
    """First sample time where lhs and rhs differ, or None."""
    if same_time_expr(lhs, rhs, interval, sample_count, tolerance):
        return None
    if parameter_functions(lhs - rhs):
        return float(interval[0])
    for t in chebyshev_points(interval, sample_count):
        try:
            a, b = eval_time(lhs, t), eval_time(rhs, t)
        except TimeDomainError:
            return float(t)
        if abs(a - b) > tolerance * max(1.0, abs(a), abs(b)):
            return float(t)
    return float(interval[0])


@dataclass(frozen=True)
class Riccati2Spec:
    """
    Coefficients of the second-order Riccati equation
    x'' + (b0 + b1 x) x' + a0 + a1 x + a2 x^2 + a3 x^3 = 0.
    """

    a0: TimeExpr
    a1: TimeExpr
    a2: TimeExpr
    a3: TimeExpr
    b0: TimeExpr
    b1: TimeExpr

    @classmethod
    def from_coefficients(
        cls, a0: TimeLike, a1: TimeLike, a2: TimeLike, a3: TimeLike
    ) -> "Riccati2Spec":
        """Derive b0 and b1 from the a-coefficients."""
        a0, a1, a2, a3 = (time_expr(a) for a in (a0, a1, a2, a3))
        s = sympy.sqrt(a3)
        return cls(
            a0=a0,
            a1=a1,
            a2=a2,
            a3=a3,
            b0=a2 / s - diff_time(a3) / (2 * a3),
            b1=3 * s,
        )

    @property
    def scale(self) -> TimeExpr:
        """sqrt(a3), the factor of z = sqrt(a3) x."""
        return sympy.sqrt(self.a3)

    def bind(self, functions: Mapping[str, TimeExpr]) -> "Riccati2Spec":
        return replace(
            self,
            **{name: bind_parameters(getattr(self, name), functions)
               for name in ("a0", "a1", "a2", "a3", "b0", "b1")},
        )

    def validate(
        self,
        interval: Sequence[float] = DEFAULT_INTERVAL,
        sample_count: int = DEFAULT_SAMPLE_COUNT,
        tolerance: float = DEFAULT_SAMPLE_TOLERANCE,
    ) -> None:
        """
        Check a3(0) = 1, a3 > 0 on the interval and the b0, b1 relations.

        Symbolic parameter functions are only checked structurally.

        Raises:
            ConstraintViolationError: Naming the violated relation and a time
        """
        symbolic_a3 = bool(parameter_functions(self.a3))
        if not symbolic_a3:
            at_zero = sympy.simplify(self.a3.subs(T, 0))
            if at_zero != 1:
                raise ConstraintViolationError(
                    f"a3(0) = 1 violated: a3(0) = {at_zero}", relation="a3(0) = 1", t=0.0
                )
            grid = [float(interval[0])] + list(chebyshev_points(interval, sample_count))
            grid.append(float(interval[1]))
            for t in grid:
                try:
                    value = eval_time(self.a3, t)
                except TimeDomainError:
                    value = float("nan")
                if not value > 0:
                    raise ConstraintViolationError(
                        f"a3 > 0 violated at t={t}: a3 = {value}", relation="a3 > 0", t=float(t)
                    )

        s = sympy.sqrt(self.a3)
        relations = [
            ("b1 = 3*sqrt(a3)", self.b1, 3 * s),
            ("b0 = a2/sqrt(a3) - a3'/(2*a3)", self.b0, self.a2 / s - diff_time(self.a3) / (2 * self.a3)),
        ]
        for relation, lhs, rhs in relations:
            t_bad = _find_violation(lhs, rhs, interval, sample_count, tolerance)
            if t_bad is not None:
                raise ConstraintViolationError(
                    f"{relation} violated at t={t_bad}", relation=relation, t=t_bad
                )
        logger.debug("Riccati2 coefficient constraints hold")


def riccati2(spec: Riccati2Spec, validate: bool = True, interval: Sequence[float] = DEFAULT_INTERVAL) -> SODE:
    """
    SODE x'' = -(b0 + b1 x) v - a0 - a1 x - a2 x^2 - a3 x^3 over (x, v).

    Raises:
        ConstraintViolationError: If ``validate`` and a constraint fails
    """
    if validate:
        spec.validate(interval)
    return SODE.from_terms(
        POSITIONS,
        VELOCITIES,
        [[
            (-spec.b0, _V),
            (-spec.b1, _XV),
            (-spec.a0, _ONE),
            (-spec.a1, _X),
            (-spec.a2, _X2),
            (-spec.a3, _X3),
        ]],
    )


def riccati2_to_family(spec: Riccati2Spec) -> GHJFamily:
    """
    The g, h, j family member satisfied by z = sqrt(a3) x.

    With s = sqrt(a3):
    g = a2/s - 3 s'/s, h = a1 - s''/s + 3 s'^2/s^2 - a2 s'/s^2, j = s a0.
    """
    s = spec.scale
    ds = diff_time(s)
    dds = diff_time(ds)
    g = spec.a2 / s - 3 * ds / s
    h = spec.a1 - dds / s + 3 * ds ** 2 / s ** 2 - spec.a2 * ds / s ** 2
    j = s * spec.a0
    return GHJFamily(*(sympy.simplify(e) for e in (g, h, j)))
