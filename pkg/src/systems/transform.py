"""
Diagonal time-dependent scalings and quasi-Lie certification for quasilie.

A ``ScalingTransform`` maps z_i to zbar_i = g_i(t) z_i. Under it the i-th
component of a TDVF becomes

    g_i(t) X^i(t, zbar / g(t)) + (g_i'(t) / g_i(t)) zbar_i

with the substitution expanded so the result stays polynomial in zbar.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
import sympy

from ..algebra.field_space import FieldSpace, SchemeReport, StructureConstants, check_scheme
from ..algebra.polynomial import state_symbols
from ..errors import LengthMismatchError, SchemeError, TimeDomainError, VariableMismatchError
from ..logging_config import PerformanceLogger, get_logger
from ..numerics.trajectory import Trajectory
from .tdvf import TDVF, Decomposition, decompose_onto_basis
from .time_expr import (
    DEFAULT_INTERVAL,
    DEFAULT_SAMPLE_COUNT,
    DEFAULT_SAMPLE_TOLERANCE,
    T,
    TimeExpr,
    TimeLike,
    chebyshev_points,
    diff_time,
    eval_time,
    parameter_functions,
    time_expr,
)


logger = get_logger(__name__)

_VANISHING = 1e-300


class Direction(str, Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass(frozen=True)
class ScalingTransform:
    """zbar_i = g_i(t) z_i for each variable."""

    variables: Tuple[str, ...]
    factors: Tuple[TimeExpr, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.factors):
            raise LengthMismatchError(
                f"{len(self.factors)} factors for variables {list(self.variables)}"
            )

    @classmethod
    def of(cls, variables: Sequence[str], factors: Sequence[TimeLike]) -> "ScalingTransform":
        return cls(tuple(variables), tuple(time_expr(g) for g in factors))

    @classmethod
    def identity(cls, variables: Sequence[str]) -> "ScalingTransform":
        return cls(tuple(variables), tuple(sympy.Integer(1) for _ in variables))

    @classmethod
    def velocity_scaling(cls, a3: TimeLike, variables: Sequence[str] = ("x", "v")) -> "ScalingTransform":
        """xbar = x, vbar = a3^(-1/2) v."""
        return cls(tuple(variables), (sympy.Integer(1), 1 / sympy.sqrt(time_expr(a3))))

    def is_identity(self) -> bool:
        return all(g == 1 for g in self.factors)

    def inverse(self) -> "ScalingTransform":
        return ScalingTransform(self.variables, tuple(sympy.powsimp(1 / g) for g in self.factors))

    def compose(self, first: "ScalingTransform") -> "ScalingTransform":
        """self after first: zbar_i = g_i(t) f_i(t) z_i."""
        if first.variables != self.variables:
            raise VariableMismatchError(self.variables, first.variables)
        return ScalingTransform(
            self.variables, tuple(g * f for g, f in zip(self.factors, first.factors))
        )

    def check_nonvanishing(
        self, interval: Sequence[float] = DEFAULT_INTERVAL, sample_count: int = DEFAULT_SAMPLE_COUNT
    ) -> None:
        """
        Raises:
            TimeDomainError: If a factor vanishes or is undefined at a sample time
        """
        for name, g in zip(self.variables, self.factors):
            if g == 0:
                raise TimeDomainError(f"Factor of {name} is identically zero", t=float(interval[0]))
            if parameter_functions(g) or not g.free_symbols:
                continue
            for t in chebyshev_points(interval, sample_count):
                if abs(eval_time(g, t)) < _VANISHING:
                    raise TimeDomainError(f"Factor of {name} vanishes at t={t}", t=float(t))

    def factor_values(self, t: float) -> np.ndarray:
        return np.array([eval_time(g, t) for g in self.factors])

    def factor_derivatives(self, t: float) -> np.ndarray:
        return np.array([eval_time(diff_time(g), t) for g in self.factors])


def push_forward(
    X: TDVF,
    transform: ScalingTransform,
    interval: Sequence[float] = DEFAULT_INTERVAL,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
) -> TDVF:
    """
    Express X in the coordinates zbar = g(t) z.

    The g'/g term is computed symbolically.

    Raises:
        VariableMismatchError: If X and the transform use different variables
        TimeDomainError: If a factor vanishes on the interval
    """
    if X.variables != transform.variables:
        raise VariableMismatchError(transform.variables, X.variables)
    transform.check_nonvanishing(interval, sample_count)
    if transform.is_identity():
        return X

    symbols = state_symbols(X.variables)
    substitution = {s: s / g for s, g in zip(symbols, transform.factors)}
    components = X.component_exprs()
    slots = {}
    for i, (symbol, g, component) in enumerate(zip(symbols, transform.factors, components)):
        new = g * component.subs(substitution, simultaneous=True)
        new += diff_time(g) / g * symbol
        poly = sympy.Poly(sympy.expand(new), *symbols)
        for exponent, coeff in poly.terms():
            coeff = sympy.expand(sympy.powsimp(coeff))
            if coeff != 0:
                slots[(i, tuple(exponent))] = coeff
    result = TDVF.from_slot_coefficients(X.variables, slots)
    logger.debug(f"Push-forward produced {len(result.terms)} terms")
    return result


@dataclass(frozen=True)
class QuasiLieCertificate:
    """
    Evidence for the quasi-Lie property of a TDVF under a scheme and transform.

    ``failed_stage`` names the first failing check: ``target`` (target not
    bracket-closed), ``values_in_v2``, ``scheme`` or ``decomposition``.
    """

    scheme: Optional[SchemeReport]
    values_in_v2: Decomposition
    transformed: Optional[TDVF]
    decomposition: Optional[Decomposition]
    target_closed: bool
    verdict: bool
    failed_stage: Optional[str] = None
    message: str = ""

    @property
    def coefficients(self) -> Optional[Tuple[TimeExpr, ...]]:
        if self.decomposition is None:
            return None
        return self.decomposition.coefficients


def certify_quasi_lie(
    X: TDVF,
    W: FieldSpace,
    V2: FieldSpace,
    transform: ScalingTransform,
    target: FieldSpace,
    interval: Sequence[float] = DEFAULT_INTERVAL,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    tolerance: float = DEFAULT_SAMPLE_TOLERANCE,
) -> QuasiLieCertificate:
    """
    Check that X takes values in V2, that S(W, V2) is a quasi-Lie scheme and
    that the transformed system decomposes on the bracket-closed target.

    Failures are reported in the certificate, never raised.
    """
    with PerformanceLogger("certify_quasi_lie", logger):
        target_closed = StructureConstants.of_basis(target) is not None
        in_v2 = decompose_onto_basis(X, V2, interval, sample_count, tolerance)

        scheme: Optional[SchemeReport] = None
        scheme_message = ""
        try:
            scheme = check_scheme(W, V2)
        except SchemeError as e:
            scheme_message = e.message

        transformed = push_forward(X, transform, interval, sample_count)
        decomposition = decompose_onto_basis(transformed, target, interval, sample_count, tolerance)

    stages = [
        ("target", target_closed, "target basis is not bracket-closed"),
        ("values_in_v2", in_v2.succeeded, "system does not take values in V2"),
        ("scheme", scheme is not None and scheme.is_scheme, scheme_message or "scheme conditions fail"),
        ("decomposition", decomposition.succeeded, "transformed system does not decompose on the target"),
    ]
    failed = next(((stage, msg) for stage, ok, msg in stages if not ok), None)
    certificate = QuasiLieCertificate(
        scheme=scheme,
        values_in_v2=in_v2,
        transformed=transformed,
        decomposition=decomposition,
        target_closed=target_closed,
        verdict=failed is None,
        failed_stage=failed[0] if failed else None,
        message=failed[1] if failed else "quasi-Lie system",
    )
    logger.info(f"Quasi-Lie certificate verdict={certificate.verdict} ({certificate.message})")
    return certificate


def transform_solution(
    traj: Trajectory,
    transform: ScalingTransform,
    direction: Direction = Direction.FORWARD,
) -> Trajectory:
    """
    Map a trajectory pointwise through the scaling (or its inverse).

    Node derivatives follow the product rule (g z)' = g' z + g z'.

    Raises:
        VariableMismatchError: If the variables differ
        TimeDomainError: If a factor vanishes at a node
    """
    if traj.variables != transform.variables:
        raise VariableMismatchError(transform.variables, traj.variables)
    active = transform if Direction(direction) == Direction.FORWARD else transform.inverse()
    states, derivatives = [], []
    for t, y, dy in zip(traj.times, traj.states, traj.derivatives):
        g = active.factor_values(t)
        if np.any(np.abs(g) < _VANISHING):
            raise TimeDomainError(f"Scaling factor vanishes at t={t}", t=float(t))
        dg = active.factor_derivatives(t)
        states.append(g * y)
        derivatives.append(dg * y + g * dy)
    return Trajectory(
        traj.variables, traj.times, states, derivatives,
        traj.status, traj.t_event, traj.rejected_steps,
    )
