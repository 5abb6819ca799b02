"""
Companion linearization of the g, h, j family for quasilie.

Along a particular solution x(t) of

    x'' + 3 x x' + x^3 + g (x' + x^2) + h x + j = 0

the scalar w with w' = x w and w(t0) = 1 satisfies the linear equation
w''' + g w'' + h w' + j w = 0, where w'' = (x' + x^2) w. Three generic
particular solutions therefore give a fundamental system, and every other
solution is x = W'/W with W = c1 w1 + c2 w2 + c3 w3; the constants are
fixed by the initial condition up to a common scale.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import BlowUpError, IntegrationError, LengthMismatchError, NonGenericError, OutOfRangeError
from ..logging_config import get_logger
from ..numerics.integrator import IvpConfig, residual, solve_ivp
from ..numerics.trajectory import Trajectory
from ..systems.families import GHJFamily
from ..systems.tdvf import lift_sode


logger = get_logger(__name__)

DEFAULT_GENERICITY_THRESHOLD = 1e-8
DEFAULT_COMPANION_CONFIG = IvpConfig(max_step=1e-3)
SOLUTION_RESIDUAL_LIMIT = 1e-6


@dataclass(frozen=True)
class CompanionLift:
    """
    A particular solution (x, v) together with its companion scalar w.

    ``w`` is a trajectory over the single variable ``w`` whose node
    derivatives are x w.
    """

    solution: Trajectory
    w: Trajectory
    t0: float

    def values(self, t: float) -> Tuple[float, float, float, float]:
        """(w, w', w'', w''') at t."""
        (x, v), (_, dv) = self.solution.dense_eval(t)
        w = float(self.w.dense_eval(t)[0][0])
        w1 = x * w
        w2 = (v + x * x) * w
        w3 = (dv + 2 * x * v) * w + (v + x * x) * w1
        return w, w1, w2, w3

    def vector(self, t: float) -> np.ndarray:
        """Companion vector (w, w', w'') at t."""
        return np.array(self.values(t)[:3])


def _integrate_w(
    x_of_t, start: float, stop: float, cfg: IvpConfig, sign: float
) -> Trajectory:
    def rhs(tau: float, y: np.ndarray) -> np.ndarray:
        return sign * x_of_t(sign * tau) * y

    return solve_ivp(rhs, [1.0], sign * start, sign * stop, cfg, variables=("w",))


def companion_lift(
    eq: Optional[GHJFamily],
    sol: Trajectory,
    t0: float,
    cfg: Optional[IvpConfig] = None,
) -> CompanionLift:
    """
    Integrate w' = x(t) w with w(t0) = 1 along the dense output of ``sol``.

    Args:
        eq: Family the solution is checked against (skipped when None)
        sol: Particular solution over (x, v)
        t0: Normalization time inside the solution's range
        cfg: Integration settings for w

    Raises:
        BlowUpError: If the solution has a pole in its range
        OutOfRangeError: If t0 lies outside the solution's range
        IntegrationError: If the solution does not solve ``eq`` or w cannot
            be integrated
    """
    if not sol.completed:
        raise BlowUpError(
            f"Particular solution ended with {sol.status.value} at t={sol.t_event}",
            t_event=sol.t_event,
        )
    if sol.dimension != 2:
        raise LengthMismatchError(f"Companion lift needs (x, v) solutions, got {list(sol.variables)}")
    if not sol.covers(t0, t0):
        raise OutOfRangeError(f"t0={t0} is outside [{sol.t_start}, {sol.t_end}]", t=t0)
    if eq is not None:
        worst = residual(sol, lift_sode(eq.sode()), sample_count=200)
        if worst > SOLUTION_RESIDUAL_LIMIT:
            raise IntegrationError(
                f"Particular solution does not solve the family (residual {worst:.3g})",
                residual=worst,
            )

    cfg = cfg or DEFAULT_COMPANION_CONFIG

    def x_of_t(t: float) -> float:
        return float(sol.dense_eval(t)[0][0])

    pieces_t: List[np.ndarray] = []
    pieces_w: List[np.ndarray] = []
    pieces_dw: List[np.ndarray] = []
    if t0 > sol.t_start:
        back = _integrate_w(x_of_t, t0, sol.t_start, cfg, -1.0)
        if not back.completed:
            raise IntegrationError(f"Companion integration failed at t={-back.t_event}")
        pieces_t.append(-back.times[::-1])
        pieces_w.append(back.states[::-1])
        pieces_dw.append(-back.derivatives[::-1])
    if t0 < sol.t_end:
        forward = _integrate_w(x_of_t, t0, sol.t_end, cfg, 1.0)
        if not forward.completed:
            raise IntegrationError(f"Companion integration failed at t={forward.t_event}")
        skip = 1 if pieces_t else 0
        pieces_t.append(forward.times[skip:])
        pieces_w.append(forward.states[skip:])
        pieces_dw.append(forward.derivatives[skip:])
    if not pieces_t:
        pieces_t.append(np.array([t0]))
        pieces_w.append(np.array([[1.0]]))
        pieces_dw.append(np.array([[x_of_t(t0)]]))

    w = Trajectory(
        ("w",),
        np.concatenate(pieces_t),
        np.concatenate(pieces_w),
        np.concatenate(pieces_dw),
    )
    return CompanionLift(sol, w, float(t0))


@dataclass(frozen=True)
class SuperpositionConstants:
    """
    Constants c of W = sum c_i w_i, defined up to scale.

    ``c`` is normalized so that its first nonzero entry is 1.
    """

    c: Tuple[float, float, float]

    @classmethod
    def normalized(cls, values: Sequence[float]) -> "SuperpositionConstants":
        values = np.asarray(values, dtype=float)
        nonzero = np.flatnonzero(values)
        if len(nonzero) == 0:
            raise NonGenericError("Superposition constants are all zero", determinant=0.0)
        return cls(tuple(float(v) for v in values / values[nonzero[0]]))

    @property
    def k_chart(self) -> Optional[Tuple[float, float]]:
        """(k1, k2) = (c2/c1, c3/c1) when c1 is nonzero."""
        if self.c[0] == 0:
            return None
        return (self.c[1] / self.c[0], self.c[2] / self.c[0])

    def scaled(self, factor: float) -> Tuple[float, float, float]:
        return tuple(factor * v for v in self.c)


@dataclass(frozen=True)
class CompanionBasis:
    """
    Three companion lifts normalized at t0 with their initial matrix.

    ``matrix`` has rows (w_i, w_i', w_i'')(t0) = (1, x_i(t0), v_i(t0) + x_i(t0)^2).
    """

    t0: float
    lifts: Tuple[CompanionLift, CompanionLift, CompanionLift]
    matrix: np.ndarray
    determinant: float

    @classmethod
    def build(
        cls,
        solutions: Sequence[Trajectory],
        t0: float,
        eq: Optional[GHJFamily] = None,
        cfg: Optional[IvpConfig] = None,
        genericity_threshold: float = DEFAULT_GENERICITY_THRESHOLD,
    ) -> "CompanionBasis":
        """
        Raises:
            NonGenericError: If |det| of the initial matrix is at or below
                the genericity threshold
        """
        if len(solutions) != 3:
            raise LengthMismatchError(f"A companion basis needs 3 solutions, got {len(solutions)}")
        rows = []
        for sol in solutions:
            (x, v), _ = sol.dense_eval(t0)
            rows.append([1.0, x, v + x * x])
        matrix = np.array(rows)
        determinant = float(np.linalg.det(matrix))
        if not abs(determinant) > genericity_threshold:
            raise NonGenericError(
                f"Particular solutions are not generic at t0={t0}: |det| = {abs(determinant):.3g}",
                determinant=determinant,
            )
        lifts = tuple(companion_lift(eq, sol, t0, cfg) for sol in solutions)
        logger.debug(f"Companion basis at t0={t0} with det={determinant:.6g}")
        return cls(float(t0), lifts, matrix, determinant)

    def vectors(self, t: float) -> np.ndarray:
        """3x3 matrix whose rows are (w_i, w_i', w_i'')(t)."""
        return np.array([lift.vector(t) for lift in self.lifts])

    def t_range(self) -> Tuple[float, float]:
        starts = [lift.w.t_start for lift in self.lifts]
        ends = [lift.w.t_end for lift in self.lifts]
        return max(starts), min(ends)

    def companion_residual(self, family: GHJFamily, times: Sequence[float]) -> float:
        """Max |w''' + g w'' + h w' + j w| over the lifts and sample times."""
        worst = 0.0
        for lift in self.lifts:
            for t in times:
                w, w1, w2, w3 = lift.values(t)
                worst = max(worst, abs(family.companion_residual(t, w, w1, w2, w3)))
        return worst


def fit_constants(
    basis: CompanionBasis,
    target_ic: Sequence[float],
    t: Optional[float] = None,
    genericity_threshold: float = DEFAULT_GENERICITY_THRESHOLD,
) -> SuperpositionConstants:
    """
    Solve sum_i c_i (w_i, w_i', w_i'')(t) = (1, x0, v0 + x0^2) for c.

    Args:
        basis: Generic companion basis
        target_ic: (x0, v0) at time t
        t: Fitting time (the basis reference time by default)

    Raises:
        NonGenericError: If the companion matrix at t is singular
    """
    t = basis.t0 if t is None else float(t)
    x0, v0 = (float(value) for value in target_ic)
    matrix = basis.matrix if t == basis.t0 else basis.vectors(t)
    determinant = float(np.linalg.det(matrix))
    measure = abs(determinant)
    if t != basis.t0:
        # away from t0 the rows are not normalized; use the Hadamard ratio
        measure /= float(np.prod(np.linalg.norm(matrix, axis=1))) or 1.0
    if not measure > genericity_threshold:
        raise NonGenericError(
            f"Companion matrix is singular at t={t}: |det| = {abs(determinant):.3g}",
            determinant=determinant,
        )
    rhs = np.array([1.0, x0, v0 + x0 * x0])
    c = np.linalg.solve(matrix.T, rhs)
    return SuperpositionConstants.normalized(c)


@dataclass(frozen=True)
class SuperposedPoint:
    """Superposed state at t; ``pole`` marks a vanishing denominator."""

    t: float
    x: float
    v: float
    denominator: float
    pole: bool = False


POLE_TOLERANCE = 1e-12


def superpose_eval(
    basis: CompanionBasis, constants: SuperpositionConstants, t: float
) -> SuperposedPoint:
    """
    x = sum c_i w_i' / sum c_i w_i and v = sum c_i w_i'' / sum c_i w_i - x^2.

    A vanishing denominator is reported as a pole, not raised.
    """
    vectors = basis.vectors(t)
    c = np.array(constants.c)
    W, W1, W2 = c @ vectors
    size = float(np.abs(c) @ np.abs(vectors[:, 0]))
    if abs(W) <= POLE_TOLERANCE * max(1.0, size):
        logger.info(f"Superposed solution has a pole near t={t}")
        return SuperposedPoint(float(t), float("nan"), float("nan"), float(W), pole=True)
    x = W1 / W
    v = W2 / W - x * x
    return SuperposedPoint(float(t), float(x), float(v), float(W))


@dataclass(frozen=True)
class CompanionDependency:
    """Normalized null vector of four companion vectors and its relative residual."""

    coefficients: Tuple[float, float, float, float]
    residual: float


def companion_dependency(lifts: Sequence[CompanionLift], t: float) -> CompanionDependency:
    """
    Linear dependency among four companion vectors (w_i, w_i', w_i'')(t).

    Four solutions of a third-order linear equation are dependent with
    constant coefficients, so the normalized null vector does not depend on t.
    """
    if len(lifts) != 4:
        raise LengthMismatchError(f"Companion dependency needs 4 lifts, got {len(lifts)}")
    columns = np.array([lift.vector(t) for lift in lifts]).T  # 3 x 4
    _, _, vt = np.linalg.svd(columns)
    null = vt[-1]
    null = null / null[np.flatnonzero(np.abs(null) > 1e-14)[0]]
    scale = float(np.linalg.norm(columns)) or 1.0
    return CompanionDependency(
        tuple(float(v) for v in null),
        float(np.linalg.norm(columns @ null)) / scale,
    )
