"""
Superposition pipelines for quasilie.

``superpose`` and ``verify_superposition`` run companion lift, constant
fitting and superposed evaluation in working coordinates given by a
``ScaleChart`` (z = s(t) x, z' = s'(t) x + s(t) x'). The identity chart
serves the g, h, j family directly; the chart s = sqrt(a3) carries the
second-order Riccati equation into that family, which gives its
t-dependent superposition rule.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from ..errors import BlowUpError, OutOfRangeError
from ..logging_config import PerformanceLogger, get_logger
from ..numerics.integrator import IvpConfig
from ..numerics.trajectory import Trajectory
from ..systems.families import GHJFamily, Riccati2Spec, riccati2, riccati2_to_family
from ..systems.tdvf import SODE, lift_sode
from ..systems.time_expr import (
    DEFAULT_INTERVAL,
    TimeExpr,
    diff_time,
    eval_time,
)
from .companion import (
    DEFAULT_GENERICITY_THRESHOLD,
    CompanionBasis,
    SuperposedPoint,
    SuperpositionConstants,
    fit_constants,
    superpose_eval,
)


logger = get_logger(__name__)

DEVIATION_LIMIT = 1e-6
DRIFT_LIMIT = 1e-6
RESIDUAL_LIMIT = 1e-6


@dataclass(frozen=True)
class ScaleChart:
    """Working coordinates z = s x, z' = s' x + s x' for a scale s(t)."""

    s: TimeExpr = sympy.Integer(1)

    @classmethod
    def for_riccati2(cls, spec: Riccati2Spec) -> "ScaleChart":
        return cls(spec.scale)

    def is_identity(self) -> bool:
        return self.s == 1

    def _factors(self, t: float) -> Tuple[float, float, float]:
        ds = diff_time(self.s)
        return eval_time(self.s, t), eval_time(ds, t), eval_time(diff_time(ds), t)

    def to_working_state(self, t: float, x: float, v: float) -> Tuple[float, float]:
        if self.is_identity():
            return float(x), float(v)
        s, ds, _ = self._factors(t)
        return s * x, ds * x + s * v

    def from_working_state(self, t: float, z: float, zv: float) -> Tuple[float, float]:
        if self.is_identity():
            return float(z), float(zv)
        s, ds, _ = self._factors(t)
        x = z / s
        return x, (zv - ds * x) / s

    def to_working(self, traj: Trajectory) -> Trajectory:
        """Map an (x, v) trajectory node by node, derivatives included."""
        if self.is_identity():
            return traj
        states, derivatives = [], []
        for t, (x, v), (dx, dv) in zip(traj.times, traj.states, traj.derivatives):
            s, ds, dds = self._factors(t)
            states.append([s * x, ds * x + s * v])
            derivatives.append([ds * x + s * dx, dds * x + ds * dx + ds * v + s * dv])
        return Trajectory(
            traj.variables, traj.times, states, derivatives,
            traj.status, traj.t_event, traj.rejected_steps,
        )


IDENTITY_CHART = ScaleChart()


@dataclass(frozen=True)
class SuperposedCurve:
    """Superposed states (original coordinates) at the requested times."""

    basis: CompanionBasis
    constants: SuperpositionConstants
    chart: ScaleChart
    points: Tuple[SuperposedPoint, ...]

    @property
    def poles(self) -> List[float]:
        return [p.t for p in self.points if p.pole]

    def state(self, t: float) -> SuperposedPoint:
        return _evaluate(self.basis, self.constants, self.chart, t)


def _evaluate(
    basis: CompanionBasis, constants: SuperpositionConstants, chart: ScaleChart, t: float
) -> SuperposedPoint:
    point = superpose_eval(basis, constants, t)
    if point.pole or chart.is_identity():
        return point
    x, v = chart.from_working_state(t, point.x, point.v)
    return SuperposedPoint(point.t, x, v, point.denominator)


def _check_solutions(solutions: Sequence[Trajectory], a: float, b: float) -> None:
    for k, sol in enumerate(solutions):
        if not sol.completed:
            raise BlowUpError(
                f"Solution {k} ended with {sol.status.value} at t={sol.t_event}",
                t_event=sol.t_event,
            )
        if not sol.covers(a, b):
            raise OutOfRangeError(
                f"Solution {k} covers [{sol.t_start}, {sol.t_end}], not [{a}, {b}]"
            )


def superpose(
    solutions: Sequence[Trajectory],
    target_ic: Sequence[float],
    t0: float,
    t_eval: Sequence[float],
    chart: ScaleChart = IDENTITY_CHART,
    family: Optional[GHJFamily] = None,
    cfg: Optional[IvpConfig] = None,
    genericity_threshold: float = DEFAULT_GENERICITY_THRESHOLD,
) -> SuperposedCurve:
    """
    Superposed solution with initial condition ``target_ic`` at t0.

    Args:
        solutions: Three particular solutions over (x, v)
        target_ic: (x0, v0) at t0 in original coordinates
        t0: Reference time
        t_eval: Evaluation times
        chart: Working coordinates
        family: Working-coordinate family the solutions are checked against
    """
    _check_solutions(solutions, t0, t0)
    working = [chart.to_working(sol) for sol in solutions]
    basis = CompanionBasis.build(working, t0, family, cfg, genericity_threshold)
    constants = fit_constants(basis, chart.to_working_state(t0, *target_ic))
    points = tuple(_evaluate(basis, constants, chart, t) for t in t_eval)
    curve = SuperposedCurve(basis, constants, chart, points)
    if curve.poles:
        logger.info(f"Superposed solution has poles near {curve.poles}")
    return curve


def superpose_riccati2_general(
    spec: Riccati2Spec,
    solutions: Sequence[Trajectory],
    target_ic: Sequence[float],
    t0: float,
    t_eval: Sequence[float],
    use_scaling: bool = True,
    validate: bool = True,
    interval: Sequence[float] = DEFAULT_INTERVAL,
    cfg: Optional[IvpConfig] = None,
    genericity_threshold: float = DEFAULT_GENERICITY_THRESHOLD,
) -> SuperposedCurve:
    """
    t-dependent superposition for the second-order Riccati equation.

    The particular solutions are scaled to z = sqrt(a3) x, superposed with
    the g, h, j machinery and scaled back. ``use_scaling=False`` skips the
    scaling, which does not give a valid rule unless a3 is constant.

    Raises:
        ConstraintViolationError: If ``validate`` and the coefficients break
            the Riccati constraints
    """
    if validate:
        spec.validate(interval)
    chart = ScaleChart.for_riccati2(spec) if use_scaling else IDENTITY_CHART
    return superpose(
        solutions, target_ic, t0, t_eval, chart, None, cfg, genericity_threshold
    )


@dataclass
class SuperpositionReport:
    """Outcome of :func:`verify_superposition`."""

    t0: float
    window: Tuple[float, float]
    constants: Tuple[float, float, float]
    k_chart: Optional[Tuple[float, float]]
    determinant: float
    deviation: float
    residual: float
    constant_drift: float
    refit_times: List[float] = field(default_factory=list)
    refit_constants: List[Tuple[float, float, float]] = field(default_factory=list)
    companion_residual: Optional[float] = None
    poles: List[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            not self.poles
            and self.deviation < DEVIATION_LIMIT
            and self.constant_drift < DRIFT_LIMIT
            and self.residual < RESIDUAL_LIMIT
        )


def _as_sode(eq: Union[SODE, GHJFamily]) -> SODE:
    return eq.sode() if isinstance(eq, GHJFamily) else eq


def verify_superposition(
    eq: Union[SODE, GHJFamily],
    solutions: Sequence[Trajectory],
    target_traj: Trajectory,
    t0: float,
    window: Sequence[float],
    chart: ScaleChart = IDENTITY_CHART,
    working_family: Optional[GHJFamily] = None,
    samples: int = 200,
    refits: int = 10,
    companion_samples: int = 500,
    cfg: Optional[IvpConfig] = None,
    genericity_threshold: float = DEFAULT_GENERICITY_THRESHOLD,
) -> SuperpositionReport:
    """
    Fit constants at t0 from the target's state and compare the superposed
    curve with the target across the window.

    Reports the sup-norm deviation, the ODE residual of the superposed curve
    (against ``eq``), the companion residual (when the working family is
    known) and the drift of the normalized constants refitted at ``refits``
    interior times.

    Raises:
        NonGenericError: If the particular solutions are not generic at t0
        OutOfRangeError: If a trajectory does not cover the window
        BlowUpError: If a trajectory is not pole-free
    """
    a, b = float(window[0]), float(window[1])
    _check_solutions(list(solutions) + [target_traj], min(a, t0), max(b, t0))
    if working_family is None and isinstance(eq, GHJFamily) and chart.is_identity():
        working_family = eq
    rhs = lift_sode(_as_sode(eq)).compile()

    with PerformanceLogger("verify_superposition", logger) as perf:
        working = [chart.to_working(sol) for sol in solutions]
        basis = CompanionBasis.build(working, t0, working_family, cfg, genericity_threshold)
        (x0, v0), _ = target_traj.dense_eval(t0)
        constants = fit_constants(basis, chart.to_working_state(t0, x0, v0))

        deviation, poles = 0.0, []
        for t in np.linspace(a, b, samples):
            point = _evaluate(basis, constants, chart, t)
            if point.pole:
                poles.append(float(t))
                continue
            target, _ = target_traj.dense_eval(t)
            deviation = max(deviation, abs(point.x - target[0]), abs(point.v - target[1]))

        step = min(1e-6, 0.25 * (b - a) / samples)
        worst_residual = 0.0
        for k in range(samples):
            t = a + (k + 0.5) * (b - a) / samples
            center = _evaluate(basis, constants, chart, t)
            ahead = _evaluate(basis, constants, chart, t + step)
            behind = _evaluate(basis, constants, chart, t - step)
            if center.pole or ahead.pole or behind.pole:
                continue
            derivative = np.array([ahead.x - behind.x, ahead.v - behind.v]) / (2 * step)
            expected = rhs(t, np.array([center.x, center.v]))
            worst_residual = max(worst_residual, float(np.max(np.abs(derivative - expected))))

        refit_times = [a + (k + 1) * (b - a) / (refits + 1) for k in range(refits)]
        refit_constants, drift = [], 0.0
        reference = np.array(constants.c)
        for tau in refit_times:
            (x, v), _ = target_traj.dense_eval(tau)
            refit = fit_constants(basis, chart.to_working_state(tau, x, v), t=tau)
            refit_constants.append(refit.c)
            drift = max(drift, float(np.max(np.abs(np.array(refit.c) - reference))))

        companion_residual = None
        if working_family is not None:
            lo, hi = basis.t_range()
            times = np.linspace(max(lo, a), min(hi, b), companion_samples)
            companion_residual = basis.companion_residual(working_family, times)

        perf.set_metrics(deviation=deviation, drift=drift, residual=worst_residual)

    report = SuperpositionReport(
        t0=float(t0),
        window=(a, b),
        constants=constants.c,
        k_chart=constants.k_chart,
        determinant=basis.determinant,
        deviation=deviation,
        residual=worst_residual,
        constant_drift=drift,
        refit_times=refit_times,
        refit_constants=refit_constants,
        companion_residual=companion_residual,
        poles=poles,
    )
    logger.info(
        f"Superposition check: deviation={deviation:.3g}, drift={drift:.3g}, "
        f"residual={worst_residual:.3g}, passed={report.passed}"
    )
    return report


def verify_riccati2_superposition(
    spec: Riccati2Spec,
    solutions: Sequence[Trajectory],
    target_traj: Trajectory,
    t0: float,
    window: Sequence[float],
    use_scaling: bool = True,
    **kwargs,
) -> SuperpositionReport:
    """:func:`verify_superposition` for the second-order Riccati equation."""
    chart = ScaleChart.for_riccati2(spec) if use_scaling else IDENTITY_CHART
    family = riccati2_to_family(spec) if use_scaling else None
    return verify_superposition(
        riccati2(spec, validate=False), solutions, target_traj, t0, window,
        chart=chart, working_family=family, **kwargs,
    )
