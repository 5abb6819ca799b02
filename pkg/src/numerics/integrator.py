"""
Adaptive Dormand-Prince 5(4) integration for quasilie.

Steps are controlled with a PI controller on the embedded error estimate.
States whose monitored max-norm exceeds the blow-up threshold stop the run;
the crossing is then localized by bisection on the last step, so movable
poles of Riccati-type equations are reported instead of crashing.
"""

import asyncio
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import AnalysisConfig
from ..errors import ConfigurationError, LengthMismatchError, TimeDomainError
from ..logging_config import PerformanceLogger, get_logger
from ..systems.tdvf import TDVF
from .trajectory import Trajectory, TrajectoryStatus


logger = get_logger(__name__)

RHS = Callable[[float, np.ndarray], np.ndarray]

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# fifth-order minus embedded fourth-order weights
_E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
])

_SAFETY = 0.9
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_FAC_MIN = 0.2
_FAC_MAX = 10.0


@dataclass(frozen=True)
class IvpConfig:
    """
    Integration settings.

    Attributes:
        rtol: Relative tolerance
        atol: Absolute tolerance
        max_step: Largest allowed step
        blowup_threshold: Max-norm above which the solution is declared blown up
        max_steps: Largest number of attempted steps
        event_width: Width to which a blow-up crossing is bisected
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 1e-3
    blowup_threshold: float = 1e6
    max_steps: int = 500_000
    event_width: float = 1e-6

    @classmethod
    def from_config(cls, config: AnalysisConfig, **overrides) -> "IvpConfig":
        values = dict(
            rtol=config.rtol,
            atol=config.atol,
            max_step=config.max_step,
            blowup_threshold=config.blowup_threshold,
            max_steps=config.max_steps,
        )
        values.update(overrides)
        return cls(**values)

    def validate(self) -> None:
        """
        Raises:
            ConfigurationError: If a setting is out of range
        """
        if self.rtol <= 0 or self.atol <= 0:
            raise ConfigurationError("Tolerances must be positive")
        if self.blowup_threshold <= 1:
            raise ConfigurationError("Blow-up threshold must exceed 1")
        if self.max_step <= 0 or self.event_width <= 0:
            raise ConfigurationError("max_step and event_width must be positive")
        if self.max_steps < 1:
            raise ConfigurationError("max_steps must be at least 1")


class _StepFailed(Exception):
    pass


def _safe_rhs(rhs: RHS, t: float, y: np.ndarray) -> np.ndarray:
    try:
        value = np.asarray(rhs(t, y), dtype=float)
    except (TimeDomainError, OverflowError, ZeroDivisionError, ValueError) as e:
        raise _StepFailed(str(e)) from e
    if not np.all(np.isfinite(value)):
        raise _StepFailed(f"non-finite right-hand side at t={t}")
    return value


def _dopri_step(
    rhs: RHS, t: float, y: np.ndarray, f0: np.ndarray, h: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One Dormand-Prince step: (y_new, error vector, f(t+h, y_new))."""
    k = [f0]
    for stage in range(1, 7):
        increment = sum(a * kk for a, kk in zip(_A[stage], k))
        k.append(_safe_rhs(rhs, t + _C[stage] * h, y + h * increment))
    # stage 7 is evaluated at the fifth-order solution (FSAL)
    y_new = y + h * sum(b * kk for b, kk in zip(_B, k[:6]))
    error = h * sum(e * kk for e, kk in zip(_E, k))
    return y_new, error, k[6]


def _error_norm(error: np.ndarray, y: np.ndarray, y_new: np.ndarray, cfg: IvpConfig) -> float:
    scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((error / scale) ** 2)))


def _initial_step(rhs: RHS, t0: float, y0: np.ndarray, f0: np.ndarray, cfg: IvpConfig, span: float) -> float:
    scale = cfg.atol + cfg.rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, cfg.max_step, span)
    try:
        f1 = _safe_rhs(rhs, t0 + h0, y0 + h0 * f0)
    except _StepFailed:
        return min(1e-6, span)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, cfg.max_step, span)


def _monitored_norm(y: np.ndarray, monitor: Optional[Sequence[int]]) -> float:
    values = y if monitor is None else y[list(monitor)]
    return float(np.max(np.abs(values))) if len(values) else 0.0


def _localize_blowup(
    rhs: RHS,
    t: float,
    y: np.ndarray,
    f: np.ndarray,
    h: float,
    above: Tuple[np.ndarray, np.ndarray],
    cfg: IvpConfig,
    monitor: Optional[Sequence[int]],
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Bisect the step [t, t+h] down to the first threshold crossing.

    ``above`` is the (state, derivative) pair at t+h, known to exceed the
    threshold. Returns the upper end of the final bracket with its state.
    """
    lo, hi = 0.0, h
    y_hi, f_hi = above
    while hi - lo > cfg.event_width:
        mid = 0.5 * (lo + hi)
        try:
            y_mid, _, f_mid = _dopri_step(rhs, t, y, f, mid)
        except _StepFailed:
            lo = mid
            continue
        if _monitored_norm(y_mid, monitor) > cfg.blowup_threshold:
            hi, y_hi, f_hi = mid, y_mid, f_mid
        else:
            lo = mid
    return t + hi, y_hi, f_hi


def _resolve(system: Union[TDVF, RHS], variables: Optional[Sequence[str]]) -> Tuple[RHS, Tuple[str, ...]]:
    if isinstance(system, TDVF):
        return system.compile(), system.variables
    if variables is None:
        raise ConfigurationError("A plain right-hand side needs an explicit variable list")
    return system, tuple(variables)


def solve_ivp(
    system: Union[TDVF, RHS],
    ic: Sequence[float],
    t0: float,
    t1: float,
    cfg: Optional[IvpConfig] = None,
    variables: Optional[Sequence[str]] = None,
    monitor: Optional[Sequence[int]] = None,
) -> Trajectory:
    """
    Integrate y' = X(t, y) from t0 to t1.

    Args:
        system: TDVF, or a compiled right-hand side f(t, y) with ``variables``
        ic: Initial state at t0
        t0: Start time
        t1: End time, t1 > t0
        cfg: Integration settings (defaults if omitted)
        variables: Variable names for a plain right-hand side
        monitor: Component indices checked against the blow-up threshold
            (all components by default)

    Returns:
        Trajectory whose status is completed, blew_up or step_failure.
        Step underflow is reported as a status, not raised.

    Raises:
        LengthMismatchError: If the initial state has the wrong dimension
        ConfigurationError: If t0 >= t1 or the settings are invalid
    """
    cfg = cfg or IvpConfig()
    cfg.validate()
    rhs, names = _resolve(system, variables)
    y = np.array(ic, dtype=float)
    if y.shape != (len(names),):
        raise LengthMismatchError(f"Initial state of length {y.size} for variables {list(names)}")
    if not t0 < t1:
        raise ConfigurationError(f"Integration span needs t0 < t1, got [{t0}, {t1}]")

    t = float(t0)
    try:
        f = _safe_rhs(rhs, t, y)
    except _StepFailed as e:
        logger.warning(f"Right-hand side undefined at the initial time: {e}")
        return Trajectory(names, [t], [y], [np.zeros_like(y)], TrajectoryStatus.STEP_FAILURE, t)

    times: List[float] = [t]
    states: List[np.ndarray] = [y]
    derivatives: List[np.ndarray] = [f]
    status, t_event = TrajectoryStatus.COMPLETED, None
    h = _initial_step(rhs, t, y, f, cfg, t1 - t0)
    err_old = 1e-4
    rejected = 0
    steps = 0

    while t < t1:
        if steps >= cfg.max_steps:
            status, t_event = TrajectoryStatus.STEP_FAILURE, t
            logger.warning(f"Step budget of {cfg.max_steps} exhausted at t={t}")
            break
        steps += 1
        h = min(h, cfg.max_step, t1 - t)
        if h <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
            status, t_event = TrajectoryStatus.STEP_FAILURE, t
            logger.warning(f"Step size underflow at t={t}")
            break

        try:
            y_new, error, f_new = _dopri_step(rhs, t, y, f, h)
            err = _error_norm(error, y, y_new, cfg)
            if not np.isfinite(err) or not np.all(np.isfinite(y_new)):
                raise _StepFailed("non-finite step")
        except _StepFailed:
            rejected += 1
            h *= _FAC_MIN
            continue

        if err > 1.0:
            rejected += 1
            h *= max(_FAC_MIN, _SAFETY * err ** (-_ALPHA))
            continue

        if _monitored_norm(y_new, monitor) > cfg.blowup_threshold:
            t_hit, y_hit, f_hit = _localize_blowup(
                rhs, t, y, f, h, (y_new, f_new), cfg, monitor
            )
            times.append(t_hit)
            states.append(y_hit)
            derivatives.append(f_hit)
            status, t_event = TrajectoryStatus.BLEW_UP, t_hit
            logger.info(f"Solution blew up near t={t_hit:.9g}")
            break

        t_next = t1 if t1 - (t + h) <= 1e-14 * max(1.0, abs(t1)) else t + h
        t, y, f = t_next, y_new, f_new
        times.append(t)
        states.append(y)
        derivatives.append(f)

        err = max(err, 1e-10)
        fac = _SAFETY * err ** (-_ALPHA) * err_old ** _BETA
        h *= min(_FAC_MAX, max(_FAC_MIN, fac))
        err_old = err

    logger.debug(
        f"Integrated {len(times)} nodes on [{t0}, {times[-1]}] "
        f"({rejected} rejected), status={status.value}"
    )
    return Trajectory(names, times, states, derivatives, status, t_event, rejected)


async def solve_batch(
    system: Union[TDVF, RHS],
    ics: Sequence[Sequence[float]],
    t0: float,
    t1: float,
    cfg: Optional[IvpConfig] = None,
    variables: Optional[Sequence[str]] = None,
    monitor: Optional[Sequence[int]] = None,
) -> List[Trajectory]:
    """
    Integrate several initial conditions concurrently.

    Each run happens in a worker thread; results keep the order of ``ics``.
    """
    rhs, names = _resolve(system, variables)
    async with PerformanceLogger("solve_batch", logger) as perf:
        results = await asyncio.gather(
            *(
                asyncio.to_thread(solve_ivp, rhs, ic, t0, t1, cfg, names, monitor)
                for ic in ics
            )
        )
        perf.set_metrics(runs=len(results))
    return list(results)


def residual(
    traj: Trajectory,
    system: Union[TDVF, RHS],
    sample_count: int = 1000,
    step: float = 1e-6,
) -> float:
    """
    Max-norm of d/dt(dense output) - X(t, dense output) at equispaced samples.

    The derivative is a central finite difference of the dense output.
    """
    rhs = system.compile() if isinstance(system, TDVF) else system
    if len(traj.times) < 2:
        return 0.0
    a, b = traj.t_start, traj.t_end
    width = b - a
    step = min(step, 0.25 * width / sample_count)
    worst = 0.0
    for k in range(sample_count):
        t = a + (k + 0.5) * width / sample_count
        y, _ = traj.dense_eval(t)
        forward, _ = traj.dense_eval(t + step)
        backward, _ = traj.dense_eval(t - step)
        derivative = (forward - backward) / (2 * step)
        worst = max(worst, float(np.max(np.abs(derivative - rhs(t, y)))))
    return worst
