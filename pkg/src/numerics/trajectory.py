"""
Trajectories with cubic Hermite dense output for quasilie.

A ``Trajectory`` stores strictly increasing time nodes with the state and
its time derivative at every node. Between nodes the state is the cubic
Hermite interpolant of the two neighbouring (state, derivative) pairs, so
dense evaluation reproduces node states exactly and its derivative at a node
equals the stored right-hand side.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import LengthMismatchError, OutOfRangeError


class TrajectoryStatus(str, Enum):
    """How an integration ended."""

    COMPLETED = "completed"
    BLEW_UP = "blew_up"
    STEP_FAILURE = "step_failure"


def _frozen(values, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float)
    if ndim == 2 and array.ndim == 1:
        array = array.reshape(-1, 1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Immutable sampled solution curve.

    Attributes:
        variables: State variable names
        times: Strictly increasing node times, shape (N,)
        states: States at the nodes, shape (N, n)
        derivatives: Time derivatives at the nodes, shape (N, n)
        status: Completed, blew up or step failure
        t_event: Blow-up time or failing time for the non-completed statuses
        rejected_steps: Number of rejected integrator steps
    """

    variables: Tuple[str, ...]
    times: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    status: TrajectoryStatus = TrajectoryStatus.COMPLETED
    t_event: Optional[float] = None
    rejected_steps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "times", _frozen(self.times, 1))
        object.__setattr__(self, "states", _frozen(self.states, 2))
        object.__setattr__(self, "derivatives", _frozen(self.derivatives, 2))
        n_nodes, n = len(self.times), len(self.variables)
        if n_nodes == 0:
            raise LengthMismatchError("A trajectory needs at least one node")
        if self.states.shape != (n_nodes, n) or self.derivatives.shape != (n_nodes, n):
            raise LengthMismatchError(
                f"States {self.states.shape} / derivatives {self.derivatives.shape} "
                f"do not match {n_nodes} nodes of {n} variables"
            )
        if n_nodes > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("Trajectory times must be strictly increasing")

    @classmethod
    def from_samples(
        cls,
        variables: Sequence[str],
        times: Sequence[float],
        states: Sequence[Sequence[float]],
        derivatives: Optional[Sequence[Sequence[float]]] = None,
    ) -> "Trajectory":
        """
        Build a trajectory from node samples.

        Missing derivatives are estimated with second-order finite
        differences of the samples.
        """
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=float).reshape(len(times), len(variables))
        if derivatives is None:
            if len(times) > 2:
                derivatives = np.gradient(states, times, axis=0, edge_order=2)
            elif len(times) == 2:
                slope = (states[1] - states[0]) / (times[1] - times[0])
                derivatives = np.vstack([slope, slope])
            else:
                derivatives = np.zeros_like(states)
        return cls(tuple(variables), times, states, derivatives)

    # Inspection -----------------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def completed(self) -> bool:
        return self.status == TrajectoryStatus.COMPLETED

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def covers(self, a: float, b: float, slack: float = 1e-12) -> bool:
        return self.t_start - slack <= a and b <= self.t_end + slack

    def index_of(self, name: str) -> int:
        return self.variables.index(name)

    # Dense output ---------------------------------------------------------

    def dense_eval(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Cubic Hermite value and derivative at time t.

        Raises:
            OutOfRangeError: If t lies outside the covered range
        """
        t = float(t)
        slack = 1e-12 * max(1.0, abs(self.t_start), abs(self.t_end))
        if t < self.t_start - slack or t > self.t_end + slack:
            raise OutOfRangeError(
                f"t={t} is outside the trajectory range [{self.t_start}, {self.t_end}]",
                t=t,
            )
        k = int(np.searchsorted(self.times, t))
        if k < len(self.times) and self.times[k] == t:
            return self.states[k].copy(), self.derivatives[k].copy()
        if len(self.times) == 1:
            return self.states[0].copy(), self.derivatives[0].copy()
        k = min(max(k, 1), len(self.times) - 1)
        t0, t1 = self.times[k - 1], self.times[k]
        y0, y1 = self.states[k - 1], self.states[k]
        f0, f1 = self.derivatives[k - 1], self.derivatives[k]
        h = t1 - t0
        s = (t - t0) / h
        s2, s3 = s * s, s * s * s
        value = (
            (2 * s3 - 3 * s2 + 1) * y0
            + (s3 - 2 * s2 + s) * h * f0
            + (-2 * s3 + 3 * s2) * y1
            + (s3 - s2) * h * f1
        )
        slope = (
            (6 * s2 - 6 * s) * y0
            + (3 * s2 - 4 * s + 1) * h * f0
            + (-6 * s2 + 6 * s) * y1
            + (3 * s2 - 2 * s) * h * f1
        ) / h
        return value, slope

    def sample(self, times: Sequence[float]) -> np.ndarray:
        """Dense states at several times, shape (len(times), n)."""
        return np.array([self.dense_eval(t)[0] for t in times])

    def summary(self) -> Dict[str, object]:
        return {
            "variables": list(self.variables),
            "nodes": len(self.times),
            "t_start": self.t_start,
            "t_end": self.t_end,
            "status": self.status.value,
            "t_event": self.t_event,
            "final_state": [float(v) for v in self.final_state],
        }

    def rows(self) -> List[List[float]]:
        return [[float(t), *map(float, y)] for t, y in zip(self.times, self.states)]


def dense_eval(traj: Trajectory, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Module-level form of :meth:`Trajectory.dense_eval`."""
    return traj.dense_eval(t)
