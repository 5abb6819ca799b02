"""
Seeded generation of particular solutions for quasilie.

Initial conditions come from an explicitly specified linear congruential
generator (a = 1664525, c = 1013904223, m = 2^32) so that every run with the
same seed draws the same candidates on every platform. Candidates whose
integration blows up or fails inside the window are rejected.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from ..errors import IntegrationError
from ..logging_config import get_logger
from ..systems.tdvf import TDVF
from .integrator import RHS, IvpConfig, solve_batch
from .trajectory import Trajectory


logger = get_logger(__name__)

Box = Sequence[Tuple[float, float]]


class LCG:
    """x_{k+1} = (a x_k + c) mod m."""

    A = 1664525
    C = 1013904223
    M = 2 ** 32

    def __init__(self, seed: int):
        self.state = int(seed) % self.M

    def next_int(self) -> int:
        self.state = (self.A * self.state + self.C) % self.M
        return self.state

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        """Uniform float in [low, high)."""
        return low + (high - low) * self.next_int() / self.M

    def point(self, box: Box) -> List[float]:
        return [self.uniform(lo, hi) for lo, hi in box]


@dataclass
class SampledSolutions:
    """Accepted particular solutions with their initial conditions."""

    initial_conditions: List[List[float]] = field(default_factory=list)
    trajectories: List[Trajectory] = field(default_factory=list)
    rejected: int = 0


async def sample_solutions(
    system: Union[TDVF, RHS],
    count: int,
    t0: float,
    t1: float,
    box: Box,
    seed: Union[int, LCG],
    cfg: Optional[IvpConfig] = None,
    variables: Optional[Sequence[str]] = None,
    monitor: Optional[Sequence[int]] = None,
    max_attempts: int = 200,
) -> SampledSolutions:
    """
    Draw ``count`` pole-free particular solutions on [t0, t1].

    Candidates are integrated in batches of ``count``; accepted solutions keep
    the order in which their initial conditions were drawn.

    Raises:
        IntegrationError: If fewer than ``count`` candidates survive
            ``max_attempts`` draws
    """
    rng = seed if isinstance(seed, LCG) else LCG(seed)
    result = SampledSolutions()
    attempts = 0
    while len(result.trajectories) < count:
        if attempts >= max_attempts:
            raise IntegrationError(
                f"Only {len(result.trajectories)} of {count} sampled solutions are pole-free "
                f"after {attempts} attempts",
                attempts=attempts,
            )
        ics = [rng.point(box) for _ in range(count)]
        attempts += len(ics)
        trajectories = await solve_batch(system, ics, t0, t1, cfg, variables, monitor)
        for ic, traj in zip(ics, trajectories):
            if not traj.completed:
                result.rejected += 1
                logger.debug(f"Rejected candidate {ic}: {traj.status.value} at t={traj.t_event}")
                continue
            if len(result.trajectories) < count:
                result.initial_conditions.append(ic)
                result.trajectories.append(traj)
    logger.info(f"Sampled {count} particular solutions ({result.rejected} rejected)")
    return result
