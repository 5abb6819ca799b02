"""Numerical integration and trajectories for quasilie."""

from .trajectory import Trajectory, TrajectoryStatus, dense_eval
from .integrator import IvpConfig, residual, solve_batch, solve_ivp
from .trajectory_io import (
    format_trajectory_csv,
    parse_trajectory_csv,
    read_trajectory_csv,
    write_trajectory_csv,
)
from .sampling import LCG, SampledSolutions, sample_solutions

__all__ = [
    'Trajectory',
    'TrajectoryStatus',
    'dense_eval',
    'IvpConfig',
    'residual',
    'solve_batch',
    'solve_ivp',
    'format_trajectory_csv',
    'parse_trajectory_csv',
    'read_trajectory_csv',
    'write_trajectory_csv',
    'LCG',
    'SampledSolutions',
    'sample_solutions',
]
