"""
CSV import and export of trajectories for quasilie.

The format is a header ``t,<var1>,...,<varK>`` followed by one row per node.
Values are written with ``repr`` so a written file reads back bit-exactly.
Node derivatives are not stored; on import they are recomputed from a
supplied system, or estimated by finite differences without one.
"""

import csv
import io
from pathlib import Path
from typing import Callable, Optional, Union

import aiofiles
import numpy as np

from ..errors import ParseError
from ..logging_config import get_logger
from .trajectory import Trajectory


logger = get_logger(__name__)

RHS = Callable[[float, np.ndarray], np.ndarray]


def format_trajectory_csv(traj: Trajectory) -> str:
    """Render a trajectory as CSV text."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", *traj.variables])
    for row in traj.rows():
        writer.writerow([repr(v) for v in row])
    return buffer.getvalue()


def parse_trajectory_csv(
    text: str, rhs: Optional[RHS] = None, source: Optional[str] = None
) -> Trajectory:
    """
    Parse CSV text into a trajectory.

    Args:
        text: CSV content with a ``t,<vars>`` header
        rhs: Optional right-hand side used to recompute node derivatives
        source: File name used in error messages

    Raises:
        ParseError: On a malformed header, row or time column
    """
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise ParseError("Empty trajectory file", line=1, column=1, source=source)
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2 or header[0] != "t":
        raise ParseError("Trajectory header must be t,<var1>,...", line=1, column=1, source=source)
    variables = tuple(header[1:])

    times, states = [], []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"Expected {len(header)} columns, got {len(row)}",
                line=line, column=1, source=source,
            )
        try:
            values = [float(cell) for cell in row]
        except ValueError as e:
            raise ParseError(f"Non-numeric value: {e}", line=line, column=1, source=source) from e
        if times and values[0] <= times[-1]:
            raise ParseError("Times must be strictly increasing", line=line, column=1, source=source)
        times.append(values[0])
        states.append(values[1:])
    if not times:
        raise ParseError("Trajectory file has no rows", line=2, column=1, source=source)

    derivatives = None
    if rhs is not None:
        derivatives = [rhs(t, np.array(y)) for t, y in zip(times, states)]
    return Trajectory.from_samples(variables, times, states, derivatives)


async def write_trajectory_csv(traj: Trajectory, path: Union[str, Path]) -> None:
    """Write a trajectory as CSV."""
    async with aiofiles.open(path, "w", encoding="utf-8") as file:
        await file.write(format_trajectory_csv(traj))
    logger.debug(f"Wrote {len(traj.times)} nodes to {path}")


async def read_trajectory_csv(path: Union[str, Path], rhs: Optional[RHS] = None) -> Trajectory:
    """
    Read a trajectory CSV file.

    Raises:
        ParseError: If the file is missing or malformed
    """
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as file:
            text = await file.read()
    except OSError as e:
        raise ParseError(f"Cannot read trajectory file: {e}", source=str(path)) from e
    traj = parse_trajectory_csv(text, rhs, source=str(path))
    logger.debug(f"Read {len(traj.times)} nodes from {path}")
    return traj
