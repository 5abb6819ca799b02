"""
Unit tests for trajectories and their CSV files.
"""

import numpy as np
import pytest

from src.errors import LengthMismatchError, OutOfRangeError, ParseError
from src.numerics.trajectory import Trajectory, TrajectoryStatus
from src.numerics.trajectory_io import (
    format_trajectory_csv,
    parse_trajectory_csv,
    read_trajectory_csv,
    write_trajectory_csv,
)


@pytest.fixture
def cubic() -> Trajectory:
    """y = t^3 sampled with exact derivatives."""
    times = np.array([0.0, 0.5, 1.0, 2.0])
    return Trajectory(("y",), times, (times ** 3).reshape(-1, 1), (3 * times ** 2).reshape(-1, 1))


class TestTrajectory:
    """Test dense output and validation."""

    def test_hermite_reproduces_cubics(self, cubic):
        for t in (0.1, 0.75, 1.3, 1.99):
            value, slope = cubic.dense_eval(t)
            assert value[0] == pytest.approx(t ** 3, rel=1e-12)
            assert slope[0] == pytest.approx(3 * t ** 2, rel=1e-12)

    def test_nodes_are_exact(self, cubic):
        value, slope = cubic.dense_eval(0.5)
        assert value[0] == 0.125
        assert slope[0] == 0.75

    def test_out_of_range(self, cubic):
        with pytest.raises(OutOfRangeError):
            cubic.dense_eval(2.5)
        with pytest.raises(OutOfRangeError):
            cubic.dense_eval(-0.1)

    def test_arrays_are_read_only(self, cubic):
        with pytest.raises(ValueError):
            cubic.states[0, 0] = 1.0

    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            Trajectory(("y",), [0.0, 0.0], [[1.0], [1.0]], [[0.0], [0.0]])

    def test_shapes_checked(self):
        with pytest.raises(LengthMismatchError):
            Trajectory(("x", "v"), [0.0, 1.0], [[1.0], [1.0]], [[0.0], [0.0]])

    def test_from_samples_estimates_derivatives(self):
        times = np.linspace(0.0, 1.0, 11)
        traj = Trajectory.from_samples(("y",), times, (times ** 2).reshape(-1, 1))
        np.testing.assert_allclose(traj.derivatives[:, 0], 2 * times, atol=1e-12)

    def test_summary(self, cubic):
        summary = cubic.summary()
        assert summary["nodes"] == 4
        assert summary["status"] == TrajectoryStatus.COMPLETED.value
        assert summary["final_state"] == [8.0]
        assert cubic.covers(0.0, 2.0)
        assert not cubic.covers(0.0, 2.1)


class TestTrajectoryCsv:
    """Test CSV export and import."""

    def test_written_values_read_back_exactly(self, cubic):
        text = format_trajectory_csv(cubic)
        assert text.splitlines()[0] == "t,y"
        back = parse_trajectory_csv(text, rhs=lambda t, y: np.array([3 * t ** 2]))
        np.testing.assert_array_equal(back.times, cubic.times)
        np.testing.assert_array_equal(back.states, cubic.states)
        np.testing.assert_array_equal(back.derivatives, cubic.derivatives)

    @pytest.mark.parametrize(
        "text, line",
        [
            ("", 1),
            ("x,y\n0,1\n", 1),
            ("t,y\n0,1\n1\n", 3),
            ("t,y\n0,1\n1,abc\n", 3),
            ("t,y\n0,1\n0,2\n", 3),
            ("t,y\n", 2),
        ],
    )
    def test_malformed_files(self, text, line):
        with pytest.raises(ParseError) as exc_info:
            parse_trajectory_csv(text, source="bad.csv")
        assert exc_info.value.line == line
        assert exc_info.value.source == "bad.csv"

    @pytest.mark.asyncio
    async def test_file_round_trip(self, cubic, tmp_path):
        path = tmp_path / "cubic.csv"
        await write_trajectory_csv(cubic, path)
        back = await read_trajectory_csv(path)
        np.testing.assert_array_equal(back.states, cubic.states)

    @pytest.mark.asyncio
    async def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            await read_trajectory_csv(tmp_path / "missing.csv")
