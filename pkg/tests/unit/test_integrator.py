"""
Unit tests for the adaptive integrator and seeded sampling.
"""

import math

import numpy as np
import pytest

from src.algebra.polynomial import Polynomial, PolyVectorField
from src.config import AnalysisConfig
from src.errors import ConfigurationError, IntegrationError, LengthMismatchError, TimeDomainError
from src.numerics.integrator import IvpConfig, residual, solve_batch, solve_ivp
from src.numerics.sampling import LCG, sample_solutions
from src.numerics.trajectory import TrajectoryStatus
from src.systems.tdvf import TDVF


XV = ("x", "v")


def square(t, y):
    return y ** 2


@pytest.fixture
def oscillator() -> TDVF:
    x = Polynomial.variable(XV, "x")
    v = Polynomial.variable(XV, "v")
    return TDVF.autonomous(PolyVectorField(XV, (v, -x)))


class TestIvpConfig:
    """Test integration settings."""

    def test_from_config(self):
        cfg = IvpConfig.from_config(AnalysisConfig(), max_step=0.5)
        assert cfg.rtol == 1e-10
        assert cfg.max_step == 0.5
        assert cfg.blowup_threshold == 1e6

    def test_default_step_matches_analysis_config(self):
        assert IvpConfig().max_step == AnalysisConfig().max_step == 1e-3

    @pytest.mark.parametrize(
        "changes",
        [{"rtol": 0.0}, {"atol": -1.0}, {"blowup_threshold": 1.0}, {"max_step": 0.0}, {"max_steps": 0}],
    )
    def test_invalid_settings(self, changes):
        with pytest.raises(ConfigurationError):
            IvpConfig(**changes).validate()


class TestSolveIvp:
    """Test Dormand-Prince integration."""

    def test_exponential(self):
        traj = solve_ivp(lambda t, y: y, [1.0], 0.0, 1.0, variables=("y",))
        assert traj.completed
        assert traj.t_end == 1.0
        assert traj.final_state[0] == pytest.approx(math.e, rel=1e-9)

    def test_oscillator_dense_output(self, oscillator):
        traj = solve_ivp(oscillator, [1.0, 0.0], 0.0, 2.0)
        assert traj.final_state == pytest.approx([math.cos(2.0), -math.sin(2.0)], abs=1e-9)
        value, slope = traj.dense_eval(0.7071)
        assert value == pytest.approx([math.cos(0.7071), -math.sin(0.7071)], abs=1e-8)
        assert slope == pytest.approx([-math.sin(0.7071), -math.cos(0.7071)], abs=1e-6)

    def test_blowup_is_localized(self):
        traj = solve_ivp(square, [1.0], 0.0, 2.0, variables=("y",))
        assert traj.status == TrajectoryStatus.BLEW_UP
        assert abs(traj.t_event - 1.0) < 1e-3
        assert traj.t_end == traj.t_event

    def test_monitor_limits_blowup_check(self):
        def rhs(t, y):
            return np.array([0.0, 1e7])

        traj = solve_ivp(rhs, [0.0, 0.0], 0.0, 1.0, variables=XV, monitor=[0])
        assert traj.completed
        traj = solve_ivp(rhs, [0.0, 0.0], 0.0, 1.0, variables=XV)
        assert traj.status == TrajectoryStatus.BLEW_UP

    def test_domain_failure_becomes_status(self):
        def rhs(t, y):
            if t > 0.5:
                raise TimeDomainError("undefined", t=t)
            return np.array([1.0])

        traj = solve_ivp(rhs, [0.0], 0.0, 1.0, variables=("y",))
        assert traj.status == TrajectoryStatus.STEP_FAILURE
        assert traj.t_event == pytest.approx(0.5, abs=1e-6)
        assert traj.rejected_steps > 0

    def test_step_budget(self):
        traj = solve_ivp(
            lambda t, y: y, [1.0], 0.0, 1.0, IvpConfig(max_step=1e-3, max_steps=5), ("y",)
        )
        assert traj.status == TrajectoryStatus.STEP_FAILURE
        assert len(traj.times) == 6

    def test_wrong_initial_state(self, oscillator):
        with pytest.raises(LengthMismatchError):
            solve_ivp(oscillator, [1.0], 0.0, 1.0)

    def test_empty_span(self, oscillator):
        with pytest.raises(ConfigurationError):
            solve_ivp(oscillator, [1.0, 0.0], 1.0, 1.0)

    def test_plain_rhs_needs_variables(self):
        with pytest.raises(ConfigurationError):
            solve_ivp(square, [1.0], 0.0, 1.0)

    @pytest.mark.asyncio
    async def test_batch_keeps_order(self, oscillator):
        runs = await solve_batch(oscillator, [[1.0, 0.0], [0.0, 1.0]], 0.0, 1.0)
        assert runs[0].final_state == pytest.approx([math.cos(1.0), -math.sin(1.0)], abs=1e-9)
        assert runs[1].final_state == pytest.approx([math.sin(1.0), math.cos(1.0)], abs=1e-9)


def unforced(t, y):
    x, v = y
    return np.array([v, -3 * x * v - x ** 3])


def unit_forced(t, y):
    x, v = y
    return np.array([v, 1.0 - 3 * x * v - x ** 3])


class TestResidualAndAccuracy:
    """Test residual checks, convergence and determinism."""

    def test_residual_at_default_settings(self, oscillator):
        traj = solve_ivp(oscillator, [1.0, 0.0], 0.0, 2.0, IvpConfig())
        assert residual(traj, oscillator, sample_count=1000) < 1e-6

    def test_residual_of_own_system(self):
        traj = solve_ivp(unforced, [0.5, -0.4], 0.0, 2.0, variables=XV)
        assert residual(traj, unforced) < 1e-6

    def test_residual_detects_wrong_system(self):
        traj = solve_ivp(unforced, [0.5, -0.4], 0.0, 2.0, variables=XV)
        assert residual(traj, unit_forced) == pytest.approx(1.0, abs=1e-3)

    def test_repeated_runs_are_identical(self, oscillator):
        first = solve_ivp(oscillator, [1.0, 0.5], 0.0, 2.0)
        second = solve_ivp(oscillator, [1.0, 0.5], 0.0, 2.0)
        assert np.array_equal(first.times, second.times)
        assert np.array_equal(first.states, second.states)
        assert np.array_equal(first.derivatives, second.derivatives)

    def test_halving_tolerance_reduces_error(self, oscillator):
        exact = np.array([math.cos(1.0), -math.sin(1.0)])
        tolerances = [1e-6 / 2 ** k for k in range(4)]
        errors = []
        for tol in tolerances:
            cfg = IvpConfig(rtol=tol, atol=tol, max_step=1.0)
            traj = solve_ivp(oscillator, [1.0, 0.0], 0.0, 1.0, cfg)
            errors.append(float(np.max(np.abs(traj.final_state - exact))))
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert all(error < 100 * tol for error, tol in zip(errors, tolerances))


class TestSampling:
    """Test seeded particular solutions."""

    def test_lcg_sequence(self):
        rng = LCG(0)
        assert rng.next_int() == 1013904223
        assert rng.next_int() == (1664525 * 1013904223 + 1013904223) % 2 ** 32

    def test_lcg_uniform_range(self):
        rng = LCG(20090101)
        values = [rng.uniform(-0.2, 0.2) for _ in range(100)]
        assert all(-0.2 <= v < 0.2 for v in values)

    @pytest.mark.asyncio
    async def test_sampling_is_reproducible(self):
        first = await sample_solutions(square, 3, 0.0, 1.0, [(0.1, 0.2)], 7, variables=("y",))
        second = await sample_solutions(square, 3, 0.0, 1.0, [(0.1, 0.2)], 7, variables=("y",))
        assert first.initial_conditions == second.initial_conditions
        assert len(first.trajectories) == 3
        assert first.rejected == 0

    @pytest.mark.asyncio
    async def test_all_candidates_blow_up(self):
        with pytest.raises(IntegrationError):
            await sample_solutions(
                square, 2, 0.0, 1.0, [(2.0, 3.0)], 7, variables=("y",), max_attempts=6
            )
