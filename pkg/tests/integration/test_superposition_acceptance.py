"""
Acceptance tests for the superposition rules.

Particular solutions are drawn with the seeded sampler, a target solution is
integrated independently, and the superposed curve is compared against it.
"""

import asyncio

import numpy as np
import pytest

from src.numerics.integrator import solve_ivp
from src.numerics.sampling import sample_solutions
from src.numerics.trajectory import TrajectoryStatus
from src.superposition.companion import CompanionBasis, SuperpositionConstants, fit_constants, superpose_eval
from src.superposition.pipeline import verify_riccati2_superposition, verify_superposition
from src.systems.families import GHJFamily, Riccati2Spec, riccati2
from src.systems.tdvf import lift_sode
from tests.conftest import TIGHT_CONFIG


SEED = 20090101
BOX = [(-0.2, 0.2), (-0.2, 0.2)]
TARGET_IC = [0.5, -0.4]


def particular_solutions(lift, span):
    sampled = asyncio.run(
        sample_solutions(lift, 3, span[0], span[1], BOX, SEED, TIGHT_CONFIG, monitor=[0])
    )
    return sampled.trajectories


@pytest.fixture(scope="module")
def forced_sin():
    family = GHJFamily.forced("sin(t)")
    lift = lift_sode(family.sode())
    solutions = particular_solutions(lift, (0.0, 2.0))
    target = solve_ivp(lift, TARGET_IC, 0.0, 2.0, TIGHT_CONFIG, monitor=[0])
    return family, solutions, target


@pytest.fixture(scope="module")
def forced_sin_report(forced_sin):
    family, solutions, target = forced_sin
    return verify_superposition(family, solutions, target, 0.0, (0.0, 2.0), cfg=TIGHT_CONFIG)


class TestForcedEquation:
    """x'' + 3 x x' + x^3 = sin t on [0, 2]."""

    def test_sampling_is_seeded(self, forced_sin):
        _, solutions, _ = forced_sin
        again = particular_solutions(lift_sode(GHJFamily.forced("sin(t)").sode()), (0.0, 2.0))
        for first, second in zip(solutions, again):
            np.testing.assert_array_equal(first.states[0], second.states[0])

    def test_superposition_reproduces_target(self, forced_sin_report):
        assert forced_sin_report.deviation < 1e-6
        assert forced_sin_report.constant_drift < 1e-6
        assert forced_sin_report.residual < 1e-6
        assert not forced_sin_report.poles
        assert forced_sin_report.passed

    def test_companion_residual(self, forced_sin_report):
        assert forced_sin_report.companion_residual is not None
        assert forced_sin_report.companion_residual < 1e-8

    @pytest.mark.parametrize("factor", [-2.0, 1e-3, 1e3])
    def test_constants_are_projective(self, forced_sin, factor):
        """Rescaling the constants leaves the superposed state unchanged."""
        family, solutions, target = forced_sin
        basis = CompanionBasis.build(solutions, 0.0, family, TIGHT_CONFIG)
        constants = fit_constants(basis, TARGET_IC)
        scaled = SuperpositionConstants(constants.scaled(factor))
        for t in (0.3, 1.1, 1.9):
            base = superpose_eval(basis, constants, t)
            other = superpose_eval(basis, scaled, t)
            assert abs(other.x - base.x) <= 1e-12 * max(1.0, abs(base.x))
            assert abs(other.v - base.v) <= 1e-12 * max(1.0, abs(base.v))


class TestGHJFamily:
    """g = 1, h = t, j = cos t on [0, 1]."""

    def test_superposition_reproduces_target(self):
        family = GHJFamily.of("1", "t", "cos(t)")
        lift = lift_sode(family.sode())
        solutions = particular_solutions(lift, (0.0, 1.0))
        target = solve_ivp(lift, TARGET_IC, 0.0, 1.0, TIGHT_CONFIG, monitor=[0])
        report = verify_superposition(family, solutions, target, 0.0, (0.0, 1.0), cfg=TIGHT_CONFIG)
        assert report.deviation < 1e-6
        assert report.constant_drift < 1e-6
        assert report.passed


@pytest.fixture(scope="module")
def riccati_setup():
    spec = Riccati2Spec.from_coefficients("1", "0", "t", "exp(t)")
    lift = lift_sode(riccati2(spec, validate=True, interval=(0.0, 1.0)))
    solutions = particular_solutions(lift, (0.0, 1.0))
    target = solve_ivp(lift, TARGET_IC, 0.0, 1.0, TIGHT_CONFIG, monitor=[0])
    return spec, solutions, target


class TestSecondOrderRiccati:
    """a0 = 1, a1 = 0, a2 = t, a3 = exp(t) on [0, 1]."""

    def test_scaled_rule(self, riccati_setup):
        spec, solutions, target = riccati_setup
        report = verify_riccati2_superposition(
            spec, solutions, target, 0.0, (0.0, 1.0), cfg=TIGHT_CONFIG
        )
        assert report.deviation < 1e-6
        assert report.constant_drift < 1e-6
        assert report.passed

    def test_unscaled_rule_drifts(self, riccati_setup):
        """Without the sqrt(a3) chart the fitted constants are not constant."""
        spec, solutions, target = riccati_setup
        report = verify_riccati2_superposition(
            spec, solutions, target, 0.0, (0.0, 1.0), use_scaling=False, cfg=TIGHT_CONFIG
        )
        assert report.constant_drift > 1e-2
        assert not report.passed


class TestBlowUp:
    """The unforced equation with x(0) = -1, v(0) = -1 has x = 1/(t - 1)."""

    def test_pole_is_localized(self):
        lift = lift_sode(GHJFamily.of().sode())
        traj = solve_ivp(lift, [-1.0, -1.0], 0.0, 2.0, TIGHT_CONFIG, monitor=[0])
        assert traj.status == TrajectoryStatus.BLEW_UP
        assert abs(traj.t_event - 1.0) < 1e-3
