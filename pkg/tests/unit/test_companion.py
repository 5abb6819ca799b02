"""
Unit tests for the companion linearization of the g,h,j family.

The unforced equation x'' + 3 x x' + x^3 = 0 has companion equation w''' = 0,
so every solution is x = W'/W with W a quadratic; x = a/(a t + 1) and
x = 2t/(1 + t^2) are used as exact particular solutions.
"""

import numpy as np
import pytest

from src.errors import BlowUpError, IntegrationError, NonGenericError, OutOfRangeError
from src.numerics.integrator import solve_ivp
from src.superposition.companion import (
    CompanionBasis,
    SuperpositionConstants,
    companion_dependency,
    companion_lift,
    fit_constants,
    superpose_eval,
)
from src.systems.families import GHJFamily
from src.systems.tdvf import lift_sode
from tests.conftest import TIGHT_CONFIG


FREE = GHJFamily.of()


def reciprocal_ic(a: float):
    """Initial condition of x = a / (a t + 1) at t = 0."""
    return [a, -a * a]


@pytest.fixture(scope="module")
def free_solutions():
    lift = lift_sode(FREE.sode())
    ics = [reciprocal_ic(1.0), reciprocal_ic(2.0), [0.0, 2.0], reciprocal_ic(4.0)]
    return [solve_ivp(lift, ic, 0.0, 1.0, TIGHT_CONFIG) for ic in ics]


@pytest.fixture(scope="module")
def basis(free_solutions):
    return CompanionBasis.build(free_solutions[:3], 0.0, FREE)


class TestCompanionLift:
    """Test integration of the companion scalar."""

    def test_w_matches_closed_form(self, free_solutions):
        lift = companion_lift(FREE, free_solutions[0], 0.0)
        for t in (0.25, 0.5, 1.0):
            w, w1, w2, w3 = lift.values(t)
            assert w == pytest.approx(1.0 + t, abs=1e-8)
            assert w1 == pytest.approx(1.0, abs=1e-8)
            assert w2 == pytest.approx(0.0, abs=1e-8)
            assert w3 == pytest.approx(0.0, abs=1e-6)

    def test_interior_normalization(self, free_solutions):
        lift = companion_lift(FREE, free_solutions[2], 0.5)
        assert lift.values(0.5)[0] == pytest.approx(1.0, abs=1e-12)
        assert lift.values(0.0)[0] == pytest.approx(1.0 / 1.25, abs=1e-8)
        assert lift.w.t_start == 0.0 and lift.w.t_end == 1.0

    def test_solution_of_another_family_rejected(self, free_solutions):
        with pytest.raises(IntegrationError):
            companion_lift(GHJFamily.forced("sin(t)"), free_solutions[0], 0.0)

    def test_t0_outside_range(self, free_solutions):
        with pytest.raises(OutOfRangeError):
            companion_lift(FREE, free_solutions[0], 1.5)

    def test_blown_up_solution(self):
        sol = solve_ivp(lift_sode(FREE.sode()), [-1.0, -1.0], 0.0, 2.0, TIGHT_CONFIG, monitor=[0])
        with pytest.raises(BlowUpError):
            companion_lift(FREE, sol, 0.0)


class TestCompanionBasis:
    """Test generic bases, constants and superposed values."""

    def test_determinant(self, basis):
        assert basis.determinant == pytest.approx(2.0, abs=1e-10)
        assert basis.t_range() == (0.0, 1.0)

    def test_companion_residual(self, basis):
        assert basis.companion_residual(FREE, np.linspace(0.0, 1.0, 50)) < 1e-6

    def test_collinear_initial_rows_are_not_generic(self, free_solutions):
        lift = lift_sode(FREE.sode())
        third = solve_ivp(lift, reciprocal_ic(3.0), 0.0, 1.0, TIGHT_CONFIG)
        with pytest.raises(NonGenericError) as exc_info:
            CompanionBasis.build([free_solutions[0], free_solutions[1], third], 0.0, FREE)
        assert exc_info.value.determinant == pytest.approx(0.0, abs=1e-8)

    def test_fit_and_superpose(self, basis):
        constants = fit_constants(basis, reciprocal_ic(4.0))
        assert constants.c == pytest.approx((1.0, -1.5, 0.0), abs=1e-9)
        point = superpose_eval(basis, constants, 1.0)
        assert not point.pole
        assert point.x == pytest.approx(0.8, abs=1e-8)
        assert point.v == pytest.approx(-0.64, abs=1e-8)

    def test_refit_away_from_t0(self, basis):
        constants = fit_constants(basis, [0.8, -0.64], t=1.0)
        assert constants.c == pytest.approx((1.0, -1.5, 0.0), abs=1e-7)

    def test_dependency_is_constant(self, free_solutions):
        lifts = [companion_lift(FREE, sol, 0.0) for sol in free_solutions]
        for t in (0.0, 0.3, 0.9):
            dependency = companion_dependency(lifts, t)
            assert dependency.coefficients == pytest.approx((1.0, -1.5, 0.0, 0.5), abs=1e-7)
            assert dependency.residual < 1e-7


class TestSuperpositionConstants:
    """Test normalization of the constants."""

    def test_first_nonzero_entry_is_one(self):
        constants = SuperpositionConstants.normalized([0.0, 2.0, 4.0])
        assert constants.c == (0.0, 1.0, 2.0)
        assert constants.k_chart is None

    def test_k_chart(self):
        constants = SuperpositionConstants.normalized([2.0, 4.0, 6.0])
        assert constants.k_chart == (2.0, 3.0)
        assert constants.scaled(3.0) == (3.0, 6.0, 9.0)

    def test_all_zero(self):
        with pytest.raises(NonGenericError):
            SuperpositionConstants.normalized([0.0, 0.0, 0.0])
