"""
Unit tests for exact polynomials and polynomial vector fields.
"""

from fractions import Fraction

import pytest

from src.algebra.polynomial import (
    MAX_INPUT_DEGREE,
    Polynomial,
    PolyVectorField,
    bracket,
    lie_derivative_scalar,
    linear_combination,
    monomial_field,
)
from src.errors import DegreeLimitError, LengthMismatchError, VariableMismatchError
from src.numerics.sampling import LCG


XV = ("x", "v")


@pytest.fixture
def x():
    return Polynomial.variable(XV, "x")


@pytest.fixture
def v():
    return Polynomial.variable(XV, "v")


def field(dx=0, dv=0) -> PolyVectorField:
    def poly(value):
        return value if isinstance(value, Polynomial) else Polynomial.constant(XV, value)

    return PolyVectorField(XV, (poly(dx), poly(dv)))


class TestPolynomial:
    """Test canonical polynomial arithmetic."""

    def test_terms_are_canonical(self, x, v):
        p = (x + v) * (x - v)
        assert p.terms == {(2, 0): Fraction(1), (0, 2): Fraction(-1)}
        assert p.degree == 2

    def test_zero_polynomial(self):
        zero = Polynomial.zero(XV)
        assert zero.is_zero()
        assert zero.terms == {}
        assert zero.degree == -1

    def test_rational_coefficients_stay_exact(self, x):
        p = x * Fraction(1, 3) + Fraction(2, 3) * x
        assert p.terms == {(1, 0): Fraction(1)}

    def test_floats_are_rejected(self, x):
        with pytest.raises(TypeError):
            x * 0.5

    def test_diff(self, x, v):
        p = x ** 3 * v + 2 * v
        assert p.diff("x") == 3 * x ** 2 * v
        assert p.diff("v") == x ** 3 + 2

    def test_evaluate_exact_and_float(self, x, v):
        p = x ** 2 - Fraction(1, 2) * v
        assert p.evaluate((Fraction(1, 2), 1)) == Fraction(-1, 4)
        assert p.evaluate((2.0, 1.0)) == pytest.approx(3.5)

    def test_from_terms_checks_lengths_and_degree(self):
        with pytest.raises(LengthMismatchError):
            Polynomial.from_terms(XV, {(1,): 1})
        with pytest.raises(DegreeLimitError):
            Polynomial.from_terms(XV, {(MAX_INPUT_DEGREE + 1, 0): 1})

    def test_mixed_variable_lists_rejected(self, x):
        other = Polynomial.variable(("x", "y"), "x")
        with pytest.raises(VariableMismatchError):
            x + other


class TestBracket:
    """Test Lie brackets of polynomial vector fields."""

    def test_bracket_of_coordinate_fields(self, x, v):
        A = field(v, 0)
        B = field(0, x)
        assert bracket(A, B) == field(-x, v)

    def test_bracket_is_antisymmetric(self, sl3):
        for A in sl3[:4]:
            for B in sl3[4:]:
                assert bracket(A, B) == -bracket(B, A)

    def test_self_bracket_vanishes(self, sl3):
        for A in sl3:
            assert bracket(A, A).is_zero()

    def test_jacobi_identity(self, sl3):
        A, B, C = sl3[0], sl3[4], sl3[5]
        total = (
            bracket(A, bracket(B, C))
            + bracket(B, bracket(C, A))
            + bracket(C, bracket(A, B))
        )
        assert total.is_zero()

    def test_lie_derivative_scalar(self, x, v):
        A = field(v, -x)
        assert lie_derivative_scalar(A, x ** 2 + v ** 2).is_zero()

    def test_variable_mismatch(self, x):
        other = PolyVectorField.partial(("x", "y"), "y")
        with pytest.raises(VariableMismatchError):
            bracket(field(x, 0), other)


class TestVectorFieldHelpers:
    """Test construction helpers."""

    def test_slots_round_trip(self, sl3):
        for A in sl3:
            assert PolyVectorField.from_slots(XV, A.slots()) == A

    def test_linear_combination(self, sl3):
        combined = linear_combination([1, Fraction(-1, 2)], sl3[:2])
        assert combined == sl3[0] + sl3[1] * Fraction(-1, 2)

    def test_linear_combination_length_mismatch(self, sl3):
        with pytest.raises(LengthMismatchError):
            linear_combination([1], sl3[:2])

    def test_empty_linear_combination(self):
        assert linear_combination([], [], XV).is_zero()

    def test_monomial_field(self, x, v):
        assert monomial_field(XV, 1, (2, 1)) == field(0, x ** 2 * v)

    def test_component_count_checked(self, x):
        with pytest.raises(LengthMismatchError):
            PolyVectorField(XV, (x,))


RANDOM_VARIABLES = ("x", "y", "z")


def random_polynomial(rng: LCG, variables) -> Polynomial:
    """Up to four terms of total degree at most 4 with small rational coefficients."""
    terms = {}
    for _ in range(1 + rng.next_int() % 4):
        exponent = [0] * len(variables)
        for _ in range(rng.next_int() % 5):
            exponent[rng.next_int() % len(variables)] += 1
        terms[tuple(exponent)] = Fraction(rng.next_int() % 11 - 5, 1 + rng.next_int() % 3)
    return Polynomial.from_terms(variables, terms)


def random_vector_field(rng: LCG, variables) -> PolyVectorField:
    return PolyVectorField(
        tuple(variables), tuple(random_polynomial(rng, variables) for _ in variables)
    )


def random_variables(rng: LCG):
    return RANDOM_VARIABLES[: 1 + rng.next_int() % 3]


class TestRandomIdentities:
    """Bracket identities on seeded random fields of degree at most 4."""

    def test_antisymmetry(self):
        rng = LCG(101)
        for _ in range(50):
            variables = random_variables(rng)
            A, B = (random_vector_field(rng, variables) for _ in range(2))
            assert bracket(A, B) == -bracket(B, A)

    def test_jacobi(self):
        rng = LCG(202)
        for _ in range(50):
            variables = random_variables(rng)
            A, B, C = (random_vector_field(rng, variables) for _ in range(3))
            total = (
                bracket(A, bracket(B, C))
                + bracket(B, bracket(C, A))
                + bracket(C, bracket(A, B))
            )
            assert total.is_zero()

    def test_leibniz_rule(self):
        rng = LCG(303)
        for _ in range(50):
            variables = random_variables(rng)
            A = random_vector_field(rng, variables)
            p, q = (random_polynomial(rng, variables) for _ in range(2))
            expected = lie_derivative_scalar(A, p) * q + p * lie_derivative_scalar(A, q)
            assert lie_derivative_scalar(A, p * q) == expected
