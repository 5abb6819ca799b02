"""
Unit tests for spans, bracket closure and scheme conditions.
"""

from fractions import Fraction

import pytest

from src.algebra.catalog import catalog, catalog_names, catalog_space, riccati2_scheme_W
from src.algebra.field_space import (
    FieldSpace,
    StructureConstants,
    check_scheme,
    close_under_bracket,
    killing_signature,
    span_contains,
)
from src.algebra.polynomial import Polynomial, PolyVectorField, linear_combination, monomial_field
from src.errors import BasisError, CatalogError, SchemeError, VariableMismatchError
from src.numerics.sampling import LCG


XV = ("x", "v")


class TestFieldSpace:
    """Test exact span membership."""

    def test_catalog_bases_are_independent(self):
        for name in catalog_names():
            space = catalog_space(name)
            assert space.dimension == len(catalog(name))

    def test_dependent_fields_rejected(self, sl3):
        with pytest.raises(BasisError):
            FieldSpace.from_fields([sl3[0], sl3[1], sl3[0] + sl3[1]])

    def test_spanned_by_keeps_first_independent_fields(self, sl3):
        space = FieldSpace.spanned_by([sl3[0], sl3[0] * 2, sl3[1]])
        assert space.basis == (sl3[0], sl3[1])

    def test_empty_space_needs_variables(self):
        with pytest.raises(BasisError):
            FieldSpace.from_fields([])
        assert FieldSpace.from_fields([], XV).dimension == 0

    def test_membership_coordinates(self, sl3):
        space = FieldSpace.from_fields(sl3)
        A = linear_combination([Fraction(3, 2), 0, -1, 0, 0, 0, 0, 7], sl3)
        membership = span_contains(space, A)
        assert membership.is_member
        assert membership.coordinates == (
            Fraction(3, 2), 0, -1, 0, 0, 0, 0, 7,
        )
        assert membership.residual.is_zero()

    def test_non_member_has_residual(self, sl3):
        space = FieldSpace.from_fields(sl3)
        outside = monomial_field(XV, 0, (5, 0))
        membership = span_contains(space, outside)
        assert not membership.is_member
        assert membership.coordinates is None
        assert not membership.residual.is_zero()
        assert not space.contains(outside)

    def test_variable_mismatch(self, sl3):
        space = FieldSpace.from_fields(sl3)
        with pytest.raises(VariableMismatchError):
            span_contains(space, PolyVectorField.partial(("x", "y"), "x"))

    def test_same_span_ignores_order(self, sl3):
        forward = FieldSpace.from_fields(sl3)
        backward = FieldSpace.from_fields(list(reversed(sl3)))
        assert forward.same_span(backward)
        assert not forward.same_span(FieldSpace.from_fields(sl3[:7]))

    def test_change_of_basis(self, sl3):
        small = FieldSpace.from_fields([sl3[1], sl3[0] + sl3[7]])
        rows = small.change_of_basis(FieldSpace.from_fields(sl3))
        assert rows[0] == (0, 1, 0, 0, 0, 0, 0, 0)
        assert rows[1] == (1, 0, 0, 0, 0, 0, 0, 1)


class TestClosure:
    """Test closure under the Lie bracket."""

    def test_lift_generates_sl3(self, sl3):
        closure = close_under_bracket([sl3[0], sl3[1]])
        assert closure.closed
        assert closure.dimension == 8
        assert closure.space.same_span(FieldSpace.from_fields(sl3))
        assert closure.witness is not None

    def test_structure_constants_are_consistent(self, sl3):
        constants = StructureConstants.of_basis(FieldSpace.from_fields(sl3))
        assert constants.dimension == 8
        assert constants.antisymmetry_defect() == 0
        assert constants.jacobi_defect() == 0

    def test_killing_signature_of_sl3(self, sl3):
        constants = StructureConstants.of_basis(FieldSpace.from_fields(sl3))
        signature = killing_signature(constants)
        assert signature.as_tuple() == (5, 3, 0)
        assert signature.nondegenerate

    def test_abelian_killing_form_is_zero(self):
        assert killing_signature(StructureConstants.abelian(3)).as_tuple() == (0, 0, 3)

    def test_single_generator_is_closed(self, sl3):
        closure = close_under_bracket([sl3[7]])
        assert closure.closed
        assert closure.dimension == 1
        assert closure.adjoined == ()

    def test_max_dim_overflow(self, sl3):
        closure = close_under_bracket([sl3[0], sl3[1]], max_dim=4)
        assert not closure.closed
        assert closure.structure_constants is None
        assert closure.overflow is not None
        assert closure.dimension == 4

    def test_non_finite_closure_stops(self):
        x = Polynomial.variable(XV, "x")
        A = PolyVectorField(XV, (Polynomial.constant(XV, 1), Polynomial.zero(XV)))
        B = PolyVectorField(XV, (x ** 3, Polynomial.zero(XV)))
        closure = close_under_bracket([A, B], max_dim=10)
        assert not closure.closed

    def test_closing_a_closed_space_changes_nothing(self, sl3):
        closure = close_under_bracket([sl3[0], sl3[1]])
        again = close_under_bracket(list(closure.space.basis))
        assert again.closed
        assert again.adjoined == ()
        assert again.space.basis == closure.space.basis
        assert again.structure_constants == closure.structure_constants

    def test_killing_signature_ignores_generator_order(self, sl3):
        rng = LCG(5)
        orders = [list(reversed(sl3))]
        for _ in range(3):
            shuffled = list(sl3)
            for k in range(len(shuffled) - 1, 0, -1):
                m = rng.next_int() % (k + 1)
                shuffled[k], shuffled[m] = shuffled[m], shuffled[k]
            orders.append(shuffled)
        for fields in orders:
            constants = StructureConstants.of_basis(FieldSpace.from_fields(fields))
            assert killing_signature(constants).as_tuple() == (5, 3, 0)

    def test_degenerate_killing_form(self):
        x = Polynomial.variable(XV, "x")
        dx = PolyVectorField.partial(XV, "x")
        closure = close_under_bracket([dx, PolyVectorField(XV, (x, Polynomial.zero(XV)))])
        assert closure.closed
        signature = killing_signature(closure.structure_constants)
        assert signature.n_zero >= 1
        assert signature.as_tuple() == (1, 0, 1)
        assert not signature.nondegenerate

    def test_scheme_fields_do_not_close(self, v2_fields):
        closure = close_under_bracket(v2_fields, max_dim=12)
        assert not closure.closed
        assert closure.dimension == 12
        assert closure.structure_constants is None
        assert (closure.witness.left, closure.witness.right) == (0, 2)
        escaped = closure.witness_for(0, 6)
        assert escaped is not None
        assert escaped.bracket == PolyVectorField(
            XV,
            (
                -Polynomial.variable(XV, "x") ** 3,
                3 * Polynomial.variable(XV, "x") ** 2 * Polynomial.variable(XV, "v"),
            ),
        )
        assert closure.witness_for(6, 0) is escaped
        assert closure.witness_for(1, 2) is None

    def test_no_generators(self):
        with pytest.raises(BasisError):
            close_under_bracket([])


class TestScheme:
    """Test the quasi-Lie scheme conditions."""

    def test_riccati2_scheme(self, v2_fields):
        W = FieldSpace.from_fields(riccati2_scheme_W())
        report = check_scheme(W, FieldSpace.from_fields(v2_fields))
        assert report.w_closed
        assert report.action_ok
        assert report.is_scheme
        assert not report.v2_closed
        first = report.v2_witness
        assert (first.left, first.right) == (0, 2)
        assert (0, 6) in [(w.left, w.right) for w in report.v2_witnesses]
        assert report.v2_witness_for(6, 0) is report.v2_witness_for(0, 6)
        assert report.v2_witness_for(0, 1) is None

    def test_action_failure_reported(self, v2_fields):
        x = Polynomial.variable(XV, "x")
        extra = PolyVectorField(XV, (x ** 2, Polynomial.zero(XV)))
        V2 = FieldSpace.from_fields(v2_fields + [extra])
        W = FieldSpace.from_fields([extra])
        report = check_scheme(W, V2)
        assert report.w_closed
        assert not report.action_ok
        assert not report.is_scheme
        assert report.action_witness is not None

    def test_w_outside_v2(self, v2_fields):
        x = Polynomial.variable(XV, "x")
        W = FieldSpace.from_fields([PolyVectorField(XV, (x ** 2, Polynomial.zero(XV)))])
        with pytest.raises(SchemeError):
            check_scheme(W, FieldSpace.from_fields(v2_fields))


class TestCatalog:
    """Test catalog lookup."""

    def test_aliases(self, sl3):
        assert catalog("sl3") == sl3
        assert len(catalog("V2")) == 8
        assert len(catalog("W")) == 2

    def test_unknown_name(self):
        with pytest.raises(CatalogError):
            catalog("so3")
