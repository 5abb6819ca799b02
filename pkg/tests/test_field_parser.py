"""
Tests for the vector-field DSL and field list documents.
"""

from fractions import Fraction

import pytest

from src.algebra.catalog import sl3_realization
from src.algebra.polynomial import Polynomial, PolyVectorField, bracket
from src.errors import DegreeLimitError, ParseError, UnknownIdentifierError
from src.parsers.field_list_parser import FieldListParser, parse_field_list, parse_variables
from src.parsers.field_parser import format_field, format_polynomial, parse_field, parse_polynomial
from tests.conftest import GENERATORS_TEXT


XV = ("x", "v")


class TestParseField:
    """Test parsing fields in the DSL."""

    def test_lift_generator(self, sl3):
        """The first sl(3) field parses from its usual text."""
        assert parse_field("v*d/dx - (3*x*v + x^3)*d/dv") == sl3[0]

    def test_rational_literals(self):
        field = parse_field("1/2*x*d/dx - 3/4*d/dv")
        assert field.components[0].coefficient((1, 0)) == Fraction(1, 2)
        assert field.components[1].coefficient((0, 0)) == Fraction(-3, 4)

    def test_zero(self):
        assert parse_field("0").is_zero()
        assert parse_field("x*d/dx - x*d/dx").is_zero()

    def test_distribution_and_powers(self):
        field = parse_field("(x + v)^2*d/dx")
        assert field.components[0] == parse_polynomial("x^2 + 2*x*v + v^2")

    def test_custom_variables(self):
        field = parse_field("y*d/dq", ("q", "y"))
        assert field.variables == ("q", "y")
        assert field.components[0] == Polynomial.variable(("q", "y"), "y")

    @pytest.mark.parametrize(
        "text",
        [
            "1.5*d/dx",
            "x + d/dx",
            "d/dx*d/dv",
            "x*d/dx/x",
            "d/dx/0",
            "x*d/dx +",
            "x^(1/2)*d/dx",
            "x^-1*d/dx",
            "(d/dx)^2",
            "x",
            "x *+ d/dx",
        ],
    )
    def test_rejected_text(self, text):
        """Malformed or non-polynomial fields raise ParseError."""
        with pytest.raises(ParseError):
            parse_field(text)

    def test_float_position(self):
        with pytest.raises(ParseError) as exc_info:
            parse_field("x*d/dx + 1.5*d/dv")
        assert exc_info.value.line == 1
        assert exc_info.value.column == 10

    def test_polynomial_is_not_a_field(self):
        with pytest.raises(ParseError) as exc_info:
            parse_field("x^2 + 1")
        assert "Expected a vector field" in str(exc_info.value)

    @pytest.mark.parametrize("text", ["y*d/dx", "x*d/dy"])
    def test_unknown_identifiers(self, text):
        with pytest.raises(UnknownIdentifierError) as exc_info:
            parse_field(text)
        assert exc_info.value.code == "E_IDENTIFIER"

    @pytest.mark.parametrize("text", ["x^17*d/dx", "(x^8)^3*d/dx"])
    def test_degree_limit(self, text):
        with pytest.raises(DegreeLimitError):
            parse_field(text)

    def test_constant_powers_are_not_limited(self):
        field = parse_field("2^20*d/dx")
        assert field.components[0].coefficient((0, 0)) == 2 ** 20


class TestFormatField:
    """Test the canonical text form."""

    def test_sl3_generator(self, sl3):
        assert format_field(sl3[0]) == "v*d/dx + (-x^3 - 3*x*v)*d/dv"

    def test_bracket(self):
        X = parse_field("v*d/dx")
        Y = parse_field("x*d/dv")
        assert format_field(bracket(X, Y)) == "-x*d/dx + v*d/dv"

    def test_zero(self):
        assert format_field(PolyVectorField.zero(XV)) == "0"

    def test_rational_coefficient(self):
        assert format_field(parse_field("x*d/dx/2")) == "1/2*x*d/dx"

    def test_negative_unit_component(self):
        assert format_field(parse_field("-d/dv")) == "-d/dv"

    def test_catalog_round_trip(self, sl3, v2_fields):
        """Every catalog field parses back from its canonical text."""
        for field in sl3 + v2_fields:
            assert parse_field(format_field(field)) == field

    def test_polynomial_text(self):
        assert format_polynomial(parse_polynomial("v - 3*x^2 + 1/3")) == "-3*x^2 + v + 1/3"
        assert format_polynomial(Polynomial.zero(XV)) == "0"


class TestParsePolynomial:
    """Test parsing bare polynomials."""

    def test_polynomial(self):
        p = parse_polynomial("(x - v)*(x + v)")
        assert p == parse_polynomial("x^2 - v^2")

    def test_field_is_rejected(self):
        with pytest.raises(ParseError):
            parse_polynomial("x*d/dx")


class TestFieldList:
    """Test field list documents."""

    def test_generators(self):
        field_list = parse_field_list(GENERATORS_TEXT)
        assert field_list.variables == XV
        assert field_list.names == ("X1", "X2")
        sl3 = sl3_realization()
        assert field_list.fields == (sl3[0], sl3[1])

    def test_error_position_is_in_document(self):
        text = "variables: x, v\nX1 = d/dx\nX2 = 1.5*d/dv\n"
        with pytest.raises(ParseError) as exc_info:
            parse_field_list(text)
        assert exc_info.value.line == 3
        assert exc_info.value.column == 6

    def test_header_after_fields(self):
        with pytest.raises(ParseError) as exc_info:
            parse_field_list("d/dx\nvariables: x, v\n")
        assert exc_info.value.line == 2

    @pytest.mark.parametrize("text", ["x, t", "x, x", "x, 2y", ""])
    def test_invalid_variables(self, text):
        with pytest.raises(ParseError):
            parse_variables(text)

    def test_comments_and_default_names(self):
        field_list = parse_field_list("# two fields\n\nd/dx  # translation\nx*d/dx\n")
        assert field_list.names == ("F1", "F2")
        assert field_list.variables == XV

    def test_empty_document(self):
        with pytest.raises(ParseError):
            parse_field_list("# nothing here\n")

    def test_to_text_round_trip(self):
        field_list = parse_field_list(GENERATORS_TEXT)
        assert parse_field_list(field_list.to_text()) == field_list

    def test_space(self):
        assert parse_field_list(GENERATORS_TEXT).space().dimension == 2

    @pytest.mark.asyncio
    async def test_parser_reads_file(self, write_doc):
        path = write_doc("gens.fields", GENERATORS_TEXT)
        result = await FieldListParser().parse_file(path)
        assert result.success
        assert result.metadata == {"variables": ["x", "v"], "field_count": 2}
        assert result.document.names == ("X1", "X2")

    @pytest.mark.asyncio
    async def test_parser_folds_errors(self, write_doc):
        path = write_doc("bad.fields", "X1 = x^0.5*d/dx\n")
        parser = FieldListParser()
        result = await parser.parse_file(path)
        assert not result.success
        assert result.error.source == path
        with pytest.raises(ParseError):
            result.unwrap()
