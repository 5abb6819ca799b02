"""
Acceptance tests for the field DSL, the report documents and the exit codes.
"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from src.algebra.catalog import catalog, catalog_names
from src.algebra.polynomial import PolyVectorField, monomial_field
from src.commands.base import CommandResult
from src.errors import (
    EXIT_INPUT_ERROR,
    EXIT_NUMERICAL_ERROR,
    EXIT_VERDICT_FALSE,
    BlowUpError,
    ConstraintViolationError,
    NonGenericError,
    ParseError,
    QuasiLieError,
    TimeDomainError,
    UnknownIdentifierError,
)
from src.numerics.sampling import LCG
from src.parsers.field_parser import format_field, parse_field
from src.reports import BracketReport, ErrorReport, IntegrationReport


XV = ("x", "v")

FUZZ_TOKENS = [
    "x", "v", "t", "y", "d/dx", "d/dv", "d/dy", "+", "-", "*", "/", "^",
    "(", ")", "0", "1", "2", "3", "1/2", "1.5",
]


def random_field(rng: LCG) -> PolyVectorField:
    """Sum of up to four monomial fields with small rational coefficients."""
    field = PolyVectorField.zero(XV)
    for _ in range(1 + rng.next_int() % 4):
        index = rng.next_int() % 2
        exponent = (rng.next_int() % 4, rng.next_int() % 4)
        coefficient = Fraction(rng.next_int() % 11 - 5, 1 + rng.next_int() % 4)
        field = field + monomial_field(XV, index, exponent) * coefficient
    return field


def random_text(rng: LCG) -> str:
    return " ".join(FUZZ_TOKENS[rng.next_int() % len(FUZZ_TOKENS)] for _ in range(1 + rng.next_int() % 12))


class TestFieldRoundTrip:
    """Canonical text parses back to the same field."""

    @pytest.mark.parametrize("name", catalog_names())
    def test_catalog_fields(self, name):
        for field in catalog(name):
            assert parse_field(format_field(field)) == field

    def test_random_fields(self):
        rng = LCG(20090101)
        for _ in range(200):
            field = random_field(rng)
            text = format_field(field)
            assert parse_field(text) == field, text
            assert format_field(parse_field(text)) == text


class TestFuzzedInput:
    """Arbitrary token soup either parses or raises a quasilie error."""

    def test_fuzz(self):
        rng = LCG(7)
        parsed = rejected = 0
        for _ in range(200):
            text = random_text(rng)
            try:
                parse_field(text)
                parsed += 1
            except QuasiLieError as e:
                assert e.exit_code == EXIT_INPUT_ERROR, text
                rejected += 1
        assert parsed + rejected == 200
        assert rejected > 0

    def test_errors_carry_positions(self):
        with pytest.raises(UnknownIdentifierError) as exc_info:
            parse_field("x*d/dx + y*d/dv")
        assert (exc_info.value.line, exc_info.value.column) == (1, 10)


class TestReportDocuments:
    """Reports validate against their schema."""

    def test_report_round_trip(self):
        report = IntegrationReport(
            system="f.yaml",
            variables=["x", "v"],
            initial_condition=[0.5, -0.4],
            span=(0.0, 2.0),
            status="completed",
            nodes=10,
            rejected_steps=0,
            t_end=2.0,
            final_state=[0.1, 0.2],
        )
        again = IntegrationReport.model_validate_json(report.to_json())
        assert again == report
        assert again.format_version == 1

    def test_unknown_fields_rejected(self):
        data = BracketReport(
            variables=["x", "v"], left="d/dx", right="d/dv", bracket="0", is_zero=True
        ).model_dump()
        data["extra"] = 1
        with pytest.raises(ValidationError):
            BracketReport.model_validate(data)

    def test_format_version_is_fixed(self):
        data = BracketReport(
            variables=["x", "v"], left="d/dx", right="d/dv", bracket="0", is_zero=True
        ).model_dump()
        data["format_version"] = 2
        with pytest.raises(ValidationError):
            BracketReport.model_validate(data)

    def test_error_report(self):
        report = ErrorReport.from_error("integrate", BlowUpError("pole", t_event=1.0))
        assert report.exit_code == EXIT_NUMERICAL_ERROR
        assert report.error.code == "E_BLOWUP"
        assert report.error.details == {"t_event": 1.0}


class TestExitCodes:
    """Errors map onto the command-line exit statuses."""

    @pytest.mark.parametrize(
        "error, code",
        [
            (ParseError("bad"), EXIT_INPUT_ERROR),
            (ConstraintViolationError("a3(0) = 1 violated"), EXIT_INPUT_ERROR),
            (BlowUpError("pole"), EXIT_NUMERICAL_ERROR),
            (NonGenericError("singular"), EXIT_NUMERICAL_ERROR),
            (TimeDomainError("1/t", t=0.0), EXIT_NUMERICAL_ERROR),
        ],
    )
    def test_error_exit_codes(self, error, code):
        assert CommandResult.error_result("test", error).exit_code == code

    def test_false_verdict(self):
        report = BracketReport(variables=["x", "v"], left="d/dx", right="d/dv", bracket="0", is_zero=True)
        assert CommandResult.success_result(report, verdict=False).exit_code == EXIT_VERDICT_FALSE
