"""
Lie-algebra commands for quasilie: ``bracket``, ``close`` and ``scheme``.
"""

import argparse
from typing import List, Optional

from pydantic import Field

from ..algebra.catalog import catalog_names, catalog_space
from ..algebra.field_space import check_scheme, close_under_bracket, killing_signature
from ..algebra.polynomial import bracket
from ..logging_config import PerformanceLogger
from ..parsers.field_list_parser import parse_variables
from ..parsers.field_parser import format_field, parse_field
from ..parsers.parser_factory import load_field_list
from ..reports import BracketReport, ClosureReportModel, SchemeReportModel
from .base import BaseCommand, CommandParameters, CommandResult


class BracketCommand(BaseCommand):
    """Print the Lie bracket of two DSL fields."""

    class Parameters(CommandParameters):
        left: str
        right: str
        variables: str = "x, v"

    def get_command_name(self) -> str:
        return "bracket"

    def get_command_description(self) -> str:
        return "Print the Lie bracket [A, B] of two fields in DSL form"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("left", help="First field, e.g. 'v*d/dx'")
        parser.add_argument("right", help="Second field, e.g. 'x*d/dv'")
        parser.add_argument("--variables", help="Variable list (default: x, v)")

    async def _execute_command(self, params: Parameters) -> CommandResult:
        variables = parse_variables(params.variables)
        A = parse_field(params.left, variables)
        B = parse_field(params.right, variables)
        result = bracket(A, B)
        text = format_field(result)
        report = BracketReport(
            variables=list(variables),
            left=format_field(A),
            right=format_field(B),
            bracket=text,
            is_zero=result.is_zero(),
        )
        return CommandResult.success_result(report, text=text + "\n")


class CloseCommand(BaseCommand):
    """Close a set of generators under the bracket."""

    class Parameters(CommandParameters):
        generators: str
        max_dim: Optional[int] = Field(default=None, gt=0)

    def get_command_name(self) -> str:
        return "close"

    def get_command_description(self) -> str:
        return "Close generators under the Lie bracket; report dimension and structure"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--generators", required=True,
            help="Field list file, system document or catalog name (sl3, V2, W)",
        )
        parser.add_argument("--max-dim", dest="max_dim", type=int, help="Dimension limit")

    async def _execute_command(self, params: Parameters) -> CommandResult:
        field_list = await load_field_list(params.generators)
        max_dim = params.max_dim or self.config.max_dim
        generators = list(field_list.fields)

        closure = await self.run_blocking(close_under_bracket, generators, max_dim)
        signature = None
        same_span: List[str] = []
        if closure.closed and closure.structure_constants is not None:
            async with PerformanceLogger("killing_signature", self.logger):
                signature = (
                    await self.run_blocking(killing_signature, closure.structure_constants)
                ).as_tuple()
            for name in catalog_names():
                space = catalog_space(name)
                if space.variables == closure.space.variables and space.same_span(closure.space):
                    same_span.append(name)

        report = ClosureReportModel.build(generators, closure, max_dim, signature, same_span)
        self.logger.info(
            f"Closure of {len(generators)} generators: dimension {closure.dimension}, "
            f"closed={closure.closed}"
        )
        return CommandResult.success_result(report, verdict=closure.closed)


class SchemeCommand(BaseCommand):
    """Check the bracket conditions of a quasi-Lie scheme S(W, V2)."""

    class Parameters(CommandParameters):
        w: str
        v2: str

    def get_command_name(self) -> str:
        return "scheme"

    def get_command_description(self) -> str:
        return "Check [W, W] in W and [W, V2] in V2, and whether V2 is bracket-closed"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--w", required=True, help="Field list or catalog name for W")
        parser.add_argument("--v2", required=True, help="Field list or catalog name for V2")

    async def _execute_command(self, params: Parameters) -> CommandResult:
        w_list = await load_field_list(params.w)
        v2_list = await load_field_list(params.v2)
        scheme = await self.run_blocking(check_scheme, w_list.space(), v2_list.space())
        report = SchemeReportModel.build(
            scheme, w_list.fields, v2_list.fields, w_list.names, v2_list.names
        )
        return CommandResult.success_result(report, verdict=scheme.is_scheme)
