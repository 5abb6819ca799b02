"""
System commands for quasilie: ``lift``, ``decompose`` and ``certify``.
"""

import argparse
from typing import Tuple

from ..errors import ConfigurationError
from ..parsers.field_list_parser import FieldList
from ..parsers.parser_factory import load_field_list, load_system
from ..parsers.system_parser import LoadedSystem
from ..reports import (
    CertificateReport,
    DecomposeReport,
    DecompositionModel,
    LiftReport,
    SchemeReportModel,
    term_models,
)
from ..systems.tdvf import decompose_onto_basis
from ..systems.transform import certify_quasi_lie
from .arguments import describe_scaling, parse_scaling, split_top_level
from .base import BaseCommand, CommandParameters, CommandResult


def _sampling(command: BaseCommand, system: LoadedSystem):
    return system.interval, command.config.sample_count, command.config.sample_tolerance


class LiftCommand(BaseCommand):
    """List the first-order lift of a second-order system."""

    class Parameters(CommandParameters):
        sode: str

    def get_command_name(self) -> str:
        return "lift"

    def get_command_description(self) -> str:
        return "List the first-order lift x' = v, v' = F(t, x, v) of a second-order system"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--sode", required=True, help="System document in sode, ghj or riccati2 form")

    async def _execute_command(self, params: Parameters) -> CommandResult:
        system = await load_system(params.sode)
        if system.sode is None:
            raise ConfigurationError(
                f"{params.sode} is a first-order system ('fields' form); lift needs a second-order one"
            )
        family = None
        if system.family is not None:
            family = {name: str(getattr(system.family, name)) for name in ("g", "h", "j")}
        report = LiftReport(
            positions=list(system.sode.positions),
            velocities=list(system.sode.velocities),
            variables=list(system.tdvf.variables),
            terms=term_models(system.tdvf),
            unbound_functions=system.tdvf.parameter_functions(),
            ghj_family=family,
        )
        return CommandResult.success_result(report)


class DecomposeCommand(BaseCommand):
    """Decompose a system onto a basis of fields."""

    class Parameters(CommandParameters):
        system: str
        basis: str = "sl3"

    def get_command_name(self) -> str:
        return "decompose"

    def get_command_description(self) -> str:
        return "Write X(t) = sum c_a(t) X_a on a basis (sl3 or a field list)"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--system", required=True, help="System document")
        parser.add_argument("--basis", help="Catalog name or field list file (default: sl3)")

    async def _execute_command(self, params: Parameters) -> CommandResult:
        system = await load_system(params.system)
        basis = await load_field_list(params.basis)
        interval, count, tolerance = _sampling(self, system)
        decomposition = await self.run_blocking(
            decompose_onto_basis, system.tdvf, basis.space(), interval, count, tolerance
        )
        report = DecomposeReport(
            system=params.system,
            basis=params.basis,
            variables=list(system.tdvf.variables),
            terms=term_models(system.tdvf),
            decomposition=DecompositionModel.build(decomposition, basis.names),
        )
        return CommandResult.success_result(report, verdict=decomposition.succeeded)


class CertifyCommand(BaseCommand):
    """Certify that a system is a quasi-Lie system for a scheme and a scaling."""

    class Parameters(CommandParameters):
        system: str
        scheme: str = "catalog"
        transform: str = "riccati2"
        target: str = "sl3"

    def get_command_name(self) -> str:
        return "certify"

    def get_command_description(self) -> str:
        return "Certify the quasi-Lie property: scheme, scaling and Lie system target"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--system", required=True, help="System document")
        parser.add_argument(
            "--scheme",
            help="'W_FILE,V2_FILE' or 'catalog' for the second-order Riccati scheme (default)",
        )
        parser.add_argument(
            "--transform",
            help="Scaling: 'riccati2' (default), 'v=exp(-t)' items or one factor per variable",
        )
        parser.add_argument("--target", help="Catalog name or field list file (default: sl3)")

    async def _scheme_lists(self, text: str) -> Tuple[FieldList, FieldList]:
        if text == "catalog":
            return await load_field_list("W"), await load_field_list("V2")
        parts = split_top_level(text)
        if len(parts) != 2:
            raise ConfigurationError("--scheme needs 'catalog' or two sources 'W,V2'")
        return await load_field_list(parts[0]), await load_field_list(parts[1])

    async def _execute_command(self, params: Parameters) -> CommandResult:
        system = await load_system(params.system)
        w_list, v2_list = await self._scheme_lists(params.scheme)
        target = await load_field_list(params.target)
        transform = parse_scaling(params.transform, system.tdvf.variables, system.riccati)
        interval, count, tolerance = _sampling(self, system)

        certificate = await self.run_blocking(
            certify_quasi_lie,
            system.tdvf, w_list.space(), v2_list.space(), transform, target.space(),
            interval, count, tolerance,
        )
        scheme = None
        if certificate.scheme is not None:
            scheme = SchemeReportModel.build(
                certificate.scheme, w_list.fields, v2_list.fields,
                w_list.names, v2_list.names, command="certify",
            )
        report = CertificateReport.build(
            params.system, certificate, describe_scaling(transform),
            scheme, v2_list.names, target.names,
        )
        return CommandResult.success_result(report, verdict=certificate.verdict)
