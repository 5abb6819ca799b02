"""
Numerical commands for quasilie: ``integrate`` and ``sample``.
"""

import argparse
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import Field

from ..errors import EXIT_NUMERICAL_ERROR, EXIT_OK, ConfigurationError
from ..numerics.integrator import IvpConfig, solve_ivp
from ..numerics.sampling import sample_solutions
from ..numerics.trajectory_io import format_trajectory_csv, write_trajectory_csv
from ..parsers.parser_factory import load_system
from ..parsers.system_parser import LoadedSystem
from ..reports import IntegrationReport, SampleReport
from .arguments import parse_float_list, parse_window, split_top_level
from .base import BaseCommand, CommandParameters, CommandResult


class ToleranceParameters(CommandParameters):
    rtol: Optional[float] = Field(default=None, gt=0)
    atol: Optional[float] = Field(default=None, gt=0)
    max_step: Optional[float] = Field(default=None, gt=0)


def add_tolerance_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rtol", type=float, help="Relative tolerance")
    parser.add_argument("--atol", type=float, help="Absolute tolerance")
    parser.add_argument("--max-step", dest="max_step", type=float, help="Largest step")


def integration_config(
    command: BaseCommand, system: LoadedSystem, params: ToleranceParameters
) -> IvpConfig:
    """Tolerances from the configuration, then the system document, then the flags."""
    overrides: Dict[str, float] = {}
    for name in ("rtol", "atol", "max_step"):
        for source in (system.spec, params):
            value = getattr(source, name)
            if value is not None:
                overrides[name] = value
    return IvpConfig.from_config(command.config, **overrides)


def system_span(command: BaseCommand, system: LoadedSystem, text: Optional[str]) -> Tuple[float, float]:
    if text:
        return parse_window(text)
    if system.spec.interval is not None:
        return tuple(system.spec.interval)
    return command.config.interval


def monitor_indices(system: LoadedSystem, text: Optional[str]) -> Optional[List[int]]:
    """Indices of the monitored variables; positions by default for second-order systems."""
    variables = system.tdvf.variables
    if text:
        names = split_top_level(text)
        unknown = [n for n in names if n not in variables]
        if unknown:
            raise ConfigurationError(f"--monitor names unknown variables {unknown}")
        return [variables.index(n) for n in names]
    if system.sode is not None:
        return [variables.index(p) for p in system.sode.positions]
    return None


class IntegrateCommand(BaseCommand):
    """Integrate a system from an initial condition and print the CSV trajectory."""

    class Parameters(ToleranceParameters):
        system: str
        ic: str
        span: Optional[str] = None
        monitor: Optional[str] = None
        output: Optional[str] = None

    def get_command_name(self) -> str:
        return "integrate"

    def get_command_description(self) -> str:
        return "Integrate a system with the adaptive Dormand-Prince method (CSV output)"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--system", required=True, help="System document")
        parser.add_argument("--ic", required=True, help="Initial state, e.g. '1, 0'")
        parser.add_argument("--span", help="Time span a:b (default: the system interval)")
        parser.add_argument(
            "--monitor", help="Variables checked for blow-up (default: positions, or all)"
        )
        parser.add_argument("--output", help="Write the CSV here and print the report instead")
        add_tolerance_arguments(parser)

    async def _execute_command(self, params: Parameters) -> CommandResult:
        system = await load_system(params.system)
        variables = system.tdvf.variables
        ic = parse_float_list(params.ic, "ic", len(variables))
        a, b = system_span(self, system, params.span)
        cfg = integration_config(self, system, params)
        monitor = monitor_indices(system, params.monitor)

        rhs = system.tdvf.compile()
        traj = await self.run_blocking(solve_ivp, rhs, ic, a, b, cfg, variables, monitor)
        if not traj.completed:
            self.logger.warning(f"Integration ended with {traj.status.value} at t={traj.t_event}")

        text = None
        if params.output:
            await write_trajectory_csv(traj, params.output)
        else:
            text = format_trajectory_csv(traj)
        report = IntegrationReport.build(params.system, ic, (a, b), traj, params.output)
        exit_code = EXIT_OK if traj.completed else EXIT_NUMERICAL_ERROR
        return CommandResult.success_result(report, text=text, exit_code=exit_code)


class SampleCommand(BaseCommand):
    """Draw seeded pole-free particular solutions and write them as CSV files."""

    class Parameters(ToleranceParameters):
        system: str
        output_dir: str
        count: int = Field(default=3, gt=0)
        span: Optional[str] = None
        box: str = "-1:1"
        sample_seed: Optional[int] = None
        prefix: str = "solution"

    def get_command_name(self) -> str:
        return "sample"

    def get_command_description(self) -> str:
        return "Sample pole-free particular solutions from seeded initial conditions"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--system", required=True, help="System document")
        parser.add_argument("--output-dir", dest="output_dir", required=True, help="Directory for CSV files")
        parser.add_argument("--count", type=int, help="Number of solutions (default: 3)")
        parser.add_argument("--span", help="Time span a:b (default: the system interval)")
        parser.add_argument(
            "--box", help="Initial-condition box, one 'lo:hi' per variable or one for all (default: -1:1)"
        )
        parser.add_argument("--sample-seed", dest="sample_seed", type=int, help="Seed (default: --seed)")
        parser.add_argument("--prefix", help="File name prefix (default: solution)")
        add_tolerance_arguments(parser)

    async def _execute_command(self, params: Parameters) -> CommandResult:
        system = await load_system(params.system)
        variables = system.tdvf.variables
        boxes = [parse_window(item, "box") for item in split_top_level(params.box)]
        if len(boxes) == 1:
            boxes = boxes * len(variables)
        if len(boxes) != len(variables):
            raise ConfigurationError(f"--box needs 1 or {len(variables)} ranges, got {len(boxes)}")
        a, b = system_span(self, system, params.span)
        seed = next(s for s in (params.sample_seed, system.spec.seed, self.config.seed) if s is not None)
        cfg = integration_config(self, system, params)

        sampled = await sample_solutions(
            system.tdvf.compile(), params.count, a, b, boxes, seed, cfg,
            variables=variables, monitor=monitor_indices(system, None),
        )
        directory = Path(params.output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        outputs = []
        for k, traj in enumerate(sampled.trajectories, start=1):
            path = directory / f"{params.prefix}_{k}.csv"
            await write_trajectory_csv(traj, path)
            outputs.append(str(path))

        report = SampleReport(
            system=params.system,
            seed=seed,
            span=(a, b),
            initial_conditions=sampled.initial_conditions,
            outputs=outputs,
            rejected=sampled.rejected,
        )
        return CommandResult.success_result(report)
