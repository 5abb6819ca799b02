"""
Superposition commands for quasilie: ``superpose`` and ``verify``.

Both take a family document (ghj, sode in the g,h,j family, or riccati2)
and particular solutions as CSV trajectories. Second-order Riccati families
are handled in the chart z = sqrt(a3) x unless ``--no-scaling`` is given.
"""

import argparse
from dataclasses import dataclass
from typing import List, Optional

from ..numerics.integrator import IvpConfig
from ..numerics.trajectory import Trajectory
from ..numerics.trajectory_io import read_trajectory_csv
from ..parsers.parser_factory import load_system
from ..parsers.system_parser import LoadedSystem
from ..reports import SuperposeReport, VerificationReport
from ..superposition.pipeline import IDENTITY_CHART, ScaleChart, superpose, verify_superposition
from ..systems.families import GHJFamily, riccati2_to_family
from .arguments import parse_float_list, parse_paths, parse_window
from .base import BaseCommand, CommandParameters, CommandResult


@dataclass(frozen=True)
class WorkingSetup:
    """Chart and working-coordinate family of a superposition run."""

    chart: ScaleChart
    family: Optional[GHJFamily]
    chart_name: str


def working_setup(system: LoadedSystem, use_scaling: bool) -> WorkingSetup:
    """
    Raises:
        FamilyMismatchError: If the system is neither riccati2 nor in the g,h,j family
    """
    if system.riccati is not None:
        if use_scaling:
            return WorkingSetup(
                ScaleChart.for_riccati2(system.riccati),
                riccati2_to_family(system.riccati),
                "sqrt(a3)",
            )
        return WorkingSetup(IDENTITY_CHART, None, "identity")
    return WorkingSetup(IDENTITY_CHART, system.require_family(), "identity")


async def read_solutions(system: LoadedSystem, paths: List[str]) -> List[Trajectory]:
    """Read CSV trajectories; node derivatives come from the system's lift."""
    rhs = system.tdvf.compile()
    return [await read_trajectory_csv(path, rhs) for path in paths]


class SuperposeCommand(BaseCommand):
    """Evaluate the superposed solution for a target initial condition."""

    class Parameters(CommandParameters):
        family: str
        solutions: str
        target_ic: str
        eval_at: str
        t0: Optional[float] = None
        no_scaling: bool = False

    def get_command_name(self) -> str:
        return "superpose"

    def get_command_description(self) -> str:
        return "Evaluate the superposition rule from three particular solutions"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--family", required=True, help="Family document (ghj, sode or riccati2)")
        parser.add_argument("--solutions", required=True, help="Three CSV trajectories, comma-separated")
        parser.add_argument("--target-ic", dest="target_ic", required=True, help="Target state 'x0, v0'")
        parser.add_argument("--t0", type=float, help="Reference time (default: start of the solutions)")
        parser.add_argument("--eval-at", dest="eval_at", required=True, help="Evaluation times 't1, t2, ...'")
        parser.add_argument(
            "--no-scaling", dest="no_scaling", action="store_true", default=None,
            help="Skip the sqrt(a3) chart for riccati2 families",
        )

    async def _execute_command(self, params: Parameters) -> CommandResult:
        system = await load_system(params.family)
        setup = working_setup(system, not params.no_scaling)
        solutions = await read_solutions(system, parse_paths(params.solutions, "solutions", 3))
        target_ic = parse_float_list(params.target_ic, "target-ic", 2)
        t_eval = parse_float_list(params.eval_at, "eval-at")
        t0 = params.t0 if params.t0 is not None else max(sol.t_start for sol in solutions)
        cfg = IvpConfig.from_config(self.config, max_step=self.config.companion_max_step)

        curve = await self.run_blocking(
            superpose, solutions, target_ic, t0, t_eval, setup.chart, setup.family, cfg,
            self.config.genericity_threshold,
        )
        report = SuperposeReport.build(params.family, setup.chart_name, target_ic, curve)
        return CommandResult.success_result(report)


class VerifyCommand(BaseCommand):
    """Verify a superposition rule against an independently integrated target."""

    class Parameters(CommandParameters):
        family: str
        solutions: str
        target: str
        window: str
        t0: Optional[float] = None
        no_scaling: bool = False

    def get_command_name(self) -> str:
        return "verify"

    def get_command_description(self) -> str:
        return "Compare the superposed curve with a target trajectory and check constant drift"

    def configure_parser(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--family", required=True, help="Family document (ghj, sode or riccati2)")
        parser.add_argument("--solutions", required=True, help="Three CSV trajectories, comma-separated")
        parser.add_argument("--target", required=True, help="CSV trajectory of the target solution")
        parser.add_argument("--window", required=True, help="Comparison window a:b")
        parser.add_argument("--t0", type=float, help="Fitting time (default: window start)")
        parser.add_argument(
            "--no-scaling", dest="no_scaling", action="store_true", default=None,
            help="Skip the sqrt(a3) chart for riccati2 families",
        )

    async def _execute_command(self, params: Parameters) -> CommandResult:
        system = await load_system(params.family)
        setup = working_setup(system, not params.no_scaling)
        solutions = await read_solutions(system, parse_paths(params.solutions, "solutions", 3))
        (target,) = await read_solutions(system, [params.target])
        window = parse_window(params.window, "window")
        t0 = params.t0 if params.t0 is not None else window[0]
        cfg = IvpConfig.from_config(self.config, max_step=self.config.companion_max_step)

        result = await self.run_blocking(
            verify_superposition,
            system.sode, solutions, target, t0, window,
            chart=setup.chart,
            working_family=setup.family,
            cfg=cfg,
            genericity_threshold=self.config.genericity_threshold,
        )
        report = VerificationReport.build(params.family, setup.chart_name, result)
        return CommandResult.success_result(report, verdict=result.passed)
