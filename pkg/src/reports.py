"""
Report documents for quasilie.

Every command prints one report as JSON. Reports are pydantic models with a
``format_version`` and the ``command`` that produced them; the field names
are part of the command-line contract and are documented in the README.
"""

from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import sympy
from pydantic import BaseModel, ConfigDict, Field

from .algebra.field_space import BracketWitness, ClosureResult, SchemeReport
from .algebra.polynomial import PolyVectorField
from .errors import QuasiLieError
from .numerics.trajectory import Trajectory
from .parsers.field_parser import format_field
from .superposition.pipeline import SuperposedCurve, SuperpositionReport
from .systems.tdvf import TDVF, Decomposition
from .systems.transform import QuasiLieCertificate


REPORT_FORMAT_VERSION = 1


class Report(BaseModel):
    """Common header of all report documents."""

    model_config = ConfigDict(extra="forbid")

    format_version: Literal[1] = REPORT_FORMAT_VERSION
    command: str

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


# Shared pieces ------------------------------------------------------------


class ErrorInfo(BaseModel):
    code: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)


class TermModel(BaseModel):
    """One ``coefficient(t) * field`` term of a time-dependent field."""

    coefficient: str
    field: str


class WitnessModel(BaseModel):
    """A failed bracket [left, right] with the part left outside the span."""

    left: int
    right: int
    left_name: Optional[str] = None
    right_name: Optional[str] = None
    bracket: str
    residual: str


def _expr_text(expr) -> str:
    return str(sympy.sympify(expr))


def term_models(X: TDVF) -> List[TermModel]:
    return [TermModel(coefficient=_expr_text(c), field=format_field(vf)) for c, vf in X.terms]


def witness_model(
    witness: BracketWitness,
    left_names: Optional[Sequence[str]] = None,
    right_names: Optional[Sequence[str]] = None,
) -> WitnessModel:
    def name(names, index):
        return names[index] if names is not None and index < len(names) else None

    return WitnessModel(
        left=witness.left,
        right=witness.right,
        left_name=name(left_names, witness.left),
        right_name=name(right_names, witness.right),
        bracket=format_field(witness.bracket),
        residual=format_field(witness.residual),
    )


# Command reports ----------------------------------------------------------


class ErrorReport(Report):
    error: ErrorInfo
    exit_code: int

    @classmethod
    def from_error(cls, command: str, error: QuasiLieError) -> "ErrorReport":
        return cls(command=command, error=ErrorInfo(**error.to_dict()), exit_code=error.exit_code)


class BracketReport(Report):
    command: str = "bracket"
    variables: List[str]
    left: str
    right: str
    bracket: str
    is_zero: bool


class ClosureReportModel(Report):
    command: str = "close"
    variables: List[str]
    generator_count: int
    max_dim: int
    dimension: int
    closed: bool
    basis: List[str]
    adjoined: List[WitnessModel] = Field(default_factory=list)
    overflow: Optional[WitnessModel] = None
    structure_constants: Optional[List[List[List[str]]]] = None
    killing_signature: Optional[Tuple[int, int, int]] = None
    killing_nondegenerate: Optional[bool] = None
    same_span_as: List[str] = Field(default_factory=list)

    @classmethod
    def build(
        cls,
        generators: Sequence[PolyVectorField],
        closure: ClosureResult,
        max_dim: int,
        signature: Optional[Tuple[int, int, int]],
        same_span_as: Sequence[str] = (),
    ) -> "ClosureReportModel":
        constants = closure.structure_constants
        return cls(
            variables=list(closure.space.variables),
            generator_count=len(generators),
            max_dim=max_dim,
            dimension=closure.dimension,
            closed=closure.closed,
            basis=[format_field(vf) for vf in closure.space.basis],
            adjoined=[witness_model(w) for w in closure.adjoined],
            overflow=witness_model(closure.overflow) if closure.overflow else None,
            structure_constants=constants.to_lists() if constants is not None else None,
            killing_signature=signature,
            killing_nondegenerate=signature[2] == 0 if signature is not None else None,
            same_span_as=list(same_span_as),
        )


class SchemeReportModel(Report):
    command: str = "scheme"
    w_basis: List[str]
    v2_basis: List[str]
    w_names: List[str]
    v2_names: List[str]
    w_closed: bool
    action_ok: bool
    v2_closed: bool
    is_scheme: bool
    w_witnesses: List[WitnessModel] = Field(default_factory=list)
    action_witnesses: List[WitnessModel] = Field(default_factory=list)
    v2_witnesses: List[WitnessModel] = Field(default_factory=list)

    @classmethod
    def build(
        cls,
        report: SchemeReport,
        w_fields: Sequence[PolyVectorField],
        v2_fields: Sequence[PolyVectorField],
        w_names: Sequence[str],
        v2_names: Sequence[str],
        command: str = "scheme",
    ) -> "SchemeReportModel":
        return cls(
            command=command,
            w_basis=[format_field(vf) for vf in w_fields],
            v2_basis=[format_field(vf) for vf in v2_fields],
            w_names=list(w_names),
            v2_names=list(v2_names),
            w_closed=report.w_closed,
            action_ok=report.action_ok,
            v2_closed=report.v2_closed,
            is_scheme=report.is_scheme,
            w_witnesses=[witness_model(w, w_names, w_names) for w in report.w_witnesses],
            action_witnesses=[witness_model(w, w_names, v2_names) for w in report.action_witnesses],
            v2_witnesses=[witness_model(w, v2_names, v2_names) for w in report.v2_witnesses],
        )


class LiftReport(Report):
    command: str = "lift"
    positions: List[str]
    velocities: List[str]
    variables: List[str]
    terms: List[TermModel]
    unbound_functions: List[str] = Field(default_factory=list)
    ghj_family: Optional[Dict[str, str]] = None


class DecompositionModel(BaseModel):
    succeeded: bool
    basis_names: List[str]
    coefficients: Optional[Dict[str, str]] = None
    failing_terms: List[TermModel] = Field(default_factory=list)
    residual: List[TermModel] = Field(default_factory=list)

    @classmethod
    def build(cls, decomposition: Decomposition, basis_names: Sequence[str]) -> "DecompositionModel":
        coefficients = None
        if decomposition.coefficients is not None:
            coefficients = {
                name: _expr_text(c) for name, c in zip(basis_names, decomposition.coefficients)
            }
        failing = [
            TermModel(coefficient=_expr_text(c), field=format_field(vf))
            for c, vf in decomposition.failing_terms
        ]
        residual = term_models(decomposition.residual) if decomposition.residual is not None else []
        return cls(
            succeeded=decomposition.succeeded,
            basis_names=list(basis_names),
            coefficients=coefficients,
            failing_terms=failing,
            residual=residual,
        )


class DecomposeReport(Report):
    command: str = "decompose"
    system: str
    basis: str
    variables: List[str]
    terms: List[TermModel]
    decomposition: DecompositionModel


class CertificateReport(Report):
    command: str = "certify"
    system: str
    verdict: bool
    failed_stage: Optional[str] = None
    message: str
    target_closed: bool
    transform: Dict[str, str]
    scheme: Optional[SchemeReportModel] = None
    values_in_v2: DecompositionModel
    transformed: List[TermModel] = Field(default_factory=list)
    decomposition: Optional[DecompositionModel] = None

    @classmethod
    def build(
        cls,
        system: str,
        certificate: QuasiLieCertificate,
        transform: Dict[str, str],
        scheme: Optional[SchemeReportModel],
        v2_names: Sequence[str],
        target_names: Sequence[str],
    ) -> "CertificateReport":
        return cls(
            system=system,
            verdict=certificate.verdict,
            failed_stage=certificate.failed_stage,
            message=certificate.message,
            target_closed=certificate.target_closed,
            transform=transform,
            scheme=scheme,
            values_in_v2=DecompositionModel.build(certificate.values_in_v2, v2_names),
            transformed=term_models(certificate.transformed) if certificate.transformed else [],
            decomposition=(
                DecompositionModel.build(certificate.decomposition, target_names)
                if certificate.decomposition is not None
                else None
            ),
        )


class IntegrationReport(Report):
    command: str = "integrate"
    system: str
    variables: List[str]
    initial_condition: List[float]
    span: Tuple[float, float]
    status: str
    t_event: Optional[float] = None
    nodes: int
    rejected_steps: int
    t_end: float
    final_state: List[float]
    output: Optional[str] = None

    @classmethod
    def build(
        cls,
        system: str,
        ic: Sequence[float],
        span: Tuple[float, float],
        traj: Trajectory,
        output: Optional[str] = None,
    ) -> "IntegrationReport":
        return cls(
            system=system,
            variables=list(traj.variables),
            initial_condition=[float(v) for v in ic],
            span=span,
            status=traj.status.value,
            t_event=traj.t_event,
            nodes=len(traj.times),
            rejected_steps=traj.rejected_steps,
            t_end=traj.t_end,
            final_state=[float(v) for v in traj.final_state],
            output=output,
        )


class SampleReport(Report):
    command: str = "sample"
    system: str
    seed: int
    span: Tuple[float, float]
    initial_conditions: List[List[float]]
    outputs: List[str]
    rejected: int


class PointModel(BaseModel):
    t: float
    x: Optional[float] = None
    v: Optional[float] = None
    denominator: float
    pole: bool


class SuperposeReport(Report):
    command: str = "superpose"
    family: str
    chart: str
    t0: float
    target_ic: Tuple[float, float]
    constants: Tuple[float, float, float]
    k_chart: Optional[Tuple[float, float]] = None
    determinant: float
    points: List[PointModel]
    poles: List[float] = Field(default_factory=list)

    @classmethod
    def build(
        cls, family: str, chart: str, target_ic: Sequence[float], curve: SuperposedCurve
    ) -> "SuperposeReport":
        return cls(
            family=family,
            chart=chart,
            t0=curve.basis.t0,
            target_ic=(float(target_ic[0]), float(target_ic[1])),
            constants=curve.constants.c,
            k_chart=curve.constants.k_chart,
            determinant=curve.basis.determinant,
            points=[
                PointModel(
                    t=p.t,
                    x=None if p.pole else p.x,
                    v=None if p.pole else p.v,
                    denominator=p.denominator,
                    pole=p.pole,
                )
                for p in curve.points
            ],
            poles=curve.poles,
        )


class VerificationReport(Report):
    command: str = "verify"
    family: str
    chart: str
    t0: float
    window: Tuple[float, float]
    constants: Tuple[float, float, float]
    k_chart: Optional[Tuple[float, float]] = None
    determinant: float
    deviation: float
    residual: float
    constant_drift: float
    companion_residual: Optional[float] = None
    refit_times: List[float] = Field(default_factory=list)
    refit_constants: List[Tuple[float, float, float]] = Field(default_factory=list)
    poles: List[float] = Field(default_factory=list)
    passed: bool

    @classmethod
    def build(cls, family: str, chart: str, report: SuperpositionReport) -> "VerificationReport":
        return cls(
            family=family,
            chart=chart,
            t0=report.t0,
            window=report.window,
            constants=report.constants,
            k_chart=report.k_chart,
            determinant=report.determinant,
            deviation=report.deviation,
            residual=report.residual,
            constant_drift=report.constant_drift,
            companion_residual=report.companion_residual,
            refit_times=report.refit_times,
            refit_constants=report.refit_constants,
            poles=report.poles,
            passed=report.passed,
        )


REPORT_MODELS = {
    "bracket": BracketReport,
    "close": ClosureReportModel,
    "scheme": SchemeReportModel,
    "lift": LiftReport,
    "decompose": DecomposeReport,
    "certify": CertificateReport,
    "integrate": IntegrationReport,
    "sample": SampleReport,
    "superpose": SuperposeReport,
    "verify": VerificationReport,
}
