"""Time-dependent systems, families and transformations for quasilie."""

from .time_expr import (
    T,
    TimeExpr,
    diff_time,
    eval_time,
    same_time_expr,
    time_expr,
    time_function,
)
from .tdvf import (
    SODE,
    TDVF,
    Decomposition,
    LieSystemCertificate,
    decompose_onto_basis,
    is_lie_system,
    lift_sode,
)
from .families import GHJFamily, Riccati2Spec, family_ghj, match_ghj, riccati2, riccati2_to_family
from .transform import (
    Direction,
    QuasiLieCertificate,
    ScalingTransform,
    certify_quasi_lie,
    push_forward,
    transform_solution,
)

__all__ = [
    'T',
    'TimeExpr',
    'diff_time',
    'eval_time',
    'same_time_expr',
    'time_expr',
    'time_function',
    'SODE',
    'TDVF',
    'Decomposition',
    'LieSystemCertificate',
    'decompose_onto_basis',
    'is_lie_system',
    'lift_sode',
    'GHJFamily',
    'Riccati2Spec',
    'family_ghj',
    'match_ghj',
    'riccati2',
    'riccati2_to_family',
    'Direction',
    'QuasiLieCertificate',
    'ScalingTransform',
    'certify_quasi_lie',
    'push_forward',
    'transform_solution',
]
