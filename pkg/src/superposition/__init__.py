"""Companion linearization and superposition rules for quasilie."""

from .companion import (
    CompanionBasis,
    CompanionDependency,
    CompanionLift,
    SuperposedPoint,
    SuperpositionConstants,
    companion_dependency,
    companion_lift,
    fit_constants,
    superpose_eval,
)
from .pipeline import (
    IDENTITY_CHART,
    ScaleChart,
    SuperposedCurve,
    SuperpositionReport,
    superpose,
    superpose_riccati2_general,
    verify_riccati2_superposition,
    verify_superposition,
)

__all__ = [
    'CompanionBasis',
    'CompanionDependency',
    'CompanionLift',
    'SuperposedPoint',
    'SuperpositionConstants',
    'companion_dependency',
    'companion_lift',
    'fit_constants',
    'superpose_eval',
    'IDENTITY_CHART',
    'ScaleChart',
    'SuperposedCurve',
    'SuperpositionReport',
    'superpose',
    'superpose_riccati2_general',
    'verify_riccati2_superposition',
    'verify_superposition',
]
