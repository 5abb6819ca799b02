"""Exact algebra of polynomial vector fields for quasilie."""

from .polynomial import (
    MAX_INPUT_DEGREE,
    Polynomial,
    PolyVectorField,
    bracket,
    lie_derivative_scalar,
    linear_combination,
    monomial_field,
)
from .field_space import (
    BracketWitness,
    ClosureResult,
    FieldSpace,
    KillingSignature,
    SchemeReport,
    SpanMembership,
    StructureConstants,
    check_scheme,
    close_under_bracket,
    killing_signature,
    span_contains,
)
from .catalog import catalog, catalog_names, catalog_space

__all__ = [
    'MAX_INPUT_DEGREE',
    'Polynomial',
    'PolyVectorField',
    'bracket',
    'lie_derivative_scalar',
    'linear_combination',
    'monomial_field',
    'BracketWitness',
    'ClosureResult',
    'FieldSpace',
    'KillingSignature',
    'SchemeReport',
    'SpanMembership',
    'StructureConstants',
    'check_scheme',
    'close_under_bracket',
    'killing_signature',
    'span_contains',
    'catalog',
    'catalog_names',
    'catalog_space',
]
