"""Field DSL and document parsers for quasilie."""

from .base import DocumentParser, ParserResult
from .field_parser import (
    DEFAULT_VARIABLES,
    format_field,
    format_polynomial,
    parse_field,
    parse_polynomial,
)
from .field_list_parser import FieldList, FieldListParser, parse_field_list, parse_variables
from .system_parser import (
    LoadedSystem,
    SystemDocumentParser,
    SystemSpec,
    build_system,
    parse_system_document,
)
from .parser_factory import (
    ParserFactory,
    get_default_factory,
    is_catalog_name,
    load_field_list,
    load_field_space,
    load_system,
)

__all__ = [
    'DocumentParser',
    'ParserResult',
    'DEFAULT_VARIABLES',
    'format_field',
    'format_polynomial',
    'parse_field',
    'parse_polynomial',
    'FieldList',
    'FieldListParser',
    'parse_field_list',
    'parse_variables',
    'LoadedSystem',
    'SystemDocumentParser',
    'SystemSpec',
    'build_system',
    'parse_system_document',
    'ParserFactory',
    'get_default_factory',
    'is_catalog_name',
    'load_field_list',
    'load_field_space',
    'load_system',
]
