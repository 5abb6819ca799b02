"""
Parser Factory for quasilie

This module provides a factory for document parsers with parser selection
by file extension, plus the loaders the commands use for field lists,
system documents and catalog shortcuts.
"""

from pathlib import Path
from typing import Dict, Optional, Set, Type, Union

from ..algebra.catalog import ALIASES, catalog, catalog_names
from ..algebra.field_space import FieldSpace
from ..errors import ParseError
from ..logging_config import get_logger
from .base import DocumentParser, ParserResult
from .field_list_parser import FieldList, FieldListParser
from .field_parser import DEFAULT_VARIABLES
from .system_parser import LoadedSystem, SystemDocumentParser


class ParserFactory:
    """
    Factory for creating and managing document parsers.

    Parsers are registered by name; each file extension maps to the parser
    registered last for it.
    """

    def __init__(self, logger=None):
        self.logger = logger or get_logger(__name__)

        self._parsers: Dict[str, Type[DocumentParser]] = {}
        self._parser_instances: Dict[str, DocumentParser] = {}
        self._extension_mapping: Dict[str, str] = {}

        self._register_default_parsers()

    def _register_default_parsers(self) -> None:
        self.register_parser("fields", FieldListParser)
        self.register_parser("system", SystemDocumentParser)
        self.logger.debug(f"Registered {len(self._parsers)} default parsers")

    def register_parser(self, name: str, parser_class: Type[DocumentParser]) -> None:
        """
        Register a new parser class.

        Raises:
            ValueError: If the class is not a DocumentParser
        """
        if not (isinstance(parser_class, type) and issubclass(parser_class, DocumentParser)):
            raise ValueError(f"Parser class must inherit from DocumentParser: {parser_class}")
        if name in self._parsers:
            self.logger.warning(f"Overriding existing parser: {name}")

        self._parsers[name] = parser_class
        self._parser_instances.pop(name, None)
        for ext in self.get_parser(name).get_supported_extensions():
            if ext in self._extension_mapping:
                self.logger.debug(
                    f"Extension {ext} already mapped to {self._extension_mapping[ext]}, overriding with {name}"
                )
            self._extension_mapping[ext] = name

    def get_parser(self, parser_name: str) -> DocumentParser:
        """
        Get the (cached) parser instance by name.

        Raises:
            KeyError: If no parser is registered under that name
        """
        if parser_name not in self._parsers:
            raise KeyError(f"Unknown parser: {parser_name}")
        if parser_name not in self._parser_instances:
            self._parser_instances[parser_name] = self._parsers[parser_name]()
        return self._parser_instances[parser_name]

    def get_parser_for_file(self, file_path: Union[str, Path]) -> Optional[DocumentParser]:
        parser_name = self._extension_mapping.get(Path(file_path).suffix.lower())
        return self.get_parser(parser_name) if parser_name else None

    async def parse_file(self, file_path: Union[str, Path]) -> ParserResult:
        """
        Parse a file with the parser registered for its extension.

        Returns:
            ParserResult; unsupported extensions give an unsuccessful result
        """
        parser = self.get_parser_for_file(file_path)
        if parser is None:
            return ParserResult(
                success=False,
                error=ParseError(
                    f"No parser for {Path(file_path).suffix or 'extensionless'} files; "
                    f"supported: {', '.join(sorted(self.get_supported_extensions()))}",
                    source=str(file_path),
                ),
            )
        return await parser.parse_file(file_path)

    def get_supported_extensions(self) -> Set[str]:
        return set(self._extension_mapping)


_default_factory: Optional[ParserFactory] = None


def get_default_factory() -> ParserFactory:
    """Get or create the default parser factory instance."""
    global _default_factory
    if _default_factory is None:
        _default_factory = ParserFactory()
    return _default_factory


def is_catalog_name(name: str) -> bool:
    return name in ALIASES or name in catalog_names()


async def load_field_list(source: str) -> FieldList:
    """
    Load a field list from a catalog name (``sl3``, ``V2``, ``W``...) or a file.

    Raises:
        ParseError: If the file cannot be read or parsed
    """
    if is_catalog_name(source) and not Path(source).is_file():
        fields = catalog(source)
        prefix = "Y" if ALIASES.get(source, source).startswith("riccati2") else "X"
        if source in ("W", "riccati2_scheme_W"):
            names = ("Y2", "Y8")
        else:
            names = tuple(f"{prefix}{k + 1}" for k in range(len(fields)))
        return FieldList(DEFAULT_VARIABLES, names, tuple(fields))
    result = await get_default_factory().parse_file(source)
    document = result.unwrap()
    if not isinstance(document, FieldList):
        if isinstance(document, LoadedSystem):
            return FieldList(
                document.variables,
                tuple(f"F{k + 1}" for k in range(len(document.tdvf.fields))),
                document.tdvf.fields,
            )
        raise ParseError(f"{source} is not a field list", source=source)
    return document


async def load_field_space(source: str) -> FieldSpace:
    return (await load_field_list(source)).space()


async def load_system(source: str) -> LoadedSystem:
    """
    Load a system document.

    Raises:
        ParseError: If the file is not a valid system document
    """
    document = (await get_default_factory().parse_file(source)).unwrap()
    if not isinstance(document, LoadedSystem):
        raise ParseError(f"{source} is not a system document", source=source)
    return document
