"""
Base Document Parser for quasilie

This module provides the abstract base class for document parsers, which
turn field lists and system documents on disk into domain objects.
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Set, Union

import aiofiles

from ..errors import ParseError, QuasiLieError
from ..logging_config import get_logger


@dataclass
class ParserResult:
    """
    Result from a document parsing operation.

    ``document`` holds the parsed domain object on success; on failure
    ``error`` holds the input error that stopped parsing.
    """

    document: Any = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    success: bool = True
    error: Optional[QuasiLieError] = None

    @property
    def error_message(self) -> Optional[str]:
        return str(self.error) if self.error is not None else None

    def unwrap(self) -> Any:
        """Return the document or raise the parsing error."""
        if not self.success:
            raise self.error or ParseError("Parsing failed")
        return self.document

    def to_dict(self) -> Dict[str, Any]:
        """Convert parser result to dictionary for serialization."""
        return {
            "metadata": self.metadata,
            "success": self.success,
            "error": self.error.to_dict() if self.error else None,
        }


class DocumentParser(ABC):
    """
    Abstract base class for all document parsers.

    Subclasses implement :meth:`parse_content`, which may raise any
    ``QuasiLieError``; :meth:`parse_file` reads the file asynchronously and
    folds such errors into the returned ``ParserResult``.
    """

    def __init__(self, logger=None):
        self.logger = logger or get_logger(f"parsers.{self.__class__.__name__}")
        self.parser_name = self.__class__.__name__

    @abstractmethod
    def get_supported_extensions(self) -> Set[str]:
        """
        Get file extensions supported by this parser.

        Returns:
            Set of supported file extensions (e.g., {'.yaml', '.yml'})
        """

    @abstractmethod
    async def parse_content(self, content: str, file_path: Optional[str] = None) -> ParserResult:
        """
        Parse document content.

        Args:
            content: Document text
            file_path: Optional file path for error messages

        Returns:
            ParserResult containing the parsed document

        Raises:
            QuasiLieError: If the content is not a valid document
        """

    async def parse_file(self, file_path: Union[str, Path]) -> ParserResult:
        """
        Parse a document file from disk.

        Args:
            file_path: Path to the document file

        Returns:
            ParserResult; ``success`` is False when reading or parsing failed
        """
        start_time = time.perf_counter()
        file_path = Path(file_path)

        try:
            if not file_path.is_file():
                raise ParseError(f"File does not exist: {file_path}", source=str(file_path))
            if not self.supports_file(file_path):
                raise ParseError(
                    f"Unsupported file type for {self.parser_name}: {file_path.suffix}",
                    source=str(file_path),
                )

            content = await self._read_file_async(file_path)
            result = await self.parse_content(content, str(file_path))
        except QuasiLieError as e:
            if isinstance(e, ParseError) and e.source is None:
                e.source = str(file_path)
                e.details["source"] = e.source
            self.logger.warning(f"Parse failed for {file_path.name}: {e}")
            result = ParserResult(success=False, error=e)
        except OSError as e:
            self.logger.error(f"Failed to read {file_path}: {e}")
            result = ParserResult(
                success=False, error=ParseError(f"Cannot read {file_path}: {e}", source=str(file_path))
            )

        parse_time = (time.perf_counter() - start_time) * 1000
        if result.success:
            self.logger.debug(f"Parsed {file_path.name} in {parse_time:.2f}ms")
        return result

    def supports_file(self, file_path: Union[str, Path]) -> bool:
        return Path(file_path).suffix.lower() in self.get_supported_extensions()

    async def _read_file_async(self, file_path: Path) -> str:
        """Read file content asynchronously."""
        try:
            async with aiofiles.open(file_path, "r", encoding="utf-8") as file:
                return await file.read()
        except UnicodeDecodeError as e:
            raise ParseError(f"{file_path} is not UTF-8 text: {e}", source=str(file_path)) from e

    def __str__(self) -> str:
        extensions = ", ".join(sorted(self.get_supported_extensions()))
        return f"{self.parser_name}({extensions})"
