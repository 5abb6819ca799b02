"""
Logging configuration for quasilie.

All loggers live under the ``quasilie`` namespace. Console output goes to
stderr so that reports and CSV on stdout stay machine-readable; an optional
rotating log file keeps the per-step DEBUG detail of closures, integrations
and superposition checks.
"""

import logging
import logging.handlers
import sys
import time
from numbers import Real
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Optional

if TYPE_CHECKING:
    from .config import AnalysisConfig


ROOT_LOGGER = "quasilie"

CONSOLE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"
FILE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s [%(funcName)s:%(lineno)d] %(message)s"

LOG_FILE_MAX_BYTES = 10 * 1024 * 1024
LOG_FILE_BACKUPS = 5

# third-party loggers that flood DEBUG output
QUIET_LOGGERS = ("sympy", "asyncio", "lark")


class ConsoleFormatter(logging.Formatter):
    """
    Console formatter for stderr.

    Logger names are shown without the ``quasilie.`` prefix, and the level
    is colored when ``use_color`` is set.
    """

    LEVEL_COLORS = {
        logging.DEBUG: "\033[2m",
        logging.INFO: "\033[32m",
        logging.WARNING: "\033[33m",
        logging.ERROR: "\033[31m",
        logging.CRITICAL: "\033[1;31m",
    }
    RESET = "\033[0m"

    def __init__(self, fmt: str = CONSOLE_FORMAT, use_color: bool = False):
        super().__init__(fmt, datefmt="%H:%M:%S")
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        original = (record.name, record.levelname)
        if record.name.startswith(ROOT_LOGGER + "."):
            record.name = record.name[len(ROOT_LOGGER) + 1:]
        color = self.LEVEL_COLORS.get(record.levelno) if self.use_color else None
        if color:
            record.levelname = f"{color}{record.levelname:<8}{self.RESET}"
        try:
            return super().format(record)
        finally:
            record.name, record.levelname = original


def setup_logging(
    level: str = "INFO",
    log_file: Optional[str] = None,
    enable_colors: bool = True,
) -> logging.Logger:
    """
    Configure the ``quasilie`` logger.

    Repeated calls replace the handlers of earlier calls.

    Args:
        level: Level name; unknown names fall back to INFO
        log_file: Rotating log file (10 MB x 5), created with its directory
        enable_colors: Color the console levels when stderr is a terminal

    Returns:
        The ``quasilie`` logger
    """
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    log_level = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(log_level)
    logger.propagate = True

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(log_level)
    console.setFormatter(ConsoleFormatter(use_color=enable_colors and sys.stderr.isatty()))
    logger.addHandler(console)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            path, maxBytes=LOG_FILE_MAX_BYTES, backupCount=LOG_FILE_BACKUPS, encoding="utf-8"
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        logger.addHandler(file_handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    logger.debug(
        f"Logging at {logging.getLevelName(log_level)}"
        + (f", file {log_file}" if log_file else "")
    )
    return logger


def configure_logging(config: "AnalysisConfig") -> logging.Logger:
    """Configure logging from the level and file of an ``AnalysisConfig``."""
    return setup_logging(config.log_level, config.log_file)


def get_logger(name: str) -> logging.Logger:
    """
    Logger under the ``quasilie`` namespace.

    Module names are accepted as they come from ``__name__``: the leading
    ``src.`` package is dropped, so ``src.algebra.polynomial`` logs as
    ``quasilie.algebra.polynomial``.
    """
    if name.startswith("src."):
        name = name[4:]
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def _format_metric(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, Real):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.3g}"


class PerformanceLogger:
    """
    Times an operation and logs it with its metrics at DEBUG.

    Works with ``with`` in the exact-algebra and numerical code and with
    ``async with`` in the command layer::

        with PerformanceLogger("close_under_bracket", logger) as perf:
            ...
            perf.set_metrics(dimension=8, closed=True)

    Operations slower than ``slow_seconds`` are repeated as a warning.
    """

    SLOW_OPERATION_SECONDS = 1.0

    def __init__(
        self,
        operation_name: str,
        logger: Optional[logging.Logger] = None,
        slow_seconds: Optional[float] = None,
    ):
        self.operation_name = operation_name
        self.logger = logger or get_logger("performance")
        self.slow_seconds = self.SLOW_OPERATION_SECONDS if slow_seconds is None else slow_seconds
        self.start_time: Optional[float] = None
        self.duration: Optional[float] = None
        self.metrics: Dict[str, Any] = {}

    def _metrics_text(self) -> str:
        if not self.metrics:
            return ""
        return " (" + ", ".join(f"{k}={_format_metric(v)}" for k, v in self.metrics.items()) + ")"

    def __enter__(self) -> "PerformanceLogger":
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        if self.start_time is None:
            return
        self.duration = time.perf_counter() - self.start_time
        if exc_type is not None:
            self.logger.debug(
                f"{self.operation_name} aborted after {self.duration:.3f}s by "
                f"{exc_type.__name__}{self._metrics_text()}"
            )
            return
        self.logger.debug(f"{self.operation_name} took {self.duration:.3f}s{self._metrics_text()}")
        if self.duration > self.slow_seconds:
            self.logger.warning(f"Slow operation: {self.operation_name} took {self.duration:.3f}s")

    async def __aenter__(self) -> "PerformanceLogger":
        return self.__enter__()

    async def __aexit__(self, exc_type, exc_val, exc_tb) -> None:
        self.__exit__(exc_type, exc_val, exc_tb)

    def add_metric(self, name: str, value: Any) -> None:
        self.metrics[name] = value

    def set_metrics(self, **kwargs: Any) -> None:
        self.metrics.update(kwargs)
