"""quasilie: Lie systems, quasi-Lie schemes and superposition rules

Exact Lie-bracket computations on polynomial vector fields, t-dependent
scalings of time-dependent systems, and numerically verified superposition
rules for second-order Riccati-type equations.
"""

__version__ = "0.1.0"

from .config import AnalysisConfig
from .errors import QuasiLieError
from .logging_config import get_logger, setup_logging

__all__ = [
    "AnalysisConfig",
    "QuasiLieError",
    "get_logger",
    "setup_logging",
]
