"""
Shared fixtures for the quasilie test suite.
"""

from pathlib import Path

import pytest

from src.algebra.catalog import riccati2_scheme_V2, sl3_realization
from src.numerics.integrator import IvpConfig
from src.parsers import parser_factory


# Integration settings used by the superposition checks
TIGHT_CONFIG = IvpConfig(rtol=1e-10, atol=1e-12, max_step=1e-3)

FORCED_SIN_DOC = """\
format_version: 1
name: forced sin
sode:
  x: "sin(t) - 3*x*v - x^3"
"""

FORCED_ZERO_DOC = """\
format_version: 1
ghj: {}
"""

SYMBOLIC_F_DOC = """\
format_version: 1
sode:
  x: "f(t) - 3*x*v - x^3"
"""

GHJ_DOC = """\
format_version: 1
ghj:
  g: "1"
  h: "t"
  j: "cos(t)"
interval: [0, 1]
"""

RICCATI_EXP2_DOC = """\
format_version: 1
riccati2:
  a0: "1"
  a1: "t"
  a2: "sin(t)"
  a3: "exp(2*t)"
"""

RICCATI_EXP_DOC = """\
format_version: 1
riccati2:
  a0: "1"
  a1: "0"
  a2: "t"
  a3: "exp(t)"
interval: [0, 1]
"""

GENERATORS_TEXT = """\
# lift of x'' + 3 x x' + x^3 = f(t)
variables: x, v
X1 = v*d/dx - (3*x*v + x^3)*d/dv
X2 = d/dv
"""


@pytest.fixture(autouse=True)
def fresh_parser_factory(monkeypatch):
    """Give every test its own default parser factory."""
    monkeypatch.setattr(parser_factory, "_default_factory", None)


@pytest.fixture
def sl3():
    return sl3_realization()


@pytest.fixture
def v2_fields():
    return riccati2_scheme_V2()


@pytest.fixture
def write_doc(tmp_path: Path):
    """Write a document into the test directory and return its path as text."""

    def _write(name: str, content: str) -> str:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)

    return _write
