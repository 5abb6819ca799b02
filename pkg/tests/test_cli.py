"""
Tests for the quasilie command line.

Each test calls ``main`` with an argument list and checks the exit status and
what was written to stdout.
"""

import json
import logging

import pytest

from src.main import build_parser, create_config_from_args, main
from src.commands import create_registry
from tests.conftest import (
    FORCED_SIN_DOC,
    FORCED_ZERO_DOC,
    GENERATORS_TEXT,
    RICCATI_EXP2_DOC,
    SYMBOLIC_F_DOC,
)


TIGHT_FLAGS = ["--rtol", "1e-10", "--atol", "1e-12", "--max-step", "1e-3"]


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop the handlers main() installs on captured streams."""
    yield
    logging.getLogger("quasilie").handlers.clear()


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


class TestArgumentHandling:
    """Test global flags and configuration."""

    def test_global_flags(self):
        parser = build_parser(create_registry())
        args = parser.parse_args(["--seed", "7", "--debug", "bracket", "d/dx", "d/dv"])
        config = create_config_from_args(args)
        assert config.seed == 7
        assert config.debug_mode
        assert config.log_level == "DEBUG"

    def test_invalid_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("QUASILIE_MAX_DIM", "0")
        code, out = run(capsys, "bracket", "d/dx", "d/dv")
        assert code == 2
        assert out == ""

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as exc_info:
            main([])
        assert exc_info.value.code == 2


class TestAlgebraCommands:
    """Test bracket, close and scheme."""

    def test_bracket(self, capsys):
        code, out = run(capsys, "bracket", "v*d/dx", "x*d/dv")
        assert code == 0
        assert out == "-x*d/dx + v*d/dv\n"

    def test_bracket_json(self, capsys):
        code, report = run_json(capsys, "--json", "bracket", "d/dx", "x*d/dx")
        assert code == 0
        assert report["bracket"] == "d/dx"
        assert report["command"] == "bracket"

    def test_bracket_rejects_floats(self, capsys):
        code, report = run_json(capsys, "bracket", "1.5*d/dx", "d/dv")
        assert code == 2
        assert report["error"]["code"] == "E_PARSE"
        assert report["exit_code"] == 2

    def test_close_generators(self, capsys, write_doc):
        path = write_doc("gens.fields", GENERATORS_TEXT)
        code, report = run_json(capsys, "close", "--generators", path)
        assert code == 0
        assert report["dimension"] == 8
        assert report["closed"] is True
        assert report["killing_signature"] == [5, 3, 0]
        assert "sl3_realization" in report["same_span_as"]

    def test_close_overflow(self, capsys, write_doc):
        path = write_doc("gens.fields", GENERATORS_TEXT)
        code, report = run_json(capsys, "close", "--generators", path, "--max-dim", "4")
        assert code == 1
        assert report["closed"] is False
        assert report["overflow"] is not None

    def test_scheme(self, capsys):
        code, report = run_json(capsys, "scheme", "--w", "W", "--v2", "V2")
        assert code == 0
        assert report["is_scheme"] is True

    def test_missing_file(self, capsys, tmp_path):
        code, report = run_json(capsys, "close", "--generators", str(tmp_path / "none.fields"))
        assert code == 2
        assert report["error"]["code"] == "E_PARSE"


class TestSystemCommands:
    """Test lift, decompose and certify."""

    def test_lift(self, capsys, write_doc):
        code, report = run_json(capsys, "lift", "--sode", write_doc("f.yaml", SYMBOLIC_F_DOC))
        assert code == 0
        assert report["variables"] == ["x", "v"]
        assert report["unbound_functions"] == ["f"]
        assert report["ghj_family"]["j"] == "-f(t)"

    def test_lift_needs_second_order_system(self, capsys, write_doc):
        path = write_doc("fields.yaml", 'format_version: 1\nfields: ["d/dx"]\n')
        code, report = run_json(capsys, "lift", "--sode", path)
        assert code == 2
        assert report["error"]["code"] == "E_CONFIG"

    def test_decompose_forced_family(self, capsys, write_doc):
        code, report = run_json(capsys, "decompose", "--system", write_doc("f.yaml", SYMBOLIC_F_DOC))
        assert code == 0
        coefficients = report["decomposition"]["coefficients"]
        assert coefficients["X1"] == "1"
        assert coefficients["X2"] == "f(t)"
        assert all(coefficients[f"X{k}"] == "0" for k in range(3, 9))

    def test_decompose_failure(self, capsys, write_doc):
        path = write_doc("quintic.yaml", 'format_version: 1\nfields: ["x^5*d/dx"]\n')
        code, report = run_json(capsys, "decompose", "--system", path)
        assert code == 1
        assert report["decomposition"]["succeeded"] is False
        assert report["decomposition"]["failing_terms"]

    def test_certify_riccati2(self, capsys, write_doc):
        code, report = run_json(capsys, "certify", "--system", write_doc("r.yaml", RICCATI_EXP2_DOC))
        assert code == 0
        assert report["verdict"] is True
        assert report["failed_stage"] is None
        assert report["target_closed"] is True


class TestNumericalCommands:
    """Test integrate, sample and verify."""

    def test_integrate_csv(self, capsys, write_doc):
        path = write_doc("f.yaml", FORCED_SIN_DOC)
        code, out = run(capsys, "integrate", "--system", path, "--ic", "0.5, 0", "--span", "0:1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "t,x,v"
        assert lines[1].startswith("0")
        assert float(lines[-1].split(",")[0]) == 1.0

    def test_integrate_blowup(self, capsys, write_doc):
        path = write_doc("zero.yaml", FORCED_ZERO_DOC)
        code, report = run_json(
            capsys, "--json", "integrate", "--system", path, "--ic=-1, -1", "--span", "0:2"
        )
        assert code == 3
        assert report["status"] == "blew_up"
        assert abs(report["t_event"] - 1.0) < 1e-3

    def test_integrate_wrong_ic_length(self, capsys, write_doc):
        path = write_doc("f.yaml", FORCED_SIN_DOC)
        code, report = run_json(capsys, "integrate", "--system", path, "--ic", "1")
        assert code == 2
        assert report["error"]["code"] == "E_CONFIG"

    def test_sample_integrate_verify(self, capsys, write_doc, tmp_path):
        """Sampled solutions reproduce an independently integrated target."""
        family = write_doc("f.yaml", FORCED_SIN_DOC)
        out_dir = tmp_path / "solutions"
        code, sample = run_json(
            capsys, "sample", "--system", family, "--output-dir", str(out_dir),
            "--box=-0.2:0.2", "--span", "0:2", "--sample-seed", "20090101", *TIGHT_FLAGS,
        )
        assert code == 0
        assert sample["seed"] == 20090101
        assert len(sample["outputs"]) == 3

        target = str(tmp_path / "target.csv")
        code, report = run_json(
            capsys, "integrate", "--system", family, "--ic=0.5, -0.4", "--span", "0:2",
            "--output", target, *TIGHT_FLAGS,
        )
        assert code == 0
        assert report["output"] == target

        code, verification = run_json(
            capsys, "verify", "--family", family, "--solutions", ",".join(sample["outputs"]),
            "--target", target, "--window", "0:2",
        )
        assert code == 0
        assert verification["passed"] is True
        assert verification["deviation"] < 1e-6
        assert verification["constant_drift"] < 1e-6
