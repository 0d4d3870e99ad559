"""Input file parsing, golden reports, rejection diagnostics, round-trips."""

import subprocess
import sys
from pathlib import Path

import pytest

from higherlocal.errors import (
    DimensionMismatch,
    SpecSyntaxError,
    UnknownKey,
)
from higherlocal.exprparse import ExpressionParser
from higherlocal.series import TowerField
from higherlocal.specfile import parse_specfile, render_specfile

GOLDEN = Path(__file__).parent / "golden"


def run_cli(path, *extra):
    return subprocess.run(
        [sys.executable, "-m", "higherlocal.cli", str(path), *extra],
        capture_output=True,
        text=True,
    )


class TestExpressionParser:
    def setup_method(self):
        self.p1 = ExpressionParser(TowerField(1, ("t",)), 8)
        self.p2 = ExpressionParser(TowerField(2), 8)

    def test_arithmetic(self):
        from fractions import Fraction

        t = TowerField(1, ("t",)).gen(1)
        assert self.p1.parse("1 + 2*t - t^2") == 1 + 2 * t - t ** 2
        assert self.p1.parse("(1+t)*(1-t)") == 1 - t ** 2
        assert self.p1.parse("-3/4") == TowerField(1, ("t",)).rational(Fraction(-3, 4))

    def test_negative_powers(self):
        t = TowerField(1, ("t",)).gen(1)
        assert self.p1.parse("t^-2") == t ** -2
        assert self.p1.parse("1/t^2") == t ** -2

    def test_two_variables(self):
        F2 = TowerField(2)
        t1, t2 = F2.gen(1), F2.gen(2)
        assert self.p2.parse("t1*t2^-1 + 2") == t1 * t2 ** -1 + 2

    def test_series_division(self):
        got = self.p1.parse("1/(1-t)")
        for e in range(8):
            assert got.coefficient(e) == 1

    def test_error_positions(self):
        with pytest.raises(SpecSyntaxError) as ei:
            self.p1.parse("1/(")
        assert ei.value.line == 1
        assert ei.value.column == 4
        with pytest.raises(SpecSyntaxError) as ei:
            self.p1.parse("2 +\n* 3")
        assert ei.value.line == 2
        assert ei.value.column == 1

    def test_unknown_variable(self):
        with pytest.raises(SpecSyntaxError):
            self.p1.parse("x + 1")


class TestSpecFile:
    def test_parse_minimal(self):
        text = GOLDEN.joinpath("eps_trivial.hl").read_text()
        spec = parse_specfile(text)
        assert spec.level == 1
        assert spec.rank == 1
        assert spec.command == "epsilon"
        assert spec.connection.rank == 1

    def test_round_trip(self):
        for name in ("eps_trivial.hl", "coh_trivial_n2.hl", "irr_rank2_halfslope.hl"):
            spec = parse_specfile(GOLDEN.joinpath(name).read_text())
            again = parse_specfile(render_specfile(spec))
            assert again.structural_key() == spec.structural_key()
            assert render_specfile(again) == render_specfile(spec)

    def test_rank_dimension_mismatch(self):
        text = """[field]
n = 1

[connection]
rank = 2
A1 = [["0"]]

[task]
command = epsilon
"""
        with pytest.raises(DimensionMismatch):
            parse_specfile(text)

    def test_unknown_key(self):
        text = """[field]
n = 1
flavor = strange

[connection]
rank = 1
A1 = [["0"]]

[task]
command = epsilon
"""
        with pytest.raises(UnknownKey):
            parse_specfile(text)

    def test_syntax_error_position_in_entry(self):
        text = """[field]
n = 1

[connection]
rank = 1
A1 = [["1/("]]

[task]
command = epsilon
"""
        with pytest.raises(SpecSyntaxError) as ei:
            parse_specfile(text)
        assert ei.value.line == 6
        # the open parenthesis sits at column 11 of the A1 line
        assert ei.value.column == 12

    def test_unknown_command(self):
        text = """[field]
n = 1

[connection]
rank = 1
A1 = [["0"]]

[task]
command = dance
"""
        with pytest.raises(UnknownKey):
            parse_specfile(text)


class TestGolden:
    @pytest.mark.parametrize(
        "name",
        [
            "eps_trivial",
            "eps_exponential",
            "irr_exponential",
            "irr_rank2_halfslope",
            "cyclic_rank2",
            "coh_trivial_n1",
            "coh_alpha_half",
            "coh_trivial_n2",
            "verify_n2_trivial",
            "eps_n2_dlog",
        ],
    )
    def test_byte_exact_reports(self, name):
        proc = run_cli(GOLDEN / f"{name}.hl")
        assert proc.returncode == 0, proc.stderr
        expected = (GOLDEN / f"{name}.out").read_text()
        assert proc.stdout == expected

    def test_determinism(self):
        a = run_cli(GOLDEN / "cyclic_rank2.hl")
        b = run_cli(GOLDEN / "cyclic_rank2.hl")
        assert a.stdout == b.stdout

    def test_json_like_format(self):
        proc = run_cli(GOLDEN / "eps_trivial.hl", "--format", "json-like")
        assert proc.returncode == 0
        assert proc.stdout.startswith("{\n")
        assert '"degree": "0"' in proc.stdout


class TestRejections:
    def test_parse_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.hl"
        bad.write_text(
            """[field]
n = 1

[connection]
rank = 1
A1 = [["1/("]]

[task]
command = epsilon
"""
        )
        proc = run_cli(bad)
        assert proc.returncode == 3
        assert "SpecSyntaxError" in proc.stderr
        assert "line 6" in proc.stderr

    def test_dimension_mismatch_exit_code(self, tmp_path):
        bad = tmp_path / "bad.hl"
        bad.write_text(
            """[field]
n = 1

[connection]
rank = 2
A1 = [["0"]]

[task]
command = epsilon
"""
        )
        proc = run_cli(bad)
        assert proc.returncode == 3
        assert "DimensionMismatch" in proc.stderr

    def test_non_closed_forms_exit_code(self, tmp_path):
        bad = tmp_path / "bad.hl"
        bad.write_text(
            """[field]
n = 2

[connection]
rank = 1
A1 = [["0"]]
A2 = [["0"]]

[forms]
nu1 = ["t2", "0"]
nu2 = ["0", "1"]

[task]
command = verify
"""
        )
        proc = run_cli(bad)
        assert proc.returncode == 3
        assert "NotClosed" in proc.stderr

    def test_not_flat_exit_code(self, tmp_path):
        bad = tmp_path / "bad.hl"
        bad.write_text(
            """[field]
n = 2

[connection]
rank = 1
A1 = [["t2"]]
A2 = [["0"]]

[task]
command = cohomology
"""
        )
        proc = run_cli(bad)
        assert proc.returncode == 3
        assert "NotFlat" in proc.stderr

    def test_missing_file(self):
        proc = run_cli("/nonexistent/path.hl")
        assert proc.returncode == 3
