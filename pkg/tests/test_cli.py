"""
Tests for the command-line interface
"""
import json

import pytest
from loguru import logger

from teamata import __version__
from teamata.cli import ERROR, FAILED, OK, main
from teamata.utils.dsl import load_file


@pytest.fixture
def run(samples_dir, capsys):
    """Run the CLI on sample files; returns (exit code, stdout, stderr)"""

    def invoke(*args):
        argv = [str(samples_dir / a) if a.endswith(".ta") else a for a in args]
        code = main(["--log-level", "ERROR", *argv])
        out, err = capsys.readouterr()
        return code, out, err

    yield invoke
    logger.remove()
    logger.disable("teamata")


class TestCommands:
    """Test exit codes and output of each command"""

    def test_version(self, capsys):
        assert main(["--version"]) == OK
        assert __version__ in capsys.readouterr().out

    def test_team(self, run, tmp_path):
        dot = tmp_path / "race.dot"
        code, out, _ = run("team", "race.ta", "--dot", str(dot))
        assert code == OK
        assert out.startswith("team Race: 9 reachable states, 13 transitions")
        assert dot.read_text(encoding="utf-8").startswith("digraph Race {")

    def test_receptiveness(self, run):
        code, out, _ = run("check-rcp", "race.ta")
        assert code == OK
        assert "Race is strictly receptive" in out

    def test_responsiveness_strict_and_weak(self, run):
        code, out, _ = run("check-rsp", "race.ta")
        assert code == FAILED
        assert "Ctrl starved at (1,1,1)" in out
        code, out, _ = run("check-rsp", "race.ta", "--weak")
        assert code == OK
        assert "weakly responsive" in out

    def test_deadlock(self, run):
        code, out, _ = run("check-deadlock", "race.ta")
        assert code == OK
        assert "deadlock-free" in out

    def test_realise(self, run, tmp_path):
        emitted = tmp_path / "local.ta"
        code, out, _ = run("realise", "race_global.ta", "--emit", str(emitted))
        assert code == OK
        assert "MRace: realised" in out
        assert "isomorphic" in out
        system, _ = load_file(emitted).system()
        assert system.names == ("Ctrl", "R1", "R2")

    def test_realise_bisimilar_only(self, run):
        code, out, _ = run("realise", "table1.ta")
        assert code == OK
        assert "team 4 states, model 5 states, bisimilar, not isomorphic" in out

    def test_realise_inconclusive(self, run):
        code, out, _ = run("realise", "table2.ta")
        assert code == FAILED
        assert "M: inconclusive" in out

    def test_compose(self, run):
        code, out, _ = run("compose", "racev.ta", "arbiter.ta", "--interface-sts", "interface.ta", "--weak")
        assert code == OK
        assert "11 reachable states, 16 transitions" in out
        assert "communication properties preserved" in out
        code, out, _ = run("compose", "racev.ta", "arbiter.ta", "--interface-sts", "interface.ta")
        assert code == FAILED
        assert "rsp(Arbiter,ask)@(0,2,0,0) strictly not met" in out

    def test_project(self, run):
        code, out, _ = run("project", "race_featured.ta", "--product", "unlock")
        assert code == OK
        assert "0 -> 3: start!;" in out
        assert "ask!" not in out

    def test_project_invalid_product(self, run):
        code, _, err = run("project", "race_featured.ta", "--product", "lock,unlock")
        assert code == ERROR
        assert "not a valid product" in err

    def test_products_check(self, run):
        code, out, _ = run("products-check", "race_featured.ta", "--property", "responsive", "--weak")
        assert code == OK
        assert "over 2 products" in out
        code, _, _ = run("products-check", "race_featured.ta", "--property", "responsive")
        assert code == FAILED

    def test_pdl(self, run):
        code, out, _ = run("pdl", "race_global.ta")
        assert code == OK
        assert "both_finish: holds" in out
        assert "no_finish_before_start: holds" in out

    def test_pdl_formula_file(self, run, tmp_path):
        formula = tmp_path / "stuck.pdl"
        formula.write_text("<some*>[some]false\n", encoding="utf-8")
        code, out, _ = run("pdl", "race.ta", "--formula", str(formula))
        assert code == FAILED
        assert "stuck: fails" in out

    def test_dot_to_stdout(self, run):
        code, out, _ = run("dot", "table1.ta")
        assert code == OK
        assert out.startswith("digraph M {")
        assert out.count("shape=circle") == 5


UNTYPED = """
system Ping {
  component A { output ping; input pong; init 0; 0 -> 1: ping!; 1 -> 0: pong?; }
  component B { input ping; output pong; init 0; 0 -> 1: ping?; 1 -> 0: pong!; }
}
global Loop { init 0; 0 -> 1: {p}->{q}:a; 1 -> 0: {q}->{p}:b; }
"""


class TestDefaultType:
    """Test the uniform type for actions without a sync clause"""

    @pytest.fixture
    def untyped(self, tmp_path):
        path = tmp_path / "untyped.ta"
        path.write_text(UNTYPED, encoding="utf-8")
        return str(path)

    def test_rejected_without_default(self, run, untyped):
        code, _, err = run("team", untyped)
        assert code == ERROR
        assert "no synchronisation type" in err

    def test_team_with_default(self, run, untyped):
        code, out, _ = run("team", untyped, "--default-type", "[1,1]->[1,1]")
        assert code == OK
        assert out.startswith("team Ping: 2 reachable states, 2 transitions")

    def test_checks_with_default(self, run, untyped):
        code, out, _ = run("check-rsp", untyped, "--default-type", "[1,1] -> [1,1]")
        assert code == OK
        assert "Ping is strictly responsive" in out
        code, _, _ = run("check-deadlock", untyped, "--default-type", "[1,1]->[1,1]")
        assert code == OK

    def test_realise_with_default(self, run, untyped):
        code, out, _ = run("realise", untyped, "--default-type", "[1,1]->[1,1]")
        assert code == OK
        assert "Loop: realised" in out
        assert "team 2 states, model 2 states, isomorphic" in out

    def test_bad_default_is_a_usage_error(self, run, untyped):
        code, _, _ = run("team", untyped, "--default-type", "[2,1]->[1,1]")
        assert code == ERROR


class TestJsonAndErrors:
    """Test structured output and error handling"""

    def test_json_report(self, run):
        code, out, _ = run("--json", "check-rsp", "race.ta")
        assert code == FAILED
        data = json.loads(out)
        assert data["kind"] == "verdict"
        assert data["holds"] is False
        assert len(data["failures"]) == 3

    def test_parse_error(self, run, tmp_path):
        broken = tmp_path / "broken.ta"
        broken.write_text("system S {\n  component A { init 0; 0 -> 1: a$; }\n}\n", encoding="utf-8")
        code, _, err = run("team", str(broken))
        assert code == ERROR
        assert err.startswith("teamata: error: 2:")

    def test_missing_file(self, run, tmp_path):
        code, _, err = run("team", str(tmp_path / "absent.ta"))
        assert code == ERROR
        assert "teamata: error:" in err

    def test_unknown_system(self, run):
        code, _, err = run("team", "race.ta", "--system", "Nope")
        assert code == ERROR
        assert "no system named 'Nope'" in err

    def test_usage_error(self, run):
        code, _, _ = run("compose", "racev.ta")
        assert code == ERROR
