"""
Tests for composition and compositional verification
"""
import pytest

from teamata.core.errors import CompositionError, SpecIncompleteError
from teamata.models.automata import ComponentAutomaton
from teamata.models.sync import SyncTypeSpec, sync_type
from teamata.models.system import System
from teamata.services.comm import Kind, Mode
from teamata.services.compose import (
    CompositionPlan, check_preservation, composable, compose, find_verdict, interface_actions,
)
from tests.conftest import race_spec, runner

BINARY = sync_type((1, 1), (1, 1))


def asking_controller() -> ComponentAutomaton:
    return ComponentAutomaton.build(
        0,
        [
            (0, "ask", 1), (1, "reject", 0), (1, "grant", 2),
            (2, "start", 3), (3, "finish", 4), (4, "finish", 0),
        ],
        inputs={"finish", "grant", "reject"}, outputs={"ask", "start"},
    )


def arbiter() -> ComponentAutomaton:
    return ComponentAutomaton.build(
        0, [(0, "ask", 1), (1, "grant", 0), (1, "reject", 0)],
        inputs={"ask"}, outputs={"grant", "reject"},
    )


@pytest.fixture
def parts():
    racev = System.of({"Ctrl": asking_controller(), "R1": runner(), "R2": runner()})
    arb = System.of({"Arbiter": arbiter()})
    return ((racev, race_spec()), (arb, SyncTypeSpec()))


@pytest.fixture
def plan(parts):
    return CompositionPlan(parts, SyncTypeSpec({a: BINARY for a in ("ask", "grant", "reject")}))


class TestCompose:
    """Test flattening and the interface"""

    def test_interface_actions(self, parts):
        assert interface_actions(parts) == {"ask", "grant", "reject"}
        assert interface_actions(parts[:1]) == frozenset()

    def test_composed_system(self, plan):
        system, spec = compose(plan)
        assert system.names == ("Arbiter", "Ctrl", "R1", "R2")
        assert set(spec) == {"ask", "finish", "grant", "reject", "start"}
        assert spec["ask"] == BINARY
        assert spec["start"] == sync_type((1, 1), (2, 2))

    def test_name_clash(self, parts):
        racev, _ = parts[0]
        ok, conflicts = composable([parts[0], (racev, race_spec())])
        assert not ok
        assert any("both name a component 'Ctrl'" in c for c in conflicts)

    def test_communicating_action_reused(self, parts):
        other = System.of({"Spy": ComponentAutomaton.build(0, [(0, "start", 0)], inputs={"start"})})
        with pytest.raises(CompositionError):
            CompositionPlan((parts[0], (other, SyncTypeSpec())), SyncTypeSpec())

    def test_interface_type_required(self, parts):
        with pytest.raises(SpecIncompleteError):
            CompositionPlan(parts, SyncTypeSpec({"ask": BINARY, "grant": BINARY}))

    def test_extra_interface_type_rejected(self, parts):
        types = {a: BINARY for a in ("ask", "grant", "reject", "start")}
        with pytest.raises(CompositionError):
            CompositionPlan(parts, SyncTypeSpec(types))


class TestPreservation:
    """Test compositional verification of the asking race and the arbiter"""

    def test_composed_team_size(self, plan):
        report = check_preservation(plan, Mode.STRICT)
        reach = report.team.reachable_part
        assert len(reach.states) == 11
        assert len(reach.transitions) == 16

    def test_strict_interface_verdicts(self, plan):
        report = check_preservation(plan, Mode.STRICT)
        ask = find_verdict(report, Kind.RCP, {"Ctrl"}, "ask", (0, 0, 0, 0))
        assert ask is not None and ask.satisfied
        waiting = find_verdict(report, Kind.RSP, {"Arbiter"}, "ask", (0, 2, 0, 0))
        assert waiting is not None and not waiting.satisfied
        assert not report.interface_holds
        assert not report.holds

    def test_weak_verdicts_hold(self, plan):
        report = check_preservation(plan, Mode.WEAK)
        waiting = find_verdict(report, Kind.RSP, {"Arbiter"}, "ask", (0, 2, 0, 0))
        assert waiting.satisfied
        assert report.interface_holds
        assert all(p.receptive.holds and p.responsive.holds for p in report.parts)
        assert report.holds

    def test_only_interface_requirements(self, plan):
        report = check_preservation(plan, Mode.WEAK)
        assert {v.requirement.action for v in report.interface_verdicts} <= {"ask", "grant", "reject"}
        assert find_verdict(report, Kind.RCP, {"Ctrl"}, "start", (0, 2, 0, 0)) is None
