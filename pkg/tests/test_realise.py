"""
Tests for global models, N-equivalences and realisation
"""
import pytest

from teamata.core.errors import ModelError, ModelIllFormedError, SpecIncompleteError
from teamata.models.automata import ComponentAutomaton
from teamata.models.lts import Lts
from teamata.models.sync import SyncTypeSpec, sync_type
from teamata.models.system import System
from teamata.services.realise import (
    GlobalModel, Inconclusive, Realised, SystemSignature, base_equivalence, bisimilar,
    check_rc, interaction_set, is_bijection, quotient, realise_pipeline, satisfies_base,
    saturate, validate_bisimulation,
)
from teamata.services.teams import team
from tests.conftest import ia, race_spec


def blocks(eq, name):
    return set(eq.blocks(name))


class TestGlobalModel:
    """Test signatures and well-formedness"""

    def test_interaction_set(self, race_signature):
        labels = interaction_set(race_signature, race_spec())
        assert labels == {
            ia("Ctrl", "start", "R1 R2"),
            ia("R1", "finish", "Ctrl"),
            ia("R2", "finish", "Ctrl"),
        }

    def test_missing_type_rejected(self, race_signature):
        with pytest.raises(SpecIncompleteError):
            interaction_set(race_signature, SyncTypeSpec({"start": sync_type((1, 1), (2, 2))}))

    def test_label_outside_interaction_set(self, race_signature):
        with pytest.raises(ModelIllFormedError):
            GlobalModel.build(race_signature, race_spec(), 0, [(0, ia("Ctrl", "start", "R1"), 1)])

    def test_overlapping_role_rejected(self):
        with pytest.raises(ModelError):
            SystemSignature.of({"A": ({"a"}, {"a"})})

    def test_signature_of_system(self, race, race_signature):
        assert SystemSignature.of_system(race) == race_signature


class TestEquivalence:
    """Test the base equivalence, RC and saturation"""

    def test_base_equivalence(self, mrace):
        eq = base_equivalence(mrace)
        assert blocks(eq, "Ctrl") == {frozenset({s}) for s in range(4)}
        assert blocks(eq, "R1") == {frozenset({0, 2}), frozenset({1, 3})}
        assert blocks(eq, "R2") == {frozenset({0, 3}), frozenset({1, 2})}
        assert satisfies_base(mrace, eq)

    def test_base_violates_rc(self, mrace):
        report = check_rc(mrace, base_equivalence(mrace))
        assert not report.holds
        assert all(not v.missing for v in report.violations)

    def test_saturation_merges_controller_states(self, mrace):
        eq, report = saturate(mrace)
        assert report.holds
        assert blocks(eq, "Ctrl") == {frozenset({0}), frozenset({1}), frozenset({2, 3})}
        assert blocks(eq, "R1") == {frozenset({0, 2}), frozenset({1, 3})}
        assert blocks(eq, "R2") == {frozenset({0, 3}), frozenset({1, 2})}
        assert eq.equivalent("Ctrl", 2, 3)
        assert check_rc(mrace, eq).holds

    def test_saturation_from_satisfying_start_is_stable(self, mrace):
        eq, _ = saturate(mrace)
        again, report = saturate(mrace, eq)
        assert report.holds
        assert again == eq

    def test_saturation_merges_into_first_candidate(self):
        """Two a-steps from the glue state: targets are merged into the first one"""
        sig = SystemSignature.of({"p": (set(), {"a"}), "q": ({"a"}, set())})
        spec = SyncTypeSpec({"a": sync_type((1, 1), (1, 1))})
        step = ia("p", "a", "q")
        model = GlobalModel.build(sig, spec, 0, [(0, step, 1), (0, step, 2)])
        eq, report = saturate(model)
        assert report.holds
        assert blocks(eq, "q") == {frozenset({0}), frozenset({1, 2})}
        assert blocks(eq, "p") == {frozenset({0}), frozenset({1}), frozenset({2})}

    def test_quotient(self, mrace):
        eq, _ = saturate(mrace)
        ctrl = quotient(mrace, eq, "Ctrl")
        assert ctrl.initial == frozenset({0})
        assert len(ctrl.states) == 3
        assert (frozenset({1}), "finish", frozenset({2, 3})) in ctrl.transitions
        assert ctrl.outputs == {"start"}
        with pytest.raises(ModelError):
            quotient(mrace, eq, "Nobody")


class TestRealisation:
    """Test the realisation pipeline"""

    def test_race_is_realised_isomorphically(self, mrace):
        outcome = realise_pipeline(mrace.signature, mrace.spec, mrace)
        assert isinstance(outcome, Realised)
        assert outcome.isomorphic
        assert outcome.team_states == outcome.model_states == 4
        assert outcome.system.names == ("Ctrl", "R1", "R2")
        assert validate_bisimulation(outcome.team.lts, mrace.lts, outcome.relation)

    def test_labels_checked_against_given_types(self, mrace):
        narrow = SyncTypeSpec({"start": sync_type((1, 1), (1, 1)), "finish": sync_type((1, 1), (1, 1))})
        with pytest.raises(ModelIllFormedError):
            realise_pipeline(mrace.signature, narrow, mrace)
        with pytest.raises(ModelIllFormedError):
            realise_pipeline(mrace.signature, narrow, mrace.lts)

    def test_bisimilar_but_not_isomorphic(self, pq_model):
        outcome = realise_pipeline(pq_model.signature, pq_model.spec, pq_model.lts)
        assert isinstance(outcome, Realised)
        assert outcome.team_states == 4
        assert outcome.model_states == 5
        assert not outcome.isomorphic
        assert blocks(outcome.equivalence, "p") == {frozenset({0, 2}), frozenset({1, 3, 4})}
        assert blocks(outcome.equivalence, "q") == {frozenset({0, 1}), frozenset({2, 3, 4})}

    def test_realisable_model_can_be_inconclusive(self, pair_model):
        """No equivalence satisfies RC, yet a hand-written system realises the model"""
        outcome = realise_pipeline(pair_model.signature, pair_model.spec, pair_model)
        assert isinstance(outcome, Inconclusive)
        assert not outcome.report.holds
        assert any(v.missing for v in outcome.report.violations)

        hand = System.of({
            n: ComponentAutomaton.build(0, [(0, "a", 1)], outputs={"a"}) for n in ("p", "q", "r")
        })
        ta = team(hand, pair_model.spec)
        assert len(ta.reachable_states) == 4
        assert bisimilar(ta.lts, pair_model.lts).holds


class TestBisimulation:
    """Test bisimilarity and its helpers"""

    def test_branching_time_difference(self):
        late = Lts.build(0, [(0, "a", 1), (1, "b", 2), (1, "c", 3)])
        early = Lts.build(0, [(0, "a", 1), (0, "a", 2), (1, "b", 3), (2, "c", 4)])
        result = bisimilar(late, early)
        assert not result.holds
        assert result.relation == frozenset()
        assert result.evidence is not None

    def test_unfolding_is_bisimilar(self):
        loop = Lts.build(0, [(0, "a", 0)])
        unfolded = Lts.build(0, [(0, "a", 1), (1, "a", 0)])
        result = bisimilar(loop, unfolded)
        assert result.holds
        assert result.relation == {(0, 0), (0, 1)}
        assert validate_bisimulation(loop, unfolded, result.relation)
        assert not validate_bisimulation(loop, unfolded, {(0, 0)})

    def test_is_bijection(self):
        assert is_bijection(frozenset({(0, "a"), (1, "b")}), [0, 1], ["a", "b"])
        assert not is_bijection(frozenset({(0, "a"), (0, "b")}), [0], ["a", "b"])
        assert not is_bijection(frozenset({(0, "a")}), [0, 1], ["a"])
