"""
Labelled transition systems
"""
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Set, Tuple

import networkx as nx

from teamata.core.errors import ModelError
from teamata.utils.helpers import canonical_key, format_state

State = Hashable
Label = Hashable
Transition = Tuple[State, Label, State]


@dataclass(frozen=True)
class Lts:
    """Finite LTS (Q, q0, Σ, E)"""

    states: FrozenSet[State]
    initial: State
    labels: FrozenSet[Label]
    transitions: FrozenSet[Transition] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'states', frozenset(self.states))
        object.__setattr__(self, 'labels', frozenset(self.labels))
        object.__setattr__(self, 'transitions', frozenset(self.transitions))
        if self.initial not in self.states:
            raise ModelError(f"initial state {format_state(self.initial)} is not a state")
        for source, label, target in self.transitions:
            if source not in self.states or target not in self.states:
                raise ModelError(
                    f"transition {format_state(source)} -{label}-> {format_state(target)} "
                    f"leaves the state set"
                )
            if label not in self.labels:
                raise ModelError(f"transition label {label} is not in the alphabet")

    @classmethod
    def build(
        cls,
        initial: State,
        transitions: Iterable[Transition],
        states: Optional[Iterable[State]] = None,
        labels: Optional[Iterable[Label]] = None,
    ) -> "Lts":
        """
        Build an LTS, deriving states and labels from the transitions when omitted

        Args:
            initial: Initial state
            transitions: (source, label, target) triples
            states: Extra states (isolated ones included)
            labels: Full alphabet; may contain labels no transition uses
        """
        transitions = frozenset(transitions)
        all_states = {initial}
        all_labels = set(labels or ())
        for source, label, target in transitions:
            all_states.update((source, target))
            all_labels.add(label)
        all_states.update(states or ())
        return cls(frozenset(all_states), initial, frozenset(all_labels), transitions)

    @cached_property
    def _successors(self) -> Dict[State, Tuple[Tuple[Label, State], ...]]:
        index: Dict[State, List[Tuple[Label, State]]] = defaultdict(list)
        for source, label, target in self.transitions:
            index[source].append((label, target))
        return {
            source: tuple(sorted(steps, key=lambda s: (canonical_key(s[0]), canonical_key(s[1]))))
            for source, steps in index.items()
        }

    @cached_property
    def graph(self) -> nx.MultiDiGraph:
        """The LTS as a networkx multigraph (edge attribute ``label``)"""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.states)
        for source, label, target in self.transitions:
            graph.add_edge(source, target, label=label)
        return graph

    def successors(self, state: State) -> Tuple[Tuple[Label, State], ...]:
        """Outgoing (label, target) pairs in canonical order"""
        return self._successors.get(state, ())

    def enabled(self, state: State) -> Set[Label]:
        """Labels enabled at a state"""
        return {label for label, _ in self.successors(state)}

    def post(self, state: State, label: Label) -> Set[State]:
        """Targets of label-transitions from a state"""
        return {target for lab, target in self.successors(state) if lab == label}

    def sorted_states(self) -> List[State]:
        return sorted(self.states, key=canonical_key)

    def sorted_transitions(self) -> List[Transition]:
        return sorted(
            self.transitions,
            key=lambda t: (canonical_key(t[0]), canonical_key(t[1]), canonical_key(t[2])),
        )

    def reachable(self) -> FrozenSet[State]:
        """R(L): states reachable from the initial state"""
        return frozenset(nx.descendants(self.graph, self.initial) | {self.initial})

    def restrict_to_reachable(self) -> "Lts":
        """The reachable sub-LTS over the same alphabet"""
        keep = self.reachable()
        return Lts(
            keep,
            self.initial,
            self.labels,
            frozenset(t for t in self.transitions if t[0] in keep),
        )

    def relabel(self, mapping: Dict[Label, Label], labels: Optional[Iterable[Label]] = None) -> "Lts":
        """Rename labels; unmapped labels are kept"""
        new_labels = (
            frozenset(labels) if labels is not None
            else frozenset(mapping.get(lab, lab) for lab in self.labels)
        )
        return Lts(
            self.states,
            self.initial,
            new_labels,
            frozenset((s, mapping.get(lab, lab), t) for s, lab, t in self.transitions),
        )

    def same_graph(self, other: "Lts") -> bool:
        """Equality as labelled graphs with fixed state names"""
        return (
            self.initial == other.initial
            and self.states == other.states
            and self.transitions == other.transitions
        )

    def __repr__(self) -> str:
        return (
            f"Lts(states={len(self.states)}, initial={format_state(self.initial)}, "
            f"labels={len(self.labels)}, transitions={len(self.transitions)})"
        )


def reachable(lts: Lts) -> FrozenSet[State]:
    """Reachable states of an LTS"""
    return lts.reachable()
