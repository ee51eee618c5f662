"""
Component automata
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from teamata.core.errors import ModelError
from teamata.models.lts import Lts, State
from teamata.utils.helpers import canonical_key, format_set

LocalTransition = Tuple[State, str, State]

INPUT = "input"
OUTPUT = "output"
INTERNAL = "internal"


@dataclass(frozen=True)
class ComponentAutomaton:
    """
    A CA: an LTS whose actions are split into inputs (?), outputs (!) and internals

    Invariants checked at construction: the three action sets are pairwise
    disjoint and every transition uses one of their actions.
    """

    states: FrozenSet[State]
    initial: State
    inputs: FrozenSet[str] = field(default_factory=frozenset)
    outputs: FrozenSet[str] = field(default_factory=frozenset)
    internals: FrozenSet[str] = field(default_factory=frozenset)
    transitions: FrozenSet[LocalTransition] = field(default_factory=frozenset)

    def __post_init__(self):
        for name in ('states', 'inputs', 'outputs', 'internals', 'transitions'):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        clash = (
            (self.inputs & self.outputs)
            | (self.inputs & self.internals)
            | (self.outputs & self.internals)
        )
        if clash:
            raise ModelError(f"action sets are not disjoint: {format_set(clash)}")
        if self.initial not in self.states:
            raise ModelError(f"initial state {self.initial} is not a state")
        for source, action, target in self.transitions:
            if action not in self.actions:
                raise ModelError(f"transition label '{action}' is not a declared action")
            if source not in self.states or target not in self.states:
                raise ModelError(f"transition {source} -{action}-> {target} leaves the state set")

    @classmethod
    def build(
        cls,
        initial: State,
        transitions: Iterable[LocalTransition],
        inputs: Iterable[str] = (),
        outputs: Iterable[str] = (),
        internals: Iterable[str] = (),
        states: Optional[Iterable[State]] = None,
    ) -> "ComponentAutomaton":
        """Build a CA, collecting states from the transitions"""
        transitions = frozenset(transitions)
        all_states = {initial, *(states or ())}
        for source, _, target in transitions:
            all_states.update((source, target))
        return cls(
            frozenset(all_states), initial,
            frozenset(inputs), frozenset(outputs), frozenset(internals), transitions,
        )

    @property
    def actions(self) -> FrozenSet[str]:
        return self.inputs | self.outputs | self.internals

    def kind(self, action: str) -> Optional[str]:
        """input, output, internal or None"""
        if action in self.inputs:
            return INPUT
        if action in self.outputs:
            return OUTPUT
        if action in self.internals:
            return INTERNAL
        return None

    @cached_property
    def _steps(self) -> Dict[Tuple[State, str], Tuple[State, ...]]:
        index: Dict[Tuple[State, str], List[State]] = {}
        for source, action, target in self.transitions:
            index.setdefault((source, action), []).append(target)
        return {k: tuple(sorted(v, key=canonical_key)) for k, v in index.items()}

    def steps(self, state: State, action: str) -> Tuple[State, ...]:
        """Local targets of action from state"""
        return self._steps.get((state, action), ())

    def enables(self, state: State, action: str) -> bool:
        return (state, action) in self._steps

    def as_lts(self) -> Lts:
        """The underlying LTS over the action alphabet"""
        return Lts(self.states, self.initial, self.actions, self.transitions)

    def reachable(self) -> FrozenSet[State]:
        return self.as_lts().reachable()

    def trimmed(self) -> "ComponentAutomaton":
        """
        Restrict to reachable states and to the actions those states use

        Two automata that only differ in unreachable parts or unused
        declarations have equal trimmed forms.
        """
        keep = self.reachable()
        transitions = frozenset(t for t in self.transitions if t[0] in keep)
        used = {action for _, action, _ in transitions}
        return ComponentAutomaton(
            keep, self.initial,
            self.inputs & used, self.outputs & used, self.internals & used,
            transitions,
        )

    def with_transitions(self, transitions: Iterable[LocalTransition]) -> "ComponentAutomaton":
        """Same states and alphabet, different transitions"""
        return ComponentAutomaton(
            self.states, self.initial, self.inputs, self.outputs, self.internals,
            frozenset(transitions),
        )

    def sorted_transitions(self) -> List[LocalTransition]:
        return sorted(
            self.transitions,
            key=lambda t: (canonical_key(t[0]), t[1], canonical_key(t[2])),
        )
