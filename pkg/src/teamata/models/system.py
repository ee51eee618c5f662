"""
Systems of component automata, system labels and the induced system LTS
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import (
    Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple, Union,
)

from loguru import logger

from teamata.core.errors import ModelError
from teamata.models.automata import ComponentAutomaton
from teamata.models.lts import Lts, State
from teamata.utils.helpers import format_set, natural_key


@dataclass(frozen=True)
class Interaction:
    """System label (out, a, in): senders and receivers of action a"""

    senders: FrozenSet[str]
    action: str
    receivers: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, 'senders', frozenset(self.senders))
        object.__setattr__(self, 'receivers', frozenset(self.receivers))

    @property
    def participants(self) -> FrozenSet[str]:
        return self.senders | self.receivers

    def key(self) -> Tuple:
        return (
            0,
            natural_key(self.action),
            tuple(sorted(natural_key(n) for n in self.senders)),
            tuple(sorted(natural_key(n) for n in self.receivers)),
        )

    def __str__(self) -> str:
        return f"{format_set(self.senders)}->{format_set(self.receivers)}:{self.action}"


@dataclass(frozen=True)
class Internal:
    """System label (n, a) for an internal step of component n"""

    name: str
    action: str

    @property
    def participants(self) -> FrozenSet[str]:
        return frozenset((self.name,))

    def key(self) -> Tuple:
        return (1, natural_key(self.name), natural_key(self.action))

    def __str__(self) -> str:
        return f"{self.name}:{self.action}"


SystemLabel = Union[Interaction, Internal]
SystemState = Tuple[State, ...]


def subsets(items: Iterable[str]) -> Iterator[FrozenSet[str]]:
    items = sorted(items, key=natural_key)
    for size in range(len(items) + 1):
        for combo in itertools.combinations(items, size):
            yield frozenset(combo)


@dataclass(frozen=True)
class System:
    """
    A named family of component automata

    ``components`` keeps the declared name order; system states are tuples
    in that order.
    """

    components: Tuple[Tuple[str, ComponentAutomaton], ...]

    def __post_init__(self):
        components = tuple(self.components)
        object.__setattr__(self, 'components', components)
        if not components:
            raise ModelError("a system needs at least one component")
        names = [name for name, _ in components]
        if len(set(names)) != len(names):
            raise ModelError(f"duplicate component names in {names}")

    @classmethod
    def of(cls, components: Union[Mapping[str, ComponentAutomaton], Iterable[Tuple[str, ComponentAutomaton]]]) -> "System":
        """Build from a mapping (insertion order) or (name, CA) pairs"""
        if isinstance(components, Mapping):
            components = components.items()
        return cls(tuple(components))

    @cached_property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.components)

    @cached_property
    def _by_name(self) -> Dict[str, ComponentAutomaton]:
        return dict(self.components)

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def __getitem__(self, name: str) -> ComponentAutomaton:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def index(self, name: str) -> int:
        """Coordinate of a component in system states"""
        return self._index[name]

    @property
    def initial(self) -> SystemState:
        return tuple(ca.initial for _, ca in self.components)

    @cached_property
    def inputs(self) -> FrozenSet[str]:
        return frozenset().union(*(ca.inputs for _, ca in self.components))

    @cached_property
    def outputs(self) -> FrozenSet[str]:
        return frozenset().union(*(ca.outputs for _, ca in self.components))

    @cached_property
    def internals(self) -> FrozenSet[str]:
        return frozenset().union(*(ca.internals for _, ca in self.components))

    @property
    def actions(self) -> FrozenSet[str]:
        """Σ: inputs and outputs of all components"""
        return self.inputs | self.outputs

    @property
    def communicating(self) -> FrozenSet[str]:
        """Σ•: input of some component and output of some component"""
        return self.inputs & self.outputs

    @property
    def open(self) -> FrozenSet[str]:
        """Σ°: external actions that are not communicating"""
        return self.actions - self.communicating

    def input_owners(self, action: str) -> Tuple[str, ...]:
        return tuple(n for n, ca in self.components if action in ca.inputs)

    def output_owners(self, action: str) -> Tuple[str, ...]:
        return tuple(n for n, ca in self.components if action in ca.outputs)

    def local(self, state: SystemState, name: str) -> State:
        return state[self._index[name]]

    def participants_enabled(self, state: SystemState, action: str, names: Iterable[str]) -> Tuple[str, ...]:
        """Those of names whose automaton enables action at its coordinate of state"""
        return tuple(n for n in names if self[n].enables(self.local(state, n), action))

    def state_space(self) -> Iterator[SystemState]:
        """Every combination of local states"""
        return itertools.product(*(ca.as_lts().sorted_states() for _, ca in self.components))

    def label_wellformed(self, label: SystemLabel) -> bool:
        """Check a label against the alphabets of this system"""
        if isinstance(label, Internal):
            return label.name in self and label.action in self[label.name].internals
        if not label.participants or not label.participants <= set(self.names):
            return False
        return (
            all(label.action in self[n].outputs for n in label.senders)
            and all(label.action in self[n].inputs for n in label.receivers)
        )


def classify_actions(system: System) -> Tuple[FrozenSet[str], FrozenSet[str], FrozenSet[str]]:
    """
    Split the actions of a system

    Returns:
        (communicating, open, internal)
    """
    return system.communicating, system.open, system.internals


def system_labels(system: System) -> FrozenSet[SystemLabel]:
    """Λ(S): every well-formed interaction and internal label"""
    labels: Set[SystemLabel] = set()
    for action in system.actions:
        for senders in subsets(system.output_owners(action)):
            for receivers in subsets(system.input_owners(action)):
                if senders or receivers:
                    labels.add(Interaction(senders, action, receivers))
    for name, ca in system.components:
        for action in ca.internals:
            labels.add(Internal(name, action))
    return frozenset(labels)


LabelFilter = Callable[[SystemLabel], bool]


def system_steps(
    system: System,
    state: SystemState,
    label_filter: Optional[LabelFilter] = None,
) -> Iterator[Tuple[SystemLabel, SystemState]]:
    """
    Outgoing system transitions of a state

    Participants move by a local transition on the label's action, all
    other coordinates stay put. Sender and receiver groups range only over
    components that locally enable the action.
    """
    for action in sorted(system.actions, key=natural_key):
        senders_ready = system.participants_enabled(state, action, system.output_owners(action))
        receivers_ready = system.participants_enabled(state, action, system.input_owners(action))
        if not senders_ready and not receivers_ready:
            continue
        for senders in subsets(senders_ready):
            for receivers in subsets(receivers_ready):
                if not senders and not receivers:
                    continue
                label = Interaction(senders, action, receivers)
                if label_filter is not None and not label_filter(label):
                    continue
                yield from ((label, target) for target in _move(system, state, senders | receivers, action))
    for name, ca in system.components:
        local = system.local(state, name)
        for action in sorted(ca.internals, key=natural_key):
            if not ca.enables(local, action):
                continue
            label = Internal(name, action)
            if label_filter is not None and not label_filter(label):
                continue
            yield from ((label, target) for target in _move(system, state, frozenset((name,)), action))


def _move(system: System, state: SystemState, movers: FrozenSet[str], action: str) -> Iterator[SystemState]:
    choices: List[Tuple[State, ...]] = []
    for name, ca in system.components:
        local = system.local(state, name)
        choices.append(ca.steps(local, action) if name in movers else (local,))
    return itertools.product(*choices)


def lts_of_system(
    system: System,
    label_filter: Optional[LabelFilter] = None,
    explore_all: bool = False,
) -> Lts:
    """
    lts(S), optionally restricted to labels passing a filter

    Args:
        system: The system
        label_filter: Keep only labels for which this returns True
        explore_all: Emit transitions from every product state, not only
            the reachable ones

    Returns:
        An LTS over system states and system labels. Without explore_all
        it is built on the fly from the initial state and holds only the
        reachable states; with it, the state set is the full product.
    """
    labels = frozenset(
        lab for lab in system_labels(system) if label_filter is None or label_filter(lab)
    )
    transitions = set()
    if explore_all:
        states = frozenset(system.state_space())
        for state in states:
            transitions.update((state, lab, target) for lab, target in system_steps(system, state, label_filter))
        return Lts(states, system.initial, labels, frozenset(transitions))

    frontier = [system.initial]
    seen = {system.initial}
    while frontier:
        state = frontier.pop()
        for lab, target in system_steps(system, state, label_filter):
            transitions.add((state, lab, target))
            if target not in seen:
                seen.add(target)
                frontier.append(target)
    logger.debug("explored {} reachable system states", len(seen))
    return Lts(frozenset(seen), system.initial, labels, frozenset(transitions))
