"""
Team automaton generation
"""
import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import AbstractSet, FrozenSet, Optional, Tuple

from loguru import logger

from teamata.core.errors import NonCommunicatingActionError, SpecIncompleteError
from teamata.models.lts import Lts
from teamata.models.sync import Interval, SyncType, SyncTypeSpec, interval_contains
from teamata.models.system import (
    Interaction, Internal, System, SystemLabel, lts_of_system,
)


def label_satisfies(
    label: SystemLabel,
    spec: SyncTypeSpec,
    communicating: AbstractSet[str],
) -> bool:
    """
    λ ⊨ st(a)

    Internal labels always pass. Open actions pass unless the spec carries an
    entry for them, in which case that entry applies. Communicating actions
    must have an entry.
    """
    if isinstance(label, Internal):
        return True
    stype = spec.get(label.action)
    if stype is None:
        if label.action in communicating:
            raise SpecIncompleteError(label.action)
        return True
    return (
        interval_contains(stype.out, len(label.senders))
        and interval_contains(stype.inp, len(label.receivers))
    )


def check_spec_total(system: System, spec: SyncTypeSpec):
    """Raise SpecIncompleteError for the first communicating action without a type"""
    for action in sorted(system.communicating):
        if action not in spec:
            raise SpecIncompleteError(action)


@dataclass(frozen=True)
class TeamAutomaton:
    """[st](S) together with the system and spec it came from"""

    lts: Lts
    system: System
    spec: SyncTypeSpec

    @cached_property
    def reachable_states(self) -> FrozenSet:
        return self.lts.reachable()

    @property
    def initial(self):
        return self.lts.initial

    @cached_property
    def reachable_part(self) -> Lts:
        return self.lts.restrict_to_reachable()


def team(system: System, spec: SyncTypeSpec, explore_all: bool = False) -> TeamAutomaton:
    """
    Generate the team automaton of a system under an STS

    Args:
        system: The system
        spec: Must type every communicating action
        explore_all: Also emit transitions from unreachable product states

    Raises:
        SpecIncompleteError: A communicating action has no type
    """
    check_spec_total(system, spec)
    communicating = system.communicating
    lts = lts_of_system(
        system,
        label_filter=lambda label: label_satisfies(label, spec, communicating),
        explore_all=explore_all,
    )
    result = TeamAutomaton(lts, system, spec)
    logger.debug(
        "team over {}: {} reachable states, {} transitions",
        ",".join(system.names), len(result.reachable_states), len(lts.transitions),
    )
    return result


def synchronous_product(system: System) -> Lts:
    """
    Classical synchronous product of a closed system without internals

    Every component owning an action takes part in each step on it. Built
    directly over local transitions, independently of label enumeration.
    """
    initial = system.initial
    frontier = [initial]
    seen = {initial}
    transitions = set()
    labels = set()
    for action in system.actions:
        labels.add(Interaction(system.output_owners(action), action, system.input_owners(action)))
    while frontier:
        state = frontier.pop()
        for action in system.actions:
            owners = set(system.output_owners(action)) | set(system.input_owners(action))
            choices = []
            for name, ca in system.components:
                local = system.local(state, name)
                choices.append(ca.steps(local, action) if name in owners else (local,))
            label = Interaction(system.output_owners(action), action, system.input_owners(action))
            for target in itertools.product(*choices):
                transitions.add((state, label, target))
                if target not in seen:
                    seen.add(target)
                    frontier.append(target)
    return Lts(frozenset(seen), initial, frozenset(labels), frozenset(transitions))


class Pattern(str, Enum):
    """Named synchronisation patterns"""

    MULTICAST = "multicast"
    BROADCAST = "broadcast"
    FULL_SYNC = "full_sync"
    MASTER_SLAVE = "master_slave"
    STRONG_MASTER_SLAVE = "strong_master_slave"


def named_pattern(pattern: Pattern, system: System, action: str) -> SyncType:
    """
    Resolve a named pattern to a concrete type for one action

    "All sharing components" bounds become the owner counts in system.
    """
    if action not in system.communicating:
        raise NonCommunicatingActionError(action)
    pattern = Pattern(pattern)
    senders = len(system.output_owners(action))
    receivers = len(system.input_owners(action))
    if pattern is Pattern.MULTICAST:
        return SyncType(Interval(1, 1), Interval(0, None))
    if pattern is Pattern.BROADCAST:
        return SyncType(Interval(1, 1), Interval(receivers, receivers))
    if pattern is Pattern.FULL_SYNC:
        return SyncType(Interval(senders, senders), Interval(receivers, receivers))
    if pattern is Pattern.MASTER_SLAVE:
        return SyncType(Interval(1, None), Interval(0, None))
    return SyncType(Interval(1, None), Interval(1, None))


def uniform_spec(system: System, stype: SyncType, actions: Optional[Tuple[str, ...]] = None) -> SyncTypeSpec:
    """One type for every communicating action (or the given ones)"""
    return SyncTypeSpec({a: stype for a in (actions or system.communicating)})
