"""
Realisability of global interaction models

Global models, N-equivalences, the realisability condition, saturation,
local quotients and bisimulation.
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import (
    Dict, FrozenSet, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Tuple, Union,
)

from loguru import logger

from teamata.core.errors import ModelError, ModelIllFormedError, SpecIncompleteError
from teamata.models.automata import ComponentAutomaton
from teamata.models.lts import Lts, State
from teamata.models.sync import SyncTypeSpec
from teamata.models.system import Interaction, System, subsets
from teamata.services.teams import TeamAutomaton, team
from teamata.utils.helpers import canonical_key, format_set, format_state, natural_key
from teamata.utils.union_find import UnionFind

Block = FrozenSet[State]


@dataclass(frozen=True)
class SystemSignature:
    """Θ: per component, the input and output actions (no internals)"""

    roles: Tuple[Tuple[str, FrozenSet[str], FrozenSet[str]], ...]

    def __post_init__(self):
        roles = tuple((n, frozenset(i), frozenset(o)) for n, i, o in self.roles)
        object.__setattr__(self, 'roles', roles)
        if not roles:
            raise ModelError("a signature needs at least one component")
        names = [n for n, _, _ in roles]
        if len(set(names)) != len(names):
            raise ModelError(f"duplicate component names in {names}")
        for name, inputs, outputs in roles:
            if inputs & outputs:
                raise ModelError(f"{name}: inputs and outputs overlap in {format_set(inputs & outputs)}")

    @classmethod
    def of(cls, roles: Mapping[str, Tuple[Iterable[str], Iterable[str]]]) -> "SystemSignature":
        """From {name: (inputs, outputs)} in insertion order"""
        return cls(tuple((n, frozenset(i), frozenset(o)) for n, (i, o) in roles.items()))

    @classmethod
    def of_system(cls, system: System) -> "SystemSignature":
        return cls(tuple((n, ca.inputs, ca.outputs) for n, ca in system.components))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _, _ in self.roles)

    def inputs(self, name: str) -> FrozenSet[str]:
        return next(i for n, i, _ in self.roles if n == name)

    def outputs(self, name: str) -> FrozenSet[str]:
        return next(o for n, _, o in self.roles if n == name)

    @property
    def actions(self) -> FrozenSet[str]:
        return frozenset().union(*(i | o for _, i, o in self.roles))

    def input_owners(self, action: str) -> Tuple[str, ...]:
        return tuple(n for n, i, _ in self.roles if action in i)

    def output_owners(self, action: str) -> Tuple[str, ...]:
        return tuple(n for n, _, o in self.roles if action in o)


def interaction_set(sig: SystemSignature, spec: SyncTypeSpec) -> FrozenSet[Interaction]:
    """Λ(Θ, st): owner-respecting interactions within their type's bounds"""
    labels = set()
    for action in sorted(sig.actions, key=natural_key):
        if action not in spec:
            raise SpecIncompleteError(action, "signature")
        stype = spec[action]
        for senders in subsets(sig.output_owners(action)):
            if not stype.out.contains(len(senders)):
                continue
            for receivers in subsets(sig.input_owners(action)):
                if (senders or receivers) and stype.inp.contains(len(receivers)):
                    labels.add(Interaction(senders, action, receivers))
    return frozenset(labels)


@dataclass(frozen=True)
class GlobalModel:
    """An LTS over Λ(Θ, st)"""

    lts: Lts
    signature: SystemSignature
    spec: SyncTypeSpec

    def __post_init__(self):
        allowed = self.interactions
        for label in sorted({lab for _, lab, _ in self.lts.transitions}, key=canonical_key):
            if label not in allowed:
                raise ModelIllFormedError(f"label {label} is not in the interaction set")

    @classmethod
    def build(
        cls,
        sig: SystemSignature,
        spec: SyncTypeSpec,
        initial: State,
        transitions: Iterable[Tuple[State, Interaction, State]],
        states: Optional[Iterable[State]] = None,
    ) -> "GlobalModel":
        """Build a model whose alphabet is the full interaction set"""
        lts = Lts.build(initial, transitions, states=states, labels=interaction_set(sig, spec))
        return cls(lts, sig, spec)

    @cached_property
    def interactions(self) -> FrozenSet[Interaction]:
        return interaction_set(self.signature, self.spec)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.signature.names


@dataclass(frozen=True)
class NEquivalence:
    """One partition of the model's states per component name"""

    partitions: Tuple[Tuple[str, Tuple[Block, ...]], ...]

    @classmethod
    def from_union_finds(cls, names: Iterable[str], finds: Mapping[str, UnionFind]) -> "NEquivalence":
        return cls(tuple((n, tuple(finds[n].groups())) for n in names))

    @cached_property
    def _block_of(self) -> Dict[str, Dict[State, Block]]:
        return {
            name: {state: block for block in blocks for state in block}
            for name, blocks in self.partitions
        }

    def blocks(self, name: str) -> Tuple[Block, ...]:
        return dict(self.partitions)[name]

    def block_of(self, name: str, state: State) -> Block:
        return self._block_of[name][state]

    def equivalent(self, name: str, q1: State, q2: State) -> bool:
        return self._block_of[name][q1] == self._block_of[name][q2]

    def as_dict(self) -> Dict[str, Tuple[Block, ...]]:
        return dict(self.partitions)

    def union_finds(self) -> Dict[str, UnionFind]:
        finds = {}
        for name, blocks in self.partitions:
            uf = UnionFind(s for b in blocks for s in b)
            for block in blocks:
                first, *rest = sorted(block, key=canonical_key)
                for state in rest:
                    uf.union(first, state)
            finds[name] = uf
        return finds

    def __str__(self) -> str:
        return "; ".join(
            f"{name}: {{{','.join(format_set(b) for b in blocks)}}}" for name, blocks in self.partitions
        )


def satisfies_base(m: GlobalModel, eq: NEquivalence) -> bool:
    """Non-participants of every transition relate its endpoints"""
    return all(
        eq.equivalent(n, q, q2)
        for q, label, q2 in m.lts.transitions
        for n in m.names
        if n not in label.participants
    )


@dataclass(frozen=True)
class RcViolation:
    """
    A failing instance of the realisability condition

    ``candidates`` lists the targets g' of the required interaction from the
    glue state; it is empty when the glue state cannot perform it at all.
    """

    interaction: Interaction
    assignment: Tuple[Tuple[str, State], ...]
    glue: State
    targets: Tuple[Tuple[str, State], ...]
    candidates: Tuple[State, ...]

    @property
    def missing(self) -> bool:
        return not self.candidates

    @property
    def detail(self) -> str:
        if self.missing:
            return f"glue state {format_state(self.glue)} cannot perform {self.interaction}"
        return (
            f"no {self.interaction} step from glue state {format_state(self.glue)} "
            f"matches targets {', '.join(f'{n}:{format_state(q)}' for n, q in self.targets)}"
        )


class RcReport(NamedTuple):
    holds: bool
    violations: List[RcViolation]


def _participant_steps(m: GlobalModel, name: str, action: str) -> Dict[State, List[Tuple[State, State]]]:
    """Per source state, the (source, target) pairs of action-steps involving name"""
    steps: Dict[State, List[Tuple[State, State]]] = {}
    for q, label, q2 in m.lts.sorted_transitions():
        if label.action == action and name in label.participants:
            steps.setdefault(q, []).append((q, q2))
    return steps


def _rc_violations(m: GlobalModel, eq: NEquivalence) -> List[RcViolation]:
    violations: List[RcViolation] = []
    states = m.lts.sorted_states()
    for interaction in sorted(m.interactions, key=canonical_key):
        members = sorted(interaction.participants, key=natural_key)
        steps = {n: _participant_steps(m, n, interaction.action) for n in members}
        for glue in states:
            options = []
            for n in members:
                block = eq.block_of(n, glue)
                found = [
                    pair
                    for q in sorted(block, key=canonical_key)
                    for pair in steps[n].get(q, ())
                ]
                options.append(found)
            if not all(options):
                continue
            candidates = tuple(sorted(m.lts.post(glue, interaction), key=canonical_key))
            for choice in itertools.product(*options):
                matched = any(
                    all(eq.equivalent(n, target, g2) for n, (_, target) in zip(members, choice))
                    for g2 in candidates
                )
                if matched:
                    continue
                violations.append(RcViolation(
                    interaction,
                    tuple((n, source) for n, (source, _) in zip(members, choice)),
                    glue,
                    tuple((n, target) for n, (_, target) in zip(members, choice)),
                    candidates,
                ))
    return violations


def base_equivalence(m: GlobalModel) -> NEquivalence:
    """Finest N-equivalence: non-participants relate the endpoints of each step"""
    finds = {n: UnionFind(m.lts.states) for n in m.names}
    for q, label, q2 in m.lts.transitions:
        for n in m.names:
            if n not in label.participants:
                finds[n].union(q, q2)
    return NEquivalence.from_union_finds(m.names, finds)


def check_rc(m: GlobalModel, eq: NEquivalence) -> RcReport:
    """RC(M, ≡) with every failing instance, in deterministic order"""
    violations = _rc_violations(m, eq)
    return RcReport(not violations, violations)


def saturate(m: GlobalModel, start: Optional[NEquivalence] = None) -> Tuple[NEquivalence, RcReport]:
    """
    Grow an N-equivalence until RC holds or cannot be repaired

    Starts from the base equivalence unless ``start`` is given. A violation
    whose glue state can perform the interaction is repaired by merging each
    participant's target with the first such g'. When only violations with
    a glue state lacking the interaction remain, the loop stops and the
    result is inconclusive.
    """
    finds = (start or base_equivalence(m)).union_finds()
    merges = 0
    while True:
        eq = NEquivalence.from_union_finds(m.names, finds)
        violations = _rc_violations(m, eq)
        if not violations:
            logger.debug("saturation reached RC after {} merges", merges)
            return eq, RcReport(True, [])
        repairable = next((v for v in violations if not v.missing), None)
        if repairable is None:
            logger.warning("saturation stopped: {}", violations[0].detail)
            return eq, RcReport(False, violations)
        # candidates are in canonical order; another choice of g' may give a coarser result
        g2 = repairable.candidates[0]
        for n, target in repairable.targets:
            if finds[n].union(target, g2):
                merges += 1
                logger.debug("merge {} ~{} {}", format_state(target), n, format_state(g2))


def quotient(m: GlobalModel, eq: NEquivalence, name: str) -> ComponentAutomaton:
    """The local quotient M/≡_name"""
    if name not in m.names:
        raise ModelError(f"unknown component '{name}'")
    transitions = set()
    for q, label, q2 in m.lts.transitions:
        if name in label.participants:
            transitions.add((eq.block_of(name, q), label.action, eq.block_of(name, q2)))
    return ComponentAutomaton(
        frozenset(eq.blocks(name)),
        eq.block_of(name, m.lts.initial),
        m.signature.inputs(name),
        m.signature.outputs(name),
        frozenset(),
        frozenset(transitions),
    )


class Distinction(NamedTuple):
    """First refinement step separating two states"""
    label: Hashable
    side: int  # 1 or 2: the LTS whose move the other cannot match
    state: State


class BisimResult(NamedTuple):
    holds: bool
    relation: FrozenSet[Tuple[State, State]]
    evidence: Optional[Distinction] = None


def _signature(lts: Lts, tag: int, state: State, block_id: Dict) -> FrozenSet:
    return frozenset((label, block_id[(tag, target)]) for label, target in lts.successors(state))


def bisimilar(l1: Lts, l2: Lts) -> BisimResult:
    """
    Strong bisimilarity of the reachable parts, by partition refinement

    Returns:
        holds, the greatest bisimulation between reachable states, and
        when the initial states are separated a distinguishing move
    """
    reach1 = sorted(l1.reachable(), key=canonical_key)
    reach2 = sorted(l2.reachable(), key=canonical_key)
    nodes = [(1, s) for s in reach1] + [(2, s) for s in reach2]
    owner = {1: l1, 2: l2}
    block_id = {node: 0 for node in nodes}
    count = 1
    rounds = 0
    while True:
        rounds += 1
        signatures = {
            node: (block_id[node], _signature(owner[node[0]], node[0], node[1], block_id))
            for node in nodes
        }
        numbering: Dict = {}
        refined = {node: numbering.setdefault(sig, len(numbering)) for node, sig in signatures.items()}
        if len(numbering) == count:
            break
        previous, block_id, count = block_id, refined, len(numbering)
        if block_id[(1, l1.initial)] != block_id[(2, l2.initial)]:
            evidence = _distinguish(l1, l2, previous)
            logger.debug("initial states separated after {} rounds", rounds)
            return BisimResult(False, frozenset(), evidence)
    relation = frozenset(
        (s, t) for s in reach1 for t in reach2 if block_id[(1, s)] == block_id[(2, t)]
    )
    holds = (l1.initial, l2.initial) in relation
    return BisimResult(holds, relation if holds else frozenset(), None if holds else _distinguish(l1, l2, block_id))


def _distinguish(l1: Lts, l2: Lts, block_id: Dict) -> Distinction:
    moves1 = {(lab, block_id[(1, t)]) for lab, t in l1.successors(l1.initial)}
    moves2 = {(lab, block_id[(2, t)]) for lab, t in l2.successors(l2.initial)}
    for side, mine, theirs, lts in ((1, moves1, moves2, l1), (2, moves2, moves1, l2)):
        for label, block in sorted(mine - theirs, key=lambda mv: (canonical_key(mv[0]), mv[1])):
            return Distinction(label, side, lts.initial)
    # same moves, separated only by an earlier round: report an enabled label
    first = next(iter(l1.successors(l1.initial)), None)
    return Distinction(first[0] if first else None, 1, l1.initial)


def validate_bisimulation(l1: Lts, l2: Lts, relation: Iterable[Tuple[State, State]]) -> bool:
    """Check that relation is a bisimulation relating the initial states"""
    relation = frozenset(relation)
    if (l1.initial, l2.initial) not in relation:
        return False
    for s, t in relation:
        for label, s2 in l1.successors(s):
            if not any((s2, t2) in relation for t2 in l2.post(t, label)):
                return False
        for label, t2 in l2.successors(t):
            if not any((s2, t2) in relation for s2 in l1.post(s, label)):
                return False
    return True


def recompose(m: GlobalModel, eq: NEquivalence) -> TeamAutomaton:
    """The team of the local quotients of m under eq"""
    system = System(tuple((n, quotient(m, eq, n)) for n in m.names))
    return team(system, m.spec)


def is_bijection(relation: FrozenSet[Tuple[State, State]], left: Iterable[State], right: Iterable[State]) -> bool:
    """relation pairs each left state with exactly one right state and vice versa"""
    left, right = set(left), set(right)
    image: Dict[State, State] = {}
    preimage: Dict[State, State] = {}
    for s, t in relation:
        if image.setdefault(s, t) != t or preimage.setdefault(t, s) != s:
            return False
    return set(image) == left and set(preimage) == right


@dataclass(frozen=True)
class Realised:
    """Outcome of a successful realisation"""

    system: System
    equivalence: NEquivalence
    team: TeamAutomaton
    relation: FrozenSet[Tuple[State, State]]
    model_states: int
    team_states: int
    isomorphic: bool


@dataclass(frozen=True)
class Inconclusive:
    """RC could not be established; the model may still be realisable"""

    equivalence: NEquivalence
    report: RcReport


def realise_pipeline(
    sig: SystemSignature,
    spec: SyncTypeSpec,
    m: Union[Lts, GlobalModel],
) -> Union[Realised, Inconclusive]:
    """
    Saturate, build the local quotients, re-compose and verify bisimilarity

    Raises:
        ModelIllFormedError: A model label is outside Λ(Θ, st)
    """
    if isinstance(m, GlobalModel) and (m.signature, m.spec) == (sig, spec):
        model = m
    else:
        model = GlobalModel(m.lts if isinstance(m, GlobalModel) else m, sig, spec)
    eq, report = saturate(model)
    if not report.holds:
        return Inconclusive(eq, report)

    recomposed = recompose(model, eq)
    result = bisimilar(recomposed.lts, model.lts)
    if not result.holds or not validate_bisimulation(recomposed.lts, model.lts, result.relation):
        # RC guarantees bisimilarity; reaching this means an inconsistent input
        raise ModelError("re-composed team is not bisimilar to the global model")
    team_reach = recomposed.reachable_states
    model_reach = model.lts.reachable()
    logger.info(
        "realised: team has {} reachable states, model {}", len(team_reach), len(model_reach),
    )
    return Realised(
        recomposed.system,
        eq,
        recomposed,
        result.relation,
        len(model_reach),
        len(team_reach),
        is_bijection(result.relation, team_reach, model_reach),
    )
