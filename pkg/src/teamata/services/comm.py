"""
Receptiveness and responsiveness: requirement derivation and compliance checks
"""
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from loguru import logger

from teamata.core.cache import ClosureCache
from teamata.core.config import config
from teamata.core.errors import ForeignRequirementError
from teamata.models.sync import SyncTypeSpec
from teamata.models.system import Interaction, System, SystemLabel, SystemState
from teamata.services.teams import TeamAutomaton, team
from teamata.utils.helpers import canonical_key, format_state, natural_key


class Kind(str, Enum):
    RCP = "rcp"
    RSP = "rsp"


class Mode(str, Enum):
    STRICT = "strict"
    WEAK = "weak"


@dataclass(frozen=True)
class Requirement:
    """rcp(out, a)@q or rsp(in, a)@q"""

    kind: Kind
    group: FrozenSet[str]
    action: str
    state: SystemState

    def key(self) -> Tuple:
        return (
            canonical_key(self.state),
            natural_key(self.action),
            0 if self.kind is Kind.RCP else 1,
            tuple(sorted(natural_key(n) for n in self.group)),
        )

    def __str__(self) -> str:
        group = ",".join(sorted(self.group, key=natural_key))
        return f"{self.kind.value}({group},{self.action})@{format_state(self.state)}"


@dataclass(frozen=True)
class ComplianceVerdict:
    """Outcome of checking one requirement"""

    requirement: Requirement
    satisfied: bool
    mode: Mode
    witness: Tuple[SystemLabel, ...] = ()
    counterexample_state: Optional[SystemState] = None


class ReceptivenessResult(NamedTuple):
    holds: bool
    failures: List[ComplianceVerdict]


class StarvedComponent(NamedTuple):
    state: SystemState
    component: str
    verdicts: List[ComplianceVerdict]


class ResponsivenessResult(NamedTuple):
    holds: bool
    failures: List[StarvedComponent]


closure_cache = ClosureCache(
    enabled=config.analysis.memoise_closures, max_entries=config.analysis.closure_cache_size,
)


def _groups(ready: Tuple[str, ...], low: int, high: Optional[int]):
    top = len(ready) if high is None else min(high, len(ready))
    for size in range(max(1, low), top + 1):
        for group in combinations(sorted(ready, key=natural_key), size):
            yield frozenset(group)


def _derive(system: System, spec: SyncTypeSpec, ta: TeamAutomaton, kind: Kind) -> List[Requirement]:
    found = []
    for state in sorted(ta.reachable_states, key=canonical_key):
        for action in sorted(system.communicating, key=natural_key):
            stype = spec[action]
            if kind is Kind.RCP:
                own, other, owners = stype.out, stype.inp, system.output_owners(action)
            else:
                own, other, owners = stype.inp, stype.out, system.input_owners(action)
            if other.contains(0):
                continue
            ready = system.participants_enabled(state, action, owners)
            for group in _groups(ready, own.low, own.high):
                found.append(Requirement(kind, group, action, state))
    return found


def derive_rcp(system: System, spec: SyncTypeSpec, ta: Optional[TeamAutomaton] = None) -> List[Requirement]:
    """Receptiveness requirements at the reachable states of the team"""
    ta = ta or team(system, spec)
    return _derive(system, spec, ta, Kind.RCP)


def derive_rsp(system: System, spec: SyncTypeSpec, ta: Optional[TeamAutomaton] = None) -> List[Requirement]:
    """Responsiveness requirements at the reachable states of the team"""
    ta = ta or team(system, spec)
    return _derive(system, spec, ta, Kind.RSP)


def requirements(system: System, spec: SyncTypeSpec, ta: Optional[TeamAutomaton] = None) -> List[Requirement]:
    """All rcp and rsp requirements in canonical order"""
    ta = ta or team(system, spec)
    return sorted(derive_rcp(system, spec, ta) + derive_rsp(system, spec, ta), key=Requirement.key)


def _completes(label: SystemLabel, req: Requirement) -> bool:
    if not isinstance(label, Interaction) or label.action != req.action:
        return False
    if req.kind is Kind.RCP:
        return label.senders == req.group and bool(label.receivers)
    return label.receivers == req.group and bool(label.senders)


def _completion(ta: TeamAutomaton, state: SystemState, req: Requirement) -> Optional[SystemLabel]:
    for label, _ in ta.lts.successors(state):
        if _completes(label, req):
            return label
    return None


class _Closure(NamedTuple):
    order: Tuple[SystemState, ...]
    parent: Dict[SystemState, Tuple[SystemState, SystemLabel]]


def _avoiding_closure(ta: TeamAutomaton, start: SystemState, group: FrozenSet[str]) -> _Closure:
    """BFS over team labels in which no member of group participates"""
    order = [start]
    parent: Dict[SystemState, Tuple[SystemState, SystemLabel]] = {}
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for label, target in ta.lts.successors(state):
            if label.participants & group or target in seen:
                continue
            seen.add(target)
            parent[target] = (state, label)
            order.append(target)
            queue.append(target)
    return _Closure(tuple(order), parent)


def _path_to(closure: _Closure, state: SystemState) -> List[SystemLabel]:
    path = []
    while state in closure.parent:
        state, label = closure.parent[state]
        path.append(label)
    path.reverse()
    return path


def check_compliance(ta: TeamAutomaton, req: Requirement, mode: Mode = Mode.STRICT) -> ComplianceVerdict:
    """
    Check a requirement in strict or weak mode

    The weak witness is the shortest group-avoiding path followed by the
    completing interaction; ties resolve to the lexicographically least
    label sequence.

    Raises:
        ForeignRequirementError: req.state is not reachable in ta
    """
    mode = Mode(mode)
    if req.state not in ta.reachable_states:
        raise ForeignRequirementError(f"{req} is not at a reachable state of this team")

    if mode is Mode.STRICT:
        label = _completion(ta, req.state, req)
        if label is not None:
            return ComplianceVerdict(req, True, mode, (label,))
        return ComplianceVerdict(req, False, mode, counterexample_state=req.state)

    closure = closure_cache.get_or_compute(
        (ta, req.state, req.group),
        lambda: _avoiding_closure(ta, req.state, req.group),
    )
    for state in closure.order:
        label = _completion(ta, state, req)
        if label is not None:
            return ComplianceVerdict(req, True, mode, tuple(_path_to(closure, state)) + (label,))
    return ComplianceVerdict(req, False, mode, counterexample_state=req.state)


def replay_witness(
    ta: TeamAutomaton,
    req: Requirement,
    witness: Sequence[SystemLabel],
    mode: Mode = Mode.STRICT,
) -> bool:
    """
    Whether witness is a run of ta from req.state ending in a step that meets req

    A strict witness is that single step. In a weak one every earlier step
    leaves the group of req out.
    """
    if not witness:
        return False
    *prefix, last = witness
    if Mode(mode) is Mode.STRICT and prefix:
        return False
    current = {req.state}
    for label in prefix:
        if label.participants & req.group:
            return False
        current = {target for state in current for target in ta.lts.post(state, label)}
        if not current:
            return False
    return _completes(last, req) and any(ta.lts.post(state, last) for state in current)


def check_all(ta: TeamAutomaton, reqs: List[Requirement], mode: Mode) -> List[ComplianceVerdict]:
    """Check requirements, in parallel when configured"""
    workers = config.analysis.max_workers
    if workers <= 1 or len(reqs) < 2:
        return [check_compliance(ta, req, mode) for req in reqs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: check_compliance(ta, r, mode), reqs))


def is_receptive(
    system: System,
    spec: SyncTypeSpec,
    mode: Mode = Mode.STRICT,
    ta: Optional[TeamAutomaton] = None,
) -> ReceptivenessResult:
    """Every receptiveness requirement is (weakly) met"""
    ta = ta or team(system, spec)
    verdicts = check_all(ta, derive_rcp(system, spec, ta), Mode(mode))
    failures = [v for v in verdicts if not v.satisfied]
    logger.info("receptiveness ({}): {} requirements, {} failing", Mode(mode).value, len(verdicts), len(failures))
    return ReceptivenessResult(not failures, failures)


def starved_components(verdicts: List[ComplianceVerdict]) -> List[StarvedComponent]:
    """Group rsp verdicts by (state, member); keep the groups with no satisfied verdict"""
    by_member: Dict[Tuple[SystemState, str], List[ComplianceVerdict]] = {}
    for verdict in verdicts:
        if verdict.requirement.kind is not Kind.RSP:
            continue
        for member in verdict.requirement.group:
            by_member.setdefault((verdict.requirement.state, member), []).append(verdict)
    ordered = sorted(by_member.items(), key=lambda kv: (canonical_key(kv[0][0]), natural_key(kv[0][1])))
    return [
        StarvedComponent(state, member, found)
        for (state, member), found in ordered
        if not any(v.satisfied for v in found)
    ]


def is_responsive(
    system: System,
    spec: SyncTypeSpec,
    mode: Mode = Mode.STRICT,
    ta: Optional[TeamAutomaton] = None,
) -> ResponsivenessResult:
    """
    Per reachable state and component, one responsiveness requirement
    containing that component is (weakly) met
    """
    ta = ta or team(system, spec)
    reqs = derive_rsp(system, spec, ta)
    verdicts = check_all(ta, reqs, Mode(mode))
    failures = starved_components(verdicts)
    logger.info(
        "responsiveness ({}): {} requirements, {} starved components",
        Mode(mode).value, len(reqs), len(failures),
    )
    return ResponsivenessResult(not failures, failures)


def deadlock_states(ta: TeamAutomaton) -> List[SystemState]:
    """Reachable team states without outgoing transitions"""
    return sorted(
        (s for s in ta.reachable_states if not ta.lts.successors(s)),
        key=canonical_key,
    )


def describe_failure(failure) -> str:
    """One-line rendering of a failing verdict or starved component"""
    if isinstance(failure, StarvedComponent):
        return f"{failure.component} starved at {format_state(failure.state)}"
    return f"{failure.requirement} not {failure.mode.value}ly met"
