"""
Composition of systems and synchronisation type specifications
"""
from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from teamata.core.errors import CompositionError, SpecIncompleteError
from teamata.models.sync import SyncTypeSpec
from teamata.models.system import System
from teamata.services.comm import (
    ComplianceVerdict, Kind, Mode, ReceptivenessResult, ResponsivenessResult, StarvedComponent,
    check_all, is_receptive, is_responsive, requirements, starved_components,
)
from teamata.services.teams import TeamAutomaton, team
from teamata.utils.helpers import format_set, natural_key

Part = Tuple[System, SyncTypeSpec]


def _all_actions(system: System) -> FrozenSet[str]:
    return system.actions | system.internals


def composable(parts: Sequence[Part]) -> Tuple[bool, List[str]]:
    """
    Pairwise check: component names are unique and an action communicating
    in one part does not occur in another

    Returns:
        (composable, conflicts)
    """
    conflicts = []
    for (k, (sys_k, _)), (l, (sys_l, _)) in combinations(enumerate(parts), 2):
        for name in sorted(set(sys_k.names) & set(sys_l.names), key=natural_key):
            conflicts.append(f"parts {k} and {l} both name a component '{name}'")
        for first, second, i, j in ((sys_k, sys_l, k, l), (sys_l, sys_k, l, k)):
            for action in sorted(first.communicating & _all_actions(second), key=natural_key):
                conflicts.append(f"action '{action}' is communicating in part {i} and occurs in part {j}")
    return not conflicts, conflicts


def _flatten(parts: Sequence[Part]) -> System:
    components = [c for system, _ in parts for c in system.components]
    return System(tuple(sorted(components, key=lambda c: natural_key(c[0]))))


def interface_actions(parts: Sequence[Part]) -> FrozenSet[str]:
    """Σ_inf: communicating in the union, communicating in no part"""
    if len(parts) < 2:
        return frozenset()
    inner = frozenset().union(*(system.communicating for system, _ in parts))
    return _flatten(parts).communicating - inner


@dataclass(frozen=True)
class CompositionPlan:
    """Parts to compose and the types of their interface actions"""

    parts: Tuple[Part, ...]
    interface_spec: SyncTypeSpec

    def __post_init__(self):
        object.__setattr__(self, 'parts', tuple(self.parts))
        ok, conflicts = composable(self.parts)
        if not ok:
            raise CompositionError("; ".join(conflicts))
        interface = interface_actions(self.parts)
        for action in sorted(interface, key=natural_key):
            if action not in self.interface_spec:
                raise SpecIncompleteError(action, "interface")
        extra = set(self.interface_spec) - interface
        if extra:
            raise CompositionError(f"{format_set(extra)} are not interface actions")

    @property
    def interface(self) -> FrozenSet[str]:
        return interface_actions(self.parts)


def compose(plan: CompositionPlan) -> Tuple[System, SyncTypeSpec]:
    """
    Flatten the parts into one system and merge their specs

    Component names are ordered naturally. Each part keeps its own types;
    interface actions take the plan's interface types.
    """
    system = _flatten(plan.parts)
    types = {}
    interface = plan.interface
    for part_system, part_spec in plan.parts:
        actions = _all_actions(part_system)
        types.update({a: t for a, t in part_spec.items() if a in actions and a not in interface})
    types.update(plan.interface_spec)
    logger.debug(
        "composed {} parts into {} components, interface {}",
        len(plan.parts), len(system.names), format_set(interface),
    )
    return system, SyncTypeSpec(types)


@dataclass(frozen=True)
class PartVerdict:
    names: Tuple[str, ...]
    receptive: ReceptivenessResult
    responsive: ResponsivenessResult


@dataclass(frozen=True)
class PreservationReport:
    """Per-part verdicts, interface-action verdicts and the combined conclusion"""

    mode: Mode
    parts: Tuple[PartVerdict, ...]
    interface_verdicts: Tuple[ComplianceVerdict, ...]
    interface_starved: Tuple[StarvedComponent, ...]
    team: TeamAutomaton

    @property
    def interface_holds(self) -> bool:
        rcp_ok = all(v.satisfied for v in self.interface_verdicts if v.requirement.kind is Kind.RCP)
        return rcp_ok and not self.interface_starved

    @property
    def holds(self) -> bool:
        return self.interface_holds and all(
            p.receptive.holds and p.responsive.holds for p in self.parts
        )


def check_preservation(plan: CompositionPlan, mode: Mode = Mode.STRICT) -> PreservationReport:
    """
    Verify the parts, then the requirements of the composed team on
    interface actions only
    """
    mode = Mode(mode)
    parts = tuple(
        PartVerdict(
            system.names,
            is_receptive(system, spec, mode),
            is_responsive(system, spec, mode),
        )
        for system, spec in plan.parts
    )
    system, spec = compose(plan)
    composed = team(system, spec)
    interface = plan.interface
    reqs = [r for r in requirements(system, spec, composed) if r.action in interface]
    verdicts = check_all(composed, reqs, mode)

    starved = tuple(starved_components(verdicts))
    report = PreservationReport(mode, parts, tuple(verdicts), starved, composed)
    logger.info(
        "preservation ({}): {} interface requirements, combined verdict {}",
        mode.value, len(verdicts), report.holds,
    )
    return report


def find_verdict(report: PreservationReport, kind: Kind, group: Iterable[str], action: str, state) -> Optional[ComplianceVerdict]:
    """Look up the interface verdict of one requirement"""
    group = frozenset(group)
    for verdict in report.interface_verdicts:
        req = verdict.requirement
        if req.kind is kind and req.group == group and req.action == action and req.state == state:
            return verdict
    return None
