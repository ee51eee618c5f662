"""
Structured reports

Every report serialises to one JSON line carrying the schema tag and its
kind; ``load_report`` validates a line back into the matching model. Only
the current schema version loads. The ``recheck_*`` functions hold a loaded
report against the team or global model it describes.
"""
from typing import Annotated, Dict, Iterable, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from teamata.core.config import config
from teamata.services.comm import (
    ComplianceVerdict, Mode, ReceptivenessResult, ResponsivenessResult, StarvedComponent, check_compliance,
    deadlock_states, describe_failure, replay_witness, requirements,
)
from teamata.services.compose import PreservationReport
from teamata.services.featured import Product
from teamata.services.pdl import PdlResult
from teamata.services.realise import (
    GlobalModel, Inconclusive, NEquivalence, Realised, check_rc, recompose, validate_bisimulation,
)
from teamata.services.teams import TeamAutomaton
from teamata.utils.helpers import format_label, format_state, natural_key, sorted_canonical
from teamata.utils.union_find import UnionFind


SCHEMA_PREFIX = "teamata.report/"


def current_schema() -> str:
    return f"{SCHEMA_PREFIX}{config.output.report_schema_version}"


class _Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    schema_tag: str = Field(default_factory=current_schema, alias="schema")

    @field_validator("schema_tag")
    @classmethod
    def _known_schema(cls, value: str) -> str:
        if not value.startswith(SCHEMA_PREFIX):
            raise ValueError(f"unknown report schema {value!r}")
        if value != current_schema():
            raise ValueError(f"unsupported report schema {value!r}, expected {current_schema()!r}")
        return value

    def to_line(self) -> str:
        return self.model_dump_json(by_alias=True)


class VerdictEntry(BaseModel):
    """One requirement verdict"""
    requirement: str
    satisfied: bool
    mode: str
    witness: List[str] = Field(default_factory=list)

    @classmethod
    def of(cls, verdict: ComplianceVerdict) -> "VerdictEntry":
        return cls(
            requirement=str(verdict.requirement),
            satisfied=verdict.satisfied,
            mode=verdict.mode.value,
            witness=[format_label(lab) for lab in verdict.witness],
        )


class FailureEntry(BaseModel):
    """A failing requirement or starved component"""
    state: str
    detail: str
    requirements: List[VerdictEntry] = Field(default_factory=list)

    @classmethod
    def of(cls, failure: Union[ComplianceVerdict, StarvedComponent]) -> "FailureEntry":
        if isinstance(failure, StarvedComponent):
            return cls(
                state=format_state(failure.state),
                detail=describe_failure(failure),
                requirements=[VerdictEntry.of(v) for v in failure.verdicts],
            )
        return cls(
            state=format_state(failure.requirement.state),
            detail=describe_failure(failure),
            requirements=[VerdictEntry.of(failure)],
        )


class TeamReport(_Report):
    kind: Literal["team"] = "team"
    system: str
    initial: str
    states: List[str]
    transitions: List[Tuple[str, str, str]]

    @classmethod
    def of(cls, name: str, ta: TeamAutomaton) -> "TeamReport":
        reach = ta.reachable_part
        return cls(
            system=name,
            initial=format_state(reach.initial),
            states=[format_state(s) for s in reach.sorted_states()],
            transitions=[
                (format_state(s), format_label(lab), format_state(t))
                for s, lab, t in reach.sorted_transitions()
            ],
        )


class VerdictReport(_Report):
    kind: Literal["verdict"] = "verdict"
    system: str
    property: Literal["receptive", "responsive", "deadlock-free"]
    mode: str
    holds: bool
    failures: List[FailureEntry] = Field(default_factory=list)

    @classmethod
    def of(
        cls,
        name: str,
        prop: str,
        mode: str,
        result: Union[ReceptivenessResult, ResponsivenessResult],
    ) -> "VerdictReport":
        return cls(
            system=name,
            property=prop,
            mode=mode,
            holds=result.holds,
            failures=[FailureEntry.of(f) for f in result.failures],
        )

    @classmethod
    def deadlocks(cls, name: str, states: Iterable) -> "VerdictReport":
        states = list(states)
        return cls(
            system=name,
            property="deadlock-free",
            mode="strict",
            holds=not states,
            failures=[FailureEntry(state=format_state(s), detail="no outgoing team transition") for s in states],
        )


class RealisationReport(_Report):
    kind: Literal["realisation"] = "realisation"
    model: str
    outcome: Literal["realised", "inconclusive"]
    partitions: Dict[str, List[List[str]]]
    relation: List[Tuple[str, str]] = Field(default_factory=list)
    model_states: Optional[int] = None
    team_states: Optional[int] = None
    isomorphic: Optional[bool] = None
    violations: List[str] = Field(default_factory=list)

    @classmethod
    def of(cls, name: str, outcome: Union[Realised, Inconclusive]) -> "RealisationReport":
        partitions = {
            n: [[format_state(q) for q in sorted_canonical(block)] for block in blocks]
            for n, blocks in outcome.equivalence.as_dict().items()
        }
        if isinstance(outcome, Inconclusive):
            return cls(
                model=name,
                outcome="inconclusive",
                partitions=partitions,
                violations=[v.detail for v in outcome.report.violations],
            )
        return cls(
            model=name,
            outcome="realised",
            partitions=partitions,
            relation=[(format_state(s), format_state(t)) for s, t in sorted_canonical(outcome.relation)],
            model_states=outcome.model_states,
            team_states=outcome.team_states,
            isomorphic=outcome.isomorphic,
        )


class CompositionReport(_Report):
    kind: Literal["composition"] = "composition"
    components: List[str]
    interface: List[str]
    mode: str
    team_states: int
    team_transitions: int
    parts_hold: List[bool]
    interface_verdicts: List[VerdictEntry]
    starved: List[FailureEntry] = Field(default_factory=list)
    holds: bool

    @classmethod
    def of(cls, report: PreservationReport, interface: Iterable[str]) -> "CompositionReport":
        reach = report.team.reachable_part
        return cls(
            components=list(report.team.system.names),
            interface=sorted(interface, key=natural_key),
            mode=report.mode.value,
            team_states=len(reach.states),
            team_transitions=len(reach.transitions),
            parts_hold=[p.receptive.holds and p.responsive.holds for p in report.parts],
            interface_verdicts=[VerdictEntry.of(v) for v in report.interface_verdicts],
            starved=[FailureEntry.of(s) for s in report.interface_starved],
            holds=report.holds,
        )


class ProductEntry(BaseModel):
    product: List[str]
    holds: bool
    failures: List[FailureEntry] = Field(default_factory=list)


class ProductsReport(_Report):
    kind: Literal["products"] = "products"
    system: str
    property: str
    mode: str
    products: List[ProductEntry]
    holds: bool

    @classmethod
    def of(
        cls,
        name: str,
        prop: str,
        mode: str,
        verdicts: Dict[Product, Union[ReceptivenessResult, ResponsivenessResult]],
    ) -> "ProductsReport":
        entries = [
            ProductEntry(
                product=sorted(p, key=natural_key),
                holds=v.holds,
                failures=[FailureEntry.of(f) for f in v.failures],
            )
            for p, v in verdicts.items()
        ]
        return cls(
            system=name, property=prop, mode=mode, products=entries,
            holds=all(e.holds for e in entries),
        )


class FormulaEntry(BaseModel):
    name: str
    formula: str
    holds: bool
    satisfying: List[str]
    path: Optional[List[str]] = None


class PdlReport(_Report):
    kind: Literal["pdl"] = "pdl"
    model: str
    formulas: List[FormulaEntry]
    holds: bool

    @classmethod
    def of(cls, name: str, results: Iterable[Tuple[str, str, PdlResult]]) -> "PdlReport":
        entries = [
            FormulaEntry(
                name=fname,
                formula=text,
                holds=result.holds,
                satisfying=[format_state(s) for s in sorted_canonical(result.satisfying)],
                path=None if result.path is None else [format_label(lab) for lab in result.path],
            )
            for fname, text, result in results
        ]
        return cls(model=name, formulas=entries, holds=all(e.holds for e in entries))


AnyReport = Annotated[
    Union[TeamReport, VerdictReport, RealisationReport, CompositionReport, ProductsReport, PdlReport],
    Field(discriminator="kind"),
]

_adapter: TypeAdapter = TypeAdapter(AnyReport)


def load_report(line: str) -> _Report:
    """
    Validate one JSON line into its report model

    Raises:
        pydantic.ValidationError: Unknown kind or malformed fields
    """
    return _adapter.validate_json(line)


def recheck_verdicts(entries: Iterable[VerdictEntry], ta: TeamAutomaton) -> List[str]:
    """
    Hold loaded requirement verdicts against the team they claim to describe

    A satisfied entry must carry a witness that replays in ta; an unmet one
    must still fail when checked again.

    Returns:
        One line per entry that does not hold up; empty when all do
    """
    reqs = {str(r): r for r in requirements(ta.system, ta.spec, ta)}
    labels = {format_label(lab): lab for lab in ta.lts.labels}
    problems = []
    for entry in entries:
        req = reqs.get(entry.requirement)
        if req is None:
            problems.append(f"{entry.requirement}: not a requirement of this team")
            continue
        mode = Mode(entry.mode)
        if not entry.satisfied:
            if check_compliance(ta, req, mode).satisfied:
                problems.append(f"{entry.requirement}: reported unmet but is {mode.value}ly met")
            continue
        witness = [labels.get(text) for text in entry.witness]
        if None in witness or not replay_witness(ta, req, witness, mode):
            problems.append(f"{entry.requirement}: witness does not replay")
    return problems


def recheck_verdict(report: VerdictReport, ta: TeamAutomaton) -> List[str]:
    """Hold a loaded verdict report against ta; returns the discrepancies"""
    reach = {format_state(s) for s in ta.reachable_states}
    problems = [f"{f.state}: not a reachable team state" for f in report.failures if f.state not in reach]
    if report.holds != (not report.failures):
        problems.append(f"holds={report.holds} disagrees with {len(report.failures)} failures")
    if report.property == "deadlock-free":
        actual = [format_state(s) for s in deadlock_states(ta)]
        if [f.state for f in report.failures] != actual:
            problems.append(f"deadlocks {[f.state for f in report.failures]} differ from {actual}")
        return problems
    entries = [entry for failure in report.failures for entry in failure.requirements]
    return problems + recheck_verdicts(entries, ta)


def _equivalence_of(report: RealisationReport, m: GlobalModel) -> Tuple[Optional[NEquivalence], List[str]]:
    states = {format_state(q): q for q in m.lts.states}
    finds = {}
    for name in m.names:
        blocks = report.partitions.get(name)
        if blocks is None:
            return None, [f"no partition for {name}"]
        listed = [text for block in blocks for text in block]
        if sorted(listed) != sorted(states):
            return None, [f"partition of {name} does not cover the model states exactly once"]
        uf = UnionFind(m.lts.states)
        for first, *rest in (block for block in blocks if block):
            for text in rest:
                uf.union(states[first], states[text])
        finds[name] = uf
    return NEquivalence.from_union_finds(m.names, finds), []


def recheck_realisation(report: RealisationReport, m: GlobalModel) -> List[str]:
    """
    Hold a loaded realisation report against the global model it names

    The partitions are re-applied to m. A realised report's relation must be
    a bisimulation between the re-composed team and m; an inconclusive one's
    partitions must still violate the realisability condition.
    """
    eq, problems = _equivalence_of(report, m)
    if eq is None:
        return problems
    if report.outcome == "inconclusive":
        return [] if not check_rc(m, eq).holds else ["partitions satisfy the realisability condition"]
    recomposed = recompose(m, eq)
    team_states = {format_state(s): s for s in recomposed.lts.states}
    model_states = {format_state(q): q for q in m.lts.states}
    relation = set()
    for left, right in report.relation:
        if left not in team_states or right not in model_states:
            return [f"relation pair ({left}, {right}) names an unknown state"]
        relation.add((team_states[left], model_states[right]))
    if not validate_bisimulation(recomposed.lts, m.lts, relation):
        problems.append("relation is not a bisimulation between the re-composed team and the model")
    return problems
