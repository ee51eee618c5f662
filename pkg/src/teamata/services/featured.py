"""
Featured component automata, systems, STSs and teams; projection to products
"""
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from loguru import logger

from teamata.core.config import config
from teamata.core.errors import (
    FeatureCapExceededError, InvalidProductError, ModelError, SpecIncompleteError,
)
from teamata.models.automata import ComponentAutomaton, LocalTransition
from teamata.models.features import (
    FALSE, TRUE, FeatureExpr, conj, disj, evaluate, neg, variables,
)
from teamata.models.lts import Lts, Transition
from teamata.models.sync import SyncType, SyncTypeSpec
from teamata.models.system import Interaction, System, lts_of_system
from teamata.services.comm import (
    Mode, ReceptivenessResult, ResponsivenessResult, is_receptive, is_responsive,
)
from teamata.services.teams import team
from teamata.utils.helpers import canonical_key, format_set, natural_key

Product = FrozenSet[str]


def valid_products(features: Iterable[str], feature_model: FeatureExpr, cap: Optional[int] = None) -> List[Product]:
    """
    Every subset of the features that satisfies the feature model

    Args:
        features: Declared feature set
        feature_model: Constraint over the features
        cap: Largest feature count to enumerate; defaults to the configured cap

    Raises:
        FeatureCapExceededError: Too many features
    """
    features = sorted(set(features), key=natural_key)
    cap = config.analysis.feature_cap if cap is None else cap
    if len(features) > cap:
        raise FeatureCapExceededError(len(features), cap)
    if len(features) > cap - 2:
        logger.warning("enumerating 2^{} products, close to the cap of {}", len(features), cap)
    products = [
        frozenset(combo)
        for size in range(len(features) + 1)
        for combo in itertools.combinations(features, size)
        if evaluate(feature_model, frozenset(combo))
    ]
    logger.debug("{} valid products over {} features", len(products), len(features))
    return products


@dataclass(frozen=True)
class FeaturedCA:
    """A component automaton whose transitions carry feature guards"""

    ca: ComponentAutomaton
    guards: Tuple[Tuple[LocalTransition, FeatureExpr], ...]
    features: FrozenSet[str]
    feature_model: FeatureExpr = TRUE

    def __post_init__(self):
        guards = tuple(sorted(
            dict(self.guards).items(),
            key=lambda kv: (canonical_key(kv[0][0]), kv[0][1], canonical_key(kv[0][2])),
        ))
        object.__setattr__(self, 'guards', guards)
        object.__setattr__(self, 'features', frozenset(self.features))
        guarded = {t for t, _ in guards}
        if guarded != set(self.ca.transitions):
            raise ModelError("every transition needs exactly one guard")
        unknown = variables(self.feature_model).union(*(variables(g) for _, g in guards)) - self.features
        if unknown:
            raise ModelError(f"undeclared features {format_set(unknown)}")

    @classmethod
    def build(
        cls,
        ca: ComponentAutomaton,
        guards: Optional[Mapping[LocalTransition, FeatureExpr]] = None,
        features: Iterable[str] = (),
        feature_model: FeatureExpr = TRUE,
    ) -> "FeaturedCA":
        """Unlisted transitions are guarded by true"""
        guards = dict(guards or {})
        full = {t: guards.get(t, TRUE) for t in ca.transitions}
        return cls(ca, tuple(full.items()), frozenset(features), feature_model)

    def guard(self, transition: LocalTransition) -> FeatureExpr:
        return dict(self.guards)[transition]


def check_product(product: Iterable[str], features: FrozenSet[str], feature_model: FeatureExpr) -> Product:
    product = frozenset(product)
    if not product <= features or not evaluate(feature_model, product):
        raise InvalidProductError(f"{format_set(product)} is not a valid product")
    return product


def project_fca(fca: FeaturedCA, product: Iterable[str]) -> ComponentAutomaton:
    """A ↾ p: keep the transitions whose guard p satisfies"""
    product = check_product(product, fca.features, fca.feature_model)
    return fca.ca.with_transitions(t for t, g in fca.guards if evaluate(g, product))


@dataclass(frozen=True)
class FeaturedSystem:
    """Featured component automata over one shared feature set and model"""

    components: Tuple[Tuple[str, FeaturedCA], ...]

    def __post_init__(self):
        components = tuple(self.components)
        object.__setattr__(self, 'components', components)
        if not components:
            raise ModelError("a featured system needs at least one component")
        first = components[0][1]
        for name, fca in components[1:]:
            if fca.features != first.features or fca.feature_model != first.feature_model:
                raise ModelError(f"{name} does not share the feature set and feature model")

    @property
    def features(self) -> FrozenSet[str]:
        return self.components[0][1].features

    @property
    def feature_model(self) -> FeatureExpr:
        return self.components[0][1].feature_model

    def underlying(self) -> System:
        """The system with every transition present"""
        return System(tuple((n, fca.ca) for n, fca in self.components))

    def products(self) -> List[Product]:
        return valid_products(self.features, self.feature_model)


def project_fsys(fsys: FeaturedSystem, product: Iterable[str]) -> System:
    """S ↾ p, component-wise"""
    return System(tuple((n, project_fca(fca, product)) for n, fca in fsys.components))


class FeaturedSTS:
    """
    Product-dependent synchronisation types

    Rules are tried in order and the first whose guard the product satisfies
    applies; otherwise the action's default applies.
    """

    def __init__(
        self,
        defaults: Mapping[str, SyncType],
        rules: Iterable[Tuple[FeatureExpr, str, SyncType]] = (),
    ):
        self.defaults: Dict[str, SyncType] = dict(defaults)
        self.rules: Tuple[Tuple[FeatureExpr, str, SyncType], ...] = tuple(rules)
        for _, action, _ in self.rules:
            if action not in self.defaults:
                raise SpecIncompleteError(action, "featured rules without a default")

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FeaturedSTS):
            return self.defaults == other.defaults and self.rules == other.rules
        return NotImplemented

    def __hash__(self) -> int:
        return hash((frozenset(self.defaults.items()), self.rules))

    def __repr__(self) -> str:
        return f"FeaturedSTS({len(self.defaults)} defaults, {len(self.rules)} rules)"

    @classmethod
    def constant(cls, spec: Mapping[str, SyncType]) -> "FeaturedSTS":
        return cls(spec)

    @property
    def actions(self) -> FrozenSet[str]:
        return frozenset(self.defaults)

    def rules_for(self, action: str) -> List[Tuple[FeatureExpr, SyncType]]:
        return [(g, t) for g, a, t in self.rules if a == action]

    def resolve(self, product: Product, action: str) -> SyncType:
        for guard, stype in self.rules_for(action):
            if evaluate(guard, product):
                return stype
        try:
            return self.defaults[action]
        except KeyError:
            raise SpecIncompleteError(action) from None

    def at(self, product: Product) -> SyncTypeSpec:
        """The plain STS of one product"""
        return SyncTypeSpec({a: self.resolve(product, a) for a in self.defaults})

    def admitting(self, action: str, senders: int, receivers: int) -> FeatureExpr:
        """Products whose resolved type for action admits the counts"""
        taken = FALSE
        admitted = FALSE
        for guard, stype in self.rules_for(action):
            if stype.admits(senders, receivers):
                admitted = disj(admitted, conj(guard, neg(taken)))
            taken = disj(taken, guard)
        if self.defaults[action].admits(senders, receivers):
            admitted = disj(admitted, neg(taken))
        return admitted

    def check_total(self, actions: Iterable[str]):
        for action in sorted(actions, key=natural_key):
            if action not in self.defaults:
                raise SpecIncompleteError(action)


@dataclass(frozen=True)
class FeaturedLts:
    """An LTS whose transitions carry feature guards"""

    lts: Lts
    guards: Mapping[Transition, FeatureExpr]
    features: FrozenSet[str]
    feature_model: FeatureExpr

    def guard(self, transition: Transition) -> FeatureExpr:
        return self.guards[transition]

    def live_transitions(self) -> List[Transition]:
        """Transitions enabled in at least one valid product"""
        products = valid_products(self.features, self.feature_model)
        return [
            t for t in self.lts.sorted_transitions()
            if any(evaluate(self.guards[t], p) for p in products)
        ]


def induced_fts(fsys: FeaturedSystem) -> FeaturedLts:
    """fts(S): system transitions guarded by the conjunction of the participants' guards"""
    system = fsys.underlying()
    lts = lts_of_system(system)
    local_guards = {name: dict(fca.guards) for name, fca in fsys.components}
    guards = {}
    for source, label, target in lts.transitions:
        parts = [
            local_guards[n][(system.local(source, n), label.action, system.local(target, n))]
            for n in sorted(label.participants, key=system.index)
        ]
        guards[(source, label, target)] = conj(*parts)
    return FeaturedLts(lts, guards, fsys.features, fsys.feature_model)


def feta(fsys: FeaturedSystem, fst: FeaturedSTS) -> FeaturedLts:
    """
    Featured team automaton

    A transition's team guard holds for p when its system guard does and
    fst(p, a) admits its sender and receiver counts.
    """
    system = fsys.underlying()
    fst.check_total(system.communicating)
    fts = induced_fts(fsys)
    guards = {}
    for transition, guard in fts.guards.items():
        label = transition[1]
        if isinstance(label, Interaction) and label.action in fst.actions:
            guard = conj(guard, fst.admitting(label.action, len(label.senders), len(label.receivers)))
        guards[transition] = guard
    return FeaturedLts(fts.lts, guards, fsys.features, fsys.feature_model)


def project_feta(fl: FeaturedLts, product: Iterable[str]) -> Lts:
    """The plain LTS of one product: transitions whose guard holds"""
    product = check_product(product, fl.features, fl.feature_model)
    return Lts(
        fl.lts.states,
        fl.lts.initial,
        fl.lts.labels,
        frozenset(t for t, g in fl.guards.items() if evaluate(g, product)),
    )


def project_feta_commutes(fsys: FeaturedSystem, fst: FeaturedSTS, product: Iterable[str]) -> bool:
    """Projecting the featured team equals building the team of the projection"""
    product = check_product(product, fsys.features, fsys.feature_model)
    left = project_feta(feta(fsys, fst), product).restrict_to_reachable()
    right = team(project_fsys(fsys, product), fst.at(product)).lts.restrict_to_reachable()
    return left.same_graph(right)


class Property(str, Enum):
    RECEPTIVE = "receptive"
    RESPONSIVE = "responsive"


Verdict = Union[ReceptivenessResult, ResponsivenessResult]


def productwise_check(
    fsys: FeaturedSystem,
    fst: FeaturedSTS,
    prop: Property = Property.RECEPTIVE,
    mode: Mode = Mode.STRICT,
) -> Dict[Product, Verdict]:
    """Check the property on the projection of every valid product"""
    prop, mode = Property(prop), Mode(mode)
    checker = is_receptive if prop is Property.RECEPTIVE else is_responsive

    def run(product: Product) -> Verdict:
        return checker(project_fsys(fsys, product), fst.at(product), mode)

    products = fsys.products()
    workers = config.analysis.max_workers
    if workers > 1 and len(products) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(run, products))
    else:
        verdicts = [run(p) for p in products]
    return dict(zip(products, verdicts))


def safe_products(
    fsys: FeaturedSystem,
    fst: FeaturedSTS,
    prop: Property = Property.RECEPTIVE,
    mode: Mode = Mode.STRICT,
) -> List[Product]:
    """Valid products whose projection has the property"""
    return [p for p, v in productwise_check(fsys, fst, prop, mode).items() if v.holds]
