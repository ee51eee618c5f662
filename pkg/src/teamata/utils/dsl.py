"""
Textual model documents

A document declares systems of component automata with their
synchronisation types, global interaction models, an optional feature
block, interface types for composition and named dynamic-logic formulas::

    system Race {
      component Ctrl { input finish; output start; init 0;
                       0 -> 1: start!; 1 -> 2: finish?; 2 -> 0: finish?; }
      ...
      sync start = [1,1] -> [2,2];
    }
    global M { init 0; 0 -> 1: {Ctrl} -> {R1,R2}: start; ... }
    formula safe = [some*]true;
"""
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, NamedTuple, Optional, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken
from loguru import logger

from teamata.core.errors import DslError, ModelError, TeamataError
from teamata.models.automata import INPUT, INTERNAL, OUTPUT, ComponentAutomaton
from teamata.models.features import (
    FALSE, TRUE, FeatureExpr, Var, conj, disj, implies, neg, xor,
)
from teamata.models.lts import State
from teamata.models.sync import Interval, SyncType, SyncTypeSpec
from teamata.models.system import Interaction, Internal, System
from teamata.services.featured import FeaturedCA, FeaturedSTS, FeaturedSystem
from teamata.services.pdl import (
    Atom, Bottom, Box, Choice, Complement, Conj, Diamond, Disj, Eps, Formula, Neg, Seq, Some,
    Star, Top,
)
from teamata.services.realise import GlobalModel, SystemSignature, interaction_set
from teamata.utils.helpers import format_set, natural_key


@dataclass
class ModelDocument:
    """Everything declared in one source file, in declaration order"""

    systems: Dict[str, System] = field(default_factory=dict)
    specs: Dict[str, SyncTypeSpec] = field(default_factory=dict)
    featured: Dict[str, Tuple[FeaturedSystem, FeaturedSTS]] = field(default_factory=dict)
    globals: Dict[str, GlobalModel] = field(default_factory=dict)
    interface: Optional[SyncTypeSpec] = None
    features: Optional[FrozenSet[str]] = None
    feature_model: FeatureExpr = TRUE
    formulas: Dict[str, Formula] = field(default_factory=dict)

    def _pick(self, table: Dict[str, Any], name: Optional[str], what: str):
        if not table:
            raise DslError(f"no {what} declared")
        if name is None:
            return next(iter(table.items()))
        if name not in table:
            raise DslError(f"no {what} named '{name}'")
        return name, table[name]

    def system(self, name: Optional[str] = None) -> Tuple[System, SyncTypeSpec]:
        """A system and its STS; the first declared one by default"""
        name, system = self._pick(self.systems, name, "system")
        return system, self.specs[name]

    def global_model(self, name: Optional[str] = None) -> GlobalModel:
        return self._pick(self.globals, name, "global model")[1]

    def featured_system(self, name: Optional[str] = None) -> Tuple[FeaturedSystem, FeaturedSTS]:
        if self.features is None:
            raise DslError("no features declared")
        return self._pick(self.featured, name, "system")[1]


# Raw declarations produced by the tree transformer

class Located(NamedTuple):
    value: Any
    line: int
    column: int


class Decl(NamedTuple):
    kind: str
    names: List[Token]


class Init(NamedTuple):
    state: Located


class StatesDecl(NamedTuple):
    states: List[Located]


class StepDef(NamedTuple):
    source: Located
    target: Located
    action: Token
    mark: str
    guard: Optional[FeatureExpr]


class SyncDef(NamedTuple):
    action: Token
    guard: Optional[FeatureExpr]
    out: Tuple[Token, Token]
    inp: Tuple[Token, Token]


class ComponentDef(NamedTuple):
    name: Token
    items: List[Any]


class SystemDef(NamedTuple):
    name: Token
    components: List[ComponentDef]
    syncs: List[SyncDef]


class RoleDef(NamedTuple):
    name: Token
    decls: List[Decl]


class GlobalStepDef(NamedTuple):
    source: Located
    target: Located
    label: Interaction


class GlobalDef(NamedTuple):
    name: Token
    base: Optional[Token]
    items: List[Any]


class FeaturesDef(NamedTuple):
    names: List[Token]
    model: FeatureExpr


class InterfaceDef(NamedTuple):
    syncs: List[SyncDef]


class FormulaDef(NamedTuple):
    name: Token
    formula: Formula


@v_args(inline=True)
class _ToAst(Transformer):
    """Parse tree to raw declarations, formulas and feature expressions"""

    def __init__(self):
        super().__init__()
        self.feature_refs: List[Token] = []

    def document(self, *items):
        return list(items)

    def system(self, name, *items):
        return SystemDef(
            name,
            [i for i in items if isinstance(i, ComponentDef)],
            [i for i in items if isinstance(i, SyncDef)],
        )

    def component(self, name, *items):
        return ComponentDef(name, list(items))

    def decl(self, kind, names):
        return Decl(str(kind), names)

    def init(self, state):
        return Init(state)

    def states(self, *states):
        return StatesDecl(list(states))

    def step(self, source, target, action, *rest):
        mark = next((str(t) for t in rest if isinstance(t, Token) and t.type == "MARK"), "")
        guard = next((g for g in rest if not isinstance(g, Token)), None)
        return StepDef(source, target, action, mark, guard)

    def guard(self, expr):
        return expr

    def int_state(self, token):
        return Located(int(token), token.line, token.column)

    def name_state(self, token):
        return Located(str(token), token.line, token.column)

    def name_list(self, *names):
        return list(names)

    def sync_clause(self, action, *rest):
        guard = rest[0] if len(rest) == 3 else None
        return SyncDef(action, guard, rest[-2], rest[-1])

    def interval(self, low, high):
        return (low, high)

    def sync_type(self, out, inp):
        return (out, inp)

    def interface(self, *syncs):
        return InterfaceDef(list(syncs))

    def global_model(self, name, *rest):
        if rest and isinstance(rest[0], Token):
            return GlobalDef(name, rest[0], list(rest[1:]))
        return GlobalDef(name, None, list(rest))

    def role(self, name, *decls):
        return RoleDef(name, list(decls))

    def global_step(self, source, target, label):
        return GlobalStepDef(source, target, label)

    def interaction(self, senders, receivers, action):
        return Interaction(frozenset(senders), str(action), frozenset(receivers))

    def name_set(self, names):
        return [str(n) for n in names or ()]

    def internal_label(self, name, action):
        return Internal(str(name), str(action))

    def features(self, names, *model):
        return FeaturesDef(list(names or ()), model[0] if model else TRUE)

    def formula_def(self, name, formula):
        return FormulaDef(name, formula)

    # feature expressions

    def f_implies(self, left, right):
        return implies(left, right)

    def f_xor(self, left, right):
        return xor(left, right)

    def f_or(self, left, right):
        return disj(left, right)

    def f_and(self, left, right):
        return conj(left, right)

    def f_not(self, arg):
        return neg(arg)

    def f_true(self):
        return TRUE

    def f_false(self):
        return FALSE

    def f_var(self, token):
        self.feature_refs.append(token)
        return Var(str(token))

    # formulas and programs

    def l_or(self, left, right):
        return Disj(left, right)

    def l_and(self, left, right):
        return Conj(left, right)

    def l_not(self, arg):
        return Neg(arg)

    def l_box(self, program, body):
        return Box(program, body)

    def l_diamond(self, program, body):
        return Diamond(program, body)

    def l_true(self):
        return Top()

    def l_false(self):
        return Bottom()

    def p_choice(self, left, right):
        return Choice(left, right)

    def p_seq(self, first, second):
        return Seq(first, second)

    def p_star(self, body):
        return Star(body)

    def p_some(self):
        return Some()

    def p_complement(self, *labels):
        return Complement(frozenset(lab for lab in labels if lab is not None))

    def p_atom(self, label):
        return Atom(label)

    def p_eps(self):
        return Eps()


@lru_cache(maxsize=None)
def _parser() -> Lark:
    return Lark.open(
        "grammar.lark",
        rel_to=__file__,
        start=["document", "formula", "sync_type"],
    )


def _syntax_error(exc: UnexpectedInput) -> DslError:
    if isinstance(exc, UnexpectedEOF):
        return DslError("unexpected end of input", exc.line if exc.line > 0 else None, exc.column)
    if isinstance(exc, UnexpectedCharacters):
        return DslError(f"unexpected character {exc.char!r}", exc.line, exc.column)
    if isinstance(exc, UnexpectedToken):
        if exc.token.type == "$END":
            return DslError("unexpected end of input", exc.line if exc.line > 0 else None, exc.column)
        return DslError(f"unexpected '{exc.token}'", exc.line, exc.column)
    return DslError(str(exc), getattr(exc, 'line', None), getattr(exc, 'column', None))


def _transform(text: str, start: str) -> Tuple[Any, _ToAst]:
    try:
        tree = _parser().parse(text, start=start)
    except UnexpectedInput as exc:
        raise _syntax_error(exc) from None
    transformer = _ToAst()
    return transformer.transform(tree), transformer


def _at(where: Union[Located, Token, None]) -> Tuple[Optional[int], Optional[int]]:
    if where is None:
        return None, None
    return where.line, where.column


def _fail(message: str, where: Union[Located, Token, None] = None) -> DslError:
    return DslError(message, *_at(where))


def _interval(bounds: Tuple[Token, Token]) -> Interval:
    low, high = bounds
    try:
        return Interval(int(low), None if high.type == "STAR_BOUND" else int(high))
    except ModelError as exc:
        raise _fail(str(exc), low) from None


class _Builder:
    """Semantic pass: raw declarations to model objects"""

    def __init__(self, items: List[Any], feature_refs: List[Token], default_type: Optional[SyncType] = None):
        self.items = items
        self.feature_refs = feature_refs
        self.default_type = default_type
        self.doc = ModelDocument()

    def build(self) -> ModelDocument:
        if not self.items:
            raise DslError("no system declared", 1, 1)
        blocks = [i for i in self.items if isinstance(i, FeaturesDef)]
        if len(blocks) > 1:
            raise _fail("features declared twice", blocks[1].names[0] if blocks[1].names else None)
        if blocks:
            self._features(blocks[0])
        elif self.feature_refs:
            raise _fail("feature expression without a features declaration", self.feature_refs[0])

        for item in self.items:
            if isinstance(item, SystemDef):
                self._system(item)
            elif isinstance(item, GlobalDef):
                self._global(item)
            elif isinstance(item, InterfaceDef):
                self._interface(item)
            elif isinstance(item, FormulaDef):
                self._formula(item)
        if not (self.doc.systems or self.doc.globals or self.doc.interface is not None):
            raise DslError("no system declared", 1, 1)
        return self.doc

    def _features(self, block: FeaturesDef):
        names = [str(n) for n in block.names]
        for token in block.names:
            if names.count(str(token)) > 1:
                raise _fail(f"feature '{token}' declared twice", token)
        declared = frozenset(names)
        for token in self.feature_refs:
            if str(token) not in declared:
                raise _fail(f"undeclared feature '{token}'", token)
        self.doc.features = declared
        self.doc.feature_model = block.model

    # systems

    def _component(self, cdef: ComponentDef):
        name = str(cdef.name)
        actions: Dict[str, str] = {}
        initial: Optional[Located] = None
        extra: List[State] = []
        steps: List[StepDef] = []
        for item in cdef.items:
            if isinstance(item, Decl):
                for token in item.names:
                    if str(token) in actions:
                        raise _fail(f"action '{token}' declared twice in {name}", token)
                    actions[str(token)] = item.kind
            elif isinstance(item, Init):
                if initial is not None:
                    raise _fail(f"{name} has two initial states", item.state)
                initial = item.state
            elif isinstance(item, StatesDecl):
                for state in item.states:
                    if state.value in extra:
                        raise _fail(f"duplicate state {state.value}", state)
                    extra.append(state.value)
            else:
                steps.append(item)
        if initial is None:
            raise _fail(f"component {name} has no init", cdef.name)

        marks = {INPUT: "?", OUTPUT: "!", INTERNAL: ""}
        transitions = []
        guards = {}
        for step in steps:
            action = str(step.action)
            if action not in actions:
                raise _fail(f"undeclared action '{action}'", step.action)
            expected = marks[actions[action]]
            if step.mark != expected:
                raise _fail(f"'{action}' is {actions[action]} in {name}, write '{action}{expected}'", step.action)
            transition = (step.source.value, action, step.target.value)
            transitions.append(transition)
            if step.guard is not None:
                guards[transition] = step.guard
        try:
            ca = ComponentAutomaton.build(
                initial.value,
                transitions,
                inputs=[a for a, k in actions.items() if k == INPUT],
                outputs=[a for a, k in actions.items() if k == OUTPUT],
                internals=[a for a, k in actions.items() if k == INTERNAL],
                states=extra,
            )
        except ModelError as exc:
            raise _fail(str(exc), cdef.name) from None
        return ca, guards

    def _system(self, sdef: SystemDef):
        name = str(sdef.name)
        if name in self.doc.systems:
            raise _fail(f"system '{name}' declared twice", sdef.name)
        components = []
        guards = {}
        for cdef in sdef.components:
            ca, component_guards = self._component(cdef)
            components.append((str(cdef.name), ca))
            guards[str(cdef.name)] = component_guards
            if component_guards and self.doc.features is None:
                raise _fail("guarded transition without a features declaration", cdef.name)
        try:
            system = System(tuple(components))
        except ModelError as exc:
            raise _fail(str(exc), sdef.name) from None

        defaults: Dict[str, SyncType] = {}
        rules = []
        for clause in sdef.syncs:
            action = str(clause.action)
            if action not in system.actions:
                raise _fail(f"sync for undeclared action '{action}'", clause.action)
            stype = SyncType(_interval(clause.out), _interval(clause.inp))
            if clause.guard is None:
                if action in defaults:
                    raise _fail(f"action '{action}' has two synchronisation types", clause.action)
                defaults[action] = stype
            else:
                rules.append((clause.guard, action, stype, clause.action))
        for _, action, _, token in rules:
            if action not in defaults:
                raise _fail(f"guarded sync for '{action}' without a default type", token)

        self.doc.systems[name] = system
        self.doc.specs[name] = SyncTypeSpec(defaults)
        if self.doc.features is not None:
            fcas = tuple(
                (n, FeaturedCA.build(ca, guards[n], self.doc.features, self.doc.feature_model))
                for n, ca in components
            )
            fst = FeaturedSTS(defaults, [(g, a, t) for g, a, t, _ in rules])
            self.doc.featured[name] = (FeaturedSystem(fcas), fst)
        logger.debug("parsed system {} with {} components", name, len(components))

    # global models

    def _roles(self, gdef: GlobalDef, roles: List[RoleDef], steps: List[GlobalStepDef]) -> SystemSignature:
        if roles:
            table = {}
            for role in roles:
                if str(role.name) in table:
                    raise _fail(f"role '{role.name}' declared twice", role.name)
                inputs, outputs = set(), set()
                for decl in role.decls:
                    if decl.kind == INTERNAL:
                        raise _fail("internal actions are not allowed in a role", decl.names[0])
                    (inputs if decl.kind == INPUT else outputs).update(str(n) for n in decl.names)
                table[str(role.name)] = (inputs, outputs)
            return SystemSignature.of(table)
        if gdef.base is not None:
            base = str(gdef.base)
            if base not in self.doc.systems:
                raise _fail(f"no system named '{base}'", gdef.base)
            return SystemSignature.of_system(self.doc.systems[base])
        inferred: Dict[str, Tuple[set, set]] = {}
        for step in steps:
            for n in step.label.senders:
                inferred.setdefault(n, (set(), set()))[1].add(step.label.action)
            for n in step.label.receivers:
                inferred.setdefault(n, (set(), set()))[0].add(step.label.action)
        return SystemSignature.of({n: inferred[n] for n in sorted(inferred, key=natural_key)})

    def _global(self, gdef: GlobalDef):
        name = str(gdef.name)
        if name in self.doc.globals:
            raise _fail(f"global model '{name}' declared twice", gdef.name)
        roles = [i for i in gdef.items if isinstance(i, RoleDef)]
        syncs = [i for i in gdef.items if isinstance(i, SyncDef)]
        inits = [i for i in gdef.items if isinstance(i, Init)]
        steps = [i for i in gdef.items if isinstance(i, GlobalStepDef)]
        extra: List[State] = []
        for decl in (i for i in gdef.items if isinstance(i, StatesDecl)):
            for state in decl.states:
                if state.value in extra:
                    raise _fail(f"duplicate state {state.value}", state)
                extra.append(state.value)
        if not inits:
            raise _fail(f"global model {name} has no init", gdef.name)
        if len(inits) > 1:
            raise _fail(f"{name} has two initial states", inits[1].state)

        try:
            sig = self._roles(gdef, roles, steps)
        except ModelError as exc:
            raise _fail(str(exc), gdef.name) from None
        types: Dict[str, SyncType] = {}
        if gdef.base is not None and str(gdef.base) in self.doc.specs:
            types.update(self.doc.specs[str(gdef.base)].restricted(sig.actions))
        local = set()
        for clause in syncs:
            action = str(clause.action)
            if clause.guard is not None:
                raise _fail("global models take no guarded types", clause.action)
            if action not in sig.actions:
                raise _fail(f"sync for undeclared action '{action}'", clause.action)
            if action in local:
                raise _fail(f"action '{action}' has two synchronisation types", clause.action)
            local.add(action)
            types[action] = SyncType(_interval(clause.out), _interval(clause.inp))
        for action in sorted(sig.actions, key=natural_key):
            if action in types:
                continue
            if self.default_type is not None:
                types[action] = self.default_type
            else:
                raise _fail(f"no synchronisation type for '{action}' in {name}", gdef.name)
        spec = SyncTypeSpec(types)

        allowed = interaction_set(sig, spec)
        transitions = []
        for step in steps:
            if step.label not in allowed:
                raise _fail(f"{step.label} is not in the interaction set", step.source)
            transitions.append((step.source.value, step.label, step.target.value))
        try:
            model = GlobalModel.build(sig, spec, inits[0].state.value, transitions, states=extra)
        except TeamataError as exc:
            raise _fail(str(exc), gdef.name) from None
        self.doc.globals[name] = model
        logger.debug(
            "parsed global model {} with {} states, signature {}",
            name, len(model.lts.states), format_set(sig.names),
        )

    def _interface(self, idef: InterfaceDef):
        if self.doc.interface is not None:
            raise _fail("interface declared twice", idef.syncs[0].action if idef.syncs else None)
        types: Dict[str, SyncType] = {}
        for clause in idef.syncs:
            action = str(clause.action)
            if clause.guard is not None:
                raise _fail("interface types take no guards", clause.action)
            if action in types:
                raise _fail(f"action '{action}' has two synchronisation types", clause.action)
            types[action] = SyncType(_interval(clause.out), _interval(clause.inp))
        self.doc.interface = SyncTypeSpec(types)

    def _formula(self, fdef: FormulaDef):
        name = str(fdef.name)
        if name in self.doc.formulas:
            raise _fail(f"formula '{name}' declared twice", fdef.name)
        self.doc.formulas[name] = fdef.formula


def parse(text: str, default_type: Optional[SyncType] = None) -> ModelDocument:
    """
    Parse a model document

    Args:
        text: Document source
        default_type: Type given to global-model actions without a sync clause

    Returns:
        The document

    Raises:
        DslError: First lexical, syntactic or semantic error, with its location
    """
    items, transformer = _transform(text, "document")
    return _Builder(items, transformer.feature_refs, default_type).build()


def parse_formula(text: str) -> Formula:
    """Parse a single dynamic-logic formula"""
    formula, _ = _transform(text.strip().rstrip(";"), "formula")
    return formula


def parse_sync_type(text: str) -> SyncType:
    """Parse a bare type such as ``[1,1] -> [1,*]``"""
    (out, inp), _ = _transform(text.strip(), "sync_type")
    return SyncType(_interval(out), _interval(inp))


def load_file(path: Union[str, Path], default_type: Optional[SyncType] = None) -> ModelDocument:
    """Read and parse a document from disk"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DslError(f"{path}: not UTF-8 text ({exc.reason})") from None
    logger.debug("parsing {}", path)
    return parse(text, default_type)
