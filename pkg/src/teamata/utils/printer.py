"""
Pretty printer for model documents

The output parses back to an equal document.
"""
import re
from typing import Dict, Iterable, List, Optional

from teamata.models.automata import ComponentAutomaton
from teamata.models.features import TRUE
from teamata.models.lts import State
from teamata.models.sync import SyncTypeSpec
from teamata.models.system import System
from teamata.services.featured import FeaturedCA, FeaturedSTS, FeaturedSystem
from teamata.services.realise import GlobalModel
from teamata.utils.dsl import ModelDocument
from teamata.utils.helpers import natural_key, sorted_canonical

INDENT = "  "
_IDENT = re.compile(r'[A-Za-z_][A-Za-z0-9_]*$')
_KEYWORDS = {"true", "false", "some", "xor"}


def _printable(state: State) -> bool:
    if isinstance(state, bool):
        return False
    if isinstance(state, int):
        return state >= 0
    return isinstance(state, str) and bool(_IDENT.match(state)) and state not in _KEYWORDS


def state_names(states: Iterable[State]) -> Dict[State, str]:
    """
    Source names for states

    Integer and identifier states keep their spelling; any other state set
    (quotient blocks, system tuples) is numbered in canonical order.
    """
    ordered = sorted_canonical(states)
    if all(_printable(s) for s in ordered):
        return {s: str(s) for s in ordered}
    return {s: str(i) for i, s in enumerate(ordered)}


def _names(values: Iterable[str]) -> str:
    return ", ".join(sorted(values, key=natural_key))


def _sync_lines(spec: SyncTypeSpec, fst: Optional[FeaturedSTS] = None) -> List[str]:
    lines = [f"sync {action} = {spec[action]};" for action in spec]
    if fst is not None:
        lines.extend(f"sync {action} when {guard} = {stype};" for guard, action, stype in fst.rules)
    return lines


def print_component(name: str, ca: ComponentAutomaton, fca: Optional[FeaturedCA] = None) -> List[str]:
    names = state_names(ca.states)
    lines = [f"component {name} {{"]
    for keyword, actions in (("input", ca.inputs), ("output", ca.outputs), ("internal", ca.internals)):
        if actions:
            lines.append(f"{INDENT}{keyword} {_names(actions)};")
    lines.append(f"{INDENT}init {names[ca.initial]};")
    used = {ca.initial} | {s for t in ca.transitions for s in (t[0], t[2])}
    isolated = [s for s in sorted_canonical(ca.states) if s not in used]
    if isolated:
        lines.append(f"{INDENT}states {', '.join(names[s] for s in isolated)};")
    guards = dict(fca.guards) if fca is not None else {}
    marks = {a: "?" for a in ca.inputs}
    marks.update({a: "!" for a in ca.outputs})
    for transition in ca.sorted_transitions():
        source, action, target = transition
        guard = guards.get(transition, TRUE)
        suffix = "" if guard == TRUE else f" [{guard}]"
        lines.append(f"{INDENT}{names[source]} -> {names[target]}: {action}{marks.get(action, '')}{suffix};")
    lines.append("}")
    return lines


def print_system(
    name: str,
    system: System,
    spec: SyncTypeSpec,
    featured: Optional[FeaturedSystem] = None,
    fst: Optional[FeaturedSTS] = None,
) -> str:
    """Source text of one system block"""
    fcas = dict(featured.components) if featured is not None else {}
    lines = [f"system {name} {{"]
    for comp_name, ca in system.components:
        lines.extend(INDENT + line for line in print_component(comp_name, ca, fcas.get(comp_name)))
    lines.extend(INDENT + line for line in _sync_lines(spec, fst))
    lines.append("}")
    return "\n".join(lines)


def print_global(name: str, model: GlobalModel) -> str:
    """Source text of one global block, with explicit roles and types"""
    names = state_names(model.lts.states)
    lines = [f"global {name} {{"]
    sig = model.signature
    for role in sig.names:
        parts = []
        if sig.inputs(role):
            parts.append(f"input {_names(sig.inputs(role))};")
        if sig.outputs(role):
            parts.append(f"output {_names(sig.outputs(role))};")
        lines.append(f"{INDENT}role {role} {{ {' '.join(parts)} }}".replace("{  }", "{ }"))
    lines.extend(INDENT + line for line in _sync_lines(model.spec))
    lines.append(f"{INDENT}init {names[model.lts.initial]};")
    used = {model.lts.initial} | {s for t in model.lts.transitions for s in (t[0], t[2])}
    isolated = [s for s in sorted_canonical(model.lts.states) if s not in used]
    if isolated:
        lines.append(f"{INDENT}states {', '.join(names[s] for s in isolated)};")
    for source, label, target in model.lts.sorted_transitions():
        lines.append(f"{INDENT}{names[source]} -> {names[target]}: {label};")
    lines.append("}")
    return "\n".join(lines)


def print_document(doc: ModelDocument) -> str:
    """Source text of a whole document"""
    blocks = []
    if doc.features is not None:
        model = "" if doc.feature_model == TRUE else f" model {doc.feature_model}"
        blocks.append(f"features {{ {_names(doc.features)} }}{model};")
    for name, system in doc.systems.items():
        featured, fst = doc.featured.get(name, (None, None))
        blocks.append(print_system(name, system, doc.specs[name], featured, fst))
    for name, model in doc.globals.items():
        blocks.append(print_global(name, model))
    if doc.interface is not None:
        body = "".join(f"\n{INDENT}{line}" for line in _sync_lines(doc.interface))
        blocks.append(f"interface {{{body}\n}}")
    for name, formula in doc.formulas.items():
        blocks.append(f"formula {name} = {formula};")
    return "\n\n".join(blocks) + "\n"
