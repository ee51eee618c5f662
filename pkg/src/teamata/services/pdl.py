"""
Test-free propositional dynamic logic over interaction labels
"""
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, NamedTuple, Optional, Set, Tuple, Union

import networkx as nx

from teamata.core.errors import UnknownAtomError
from teamata.models.lts import Lts, State
from teamata.utils.helpers import canonical_key, format_label

Label = Hashable


# Programs

@dataclass(frozen=True)
class Eps:
    """Empty word; only appears in derivatives"""

    def __str__(self) -> str:
        return "()"


@dataclass(frozen=True)
class Atom:
    label: Label

    def __str__(self) -> str:
        return format_label(self.label)


@dataclass(frozen=True)
class Some:
    def __str__(self) -> str:
        return "some"


@dataclass(frozen=True)
class Complement:
    excluded: FrozenSet[Label]

    def __post_init__(self):
        object.__setattr__(self, 'excluded', frozenset(self.excluded))

    def __str__(self) -> str:
        body = " + ".join(format_label(lab) for lab in sorted(self.excluded, key=canonical_key))
        return f"-({body})"


@dataclass(frozen=True)
class Seq:
    first: "Program"
    second: "Program"

    def __str__(self) -> str:
        return f"{_wrap(self.first, 2)} ; {_wrap(self.second, 3)}"


@dataclass(frozen=True)
class Choice:
    left: "Program"
    right: "Program"

    def __str__(self) -> str:
        return f"{_wrap(self.left, 1)} + {_wrap(self.right, 2)}"


@dataclass(frozen=True)
class Star:
    body: "Program"

    def __str__(self) -> str:
        return f"{_wrap(self.body, 4)}*"


Program = Union[Eps, Atom, Some, Complement, Seq, Choice, Star]

_LEVEL = {Choice: 1, Seq: 2, Star: 3, Eps: 4, Atom: 4, Some: 4, Complement: 4}


def _wrap(p: Program, level: int) -> str:
    return f"({p})" if _LEVEL[type(p)] < level else str(p)


# Formulas

@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Neg:
    arg: "Formula"

    def __str__(self) -> str:
        return f"!{_fwrap(self.arg, 3)}"


@dataclass(frozen=True)
class Conj:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"{_fwrap(self.left, 2)} && {_fwrap(self.right, 3)}"


@dataclass(frozen=True)
class Disj:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"{_fwrap(self.left, 1)} || {_fwrap(self.right, 2)}"


@dataclass(frozen=True)
class Box:
    program: Program
    body: "Formula"

    def __str__(self) -> str:
        return f"[{self.program}]{_fwrap(self.body, 3)}"


@dataclass(frozen=True)
class Diamond:
    program: Program
    body: "Formula"

    def __str__(self) -> str:
        return f"<{self.program}>{_fwrap(self.body, 3)}"


Formula = Union[Top, Bottom, Neg, Conj, Disj, Box, Diamond]

_FLEVEL = {Disj: 1, Conj: 2, Neg: 3, Box: 3, Diamond: 3, Top: 4, Bottom: 4}


def _fwrap(f: Formula, level: int) -> str:
    return f"({f})" if _FLEVEL[type(f)] < level else str(f)


# Program automata

def seq(first: Program, second: Program) -> Program:
    if isinstance(first, Eps):
        return second
    if isinstance(second, Eps):
        return first
    return Seq(first, second)


def nullable(p: Program) -> bool:
    if isinstance(p, (Eps, Star)):
        return True
    if isinstance(p, Seq):
        return nullable(p.first) and nullable(p.second)
    if isinstance(p, Choice):
        return nullable(p.left) or nullable(p.right)
    return False


def derivatives(p: Program, label: Label, alphabet: FrozenSet[Label]) -> Set[Program]:
    """Partial derivatives of p by one label"""
    if isinstance(p, Eps):
        return set()
    if isinstance(p, Atom):
        return {Eps()} if p.label == label else set()
    if isinstance(p, Some):
        return {Eps()} if label in alphabet else set()
    if isinstance(p, Complement):
        return {Eps()} if label in alphabet and label not in p.excluded else set()
    if isinstance(p, Choice):
        return derivatives(p.left, label, alphabet) | derivatives(p.right, label, alphabet)
    if isinstance(p, Seq):
        result = {seq(d, p.second) for d in derivatives(p.first, label, alphabet)}
        if nullable(p.first):
            result |= derivatives(p.second, label, alphabet)
        return result
    if isinstance(p, Star):
        return {seq(d, p) for d in derivatives(p.body, label, alphabet)}
    raise TypeError(f"not a program: {p!r}")


class ProgramAutomaton(NamedTuple):
    """NFA over labels; states are the program's derivatives"""

    states: Tuple[Program, ...]
    initial: Program
    finals: FrozenSet[Program]
    delta: Dict[Tuple[Program, Label], FrozenSet[Program]]

    def step(self, state: Program, label: Label) -> FrozenSet[Program]:
        return self.delta.get((state, label), frozenset())

    def accepts(self, word: Iterable[Label]) -> bool:
        current = {self.initial}
        for label in word:
            current = set().union(*(self.step(s, label) for s in current))
        return any(s in self.finals for s in current)


def atoms(p: Program) -> Set[Label]:
    if isinstance(p, Atom):
        return {p.label}
    if isinstance(p, Complement):
        return set(p.excluded)
    if isinstance(p, Seq):
        return atoms(p.first) | atoms(p.second)
    if isinstance(p, Choice):
        return atoms(p.left) | atoms(p.right)
    if isinstance(p, Star):
        return atoms(p.body)
    return set()


def compile_program(p: Program, alphabet: Iterable[Label]) -> ProgramAutomaton:
    """
    Crawl the partial derivatives of p into a finite automaton

    Raises:
        UnknownAtomError: An atom is outside the alphabet
    """
    alphabet = frozenset(alphabet)
    unknown = atoms(p) - alphabet
    if unknown:
        raise UnknownAtomError(
            "not in the model's alphabet: " + ", ".join(format_label(a) for a in sorted(unknown, key=canonical_key))
        )
    labels = sorted(alphabet, key=canonical_key)
    order = [p]
    seen = {p}
    delta: Dict[Tuple[Program, Label], FrozenSet[Program]] = {}
    queue = deque([p])
    while queue:
        state = queue.popleft()
        for label in labels:
            targets = frozenset(derivatives(state, label, alphabet))
            if not targets:
                continue
            delta[(state, label)] = targets
            for target in sorted(targets, key=str):
                if target not in seen:
                    seen.add(target)
                    order.append(target)
                    queue.append(target)
    return ProgramAutomaton(tuple(order), p, frozenset(s for s in order if nullable(s)), delta)


# Model checking

_GOAL = ("goal",)


def _product(lts: Lts, automaton: ProgramAutomaton) -> nx.DiGraph:
    graph = nx.DiGraph()
    for source, label, target in lts.transitions:
        for a in automaton.states:
            for a2 in automaton.step(a, label):
                graph.add_edge((source, a), (target, a2))
    return graph


def _diamond(lts: Lts, automaton: ProgramAutomaton, goal: FrozenSet[State]) -> FrozenSet[State]:
    graph = _product(lts, automaton)
    graph.add_node(_GOAL)
    for state in goal:
        for final in automaton.finals:
            graph.add_edge((state, final), _GOAL)
    before = nx.ancestors(graph, _GOAL)
    return frozenset(s for s in lts.states if (s, automaton.initial) in before)


class PdlResult(NamedTuple):
    holds: bool
    satisfying: FrozenSet[State]
    path: Optional[Tuple[Label, ...]] = None


class _Checker:
    def __init__(self, lts: Lts):
        self.lts = lts
        self.alphabet = lts.labels
        self.memo: Dict[Formula, FrozenSet[State]] = {}
        self.automata: Dict[Program, ProgramAutomaton] = {}

    def automaton(self, p: Program) -> ProgramAutomaton:
        if p not in self.automata:
            self.automata[p] = compile_program(p, self.alphabet)
        return self.automata[p]

    def sat(self, f: Formula) -> FrozenSet[State]:
        if f not in self.memo:
            self.memo[f] = self._sat(f)
        return self.memo[f]

    def _sat(self, f: Formula) -> FrozenSet[State]:
        states = self.lts.states
        if isinstance(f, Top):
            return states
        if isinstance(f, Bottom):
            return frozenset()
        if isinstance(f, Neg):
            return states - self.sat(f.arg)
        if isinstance(f, Conj):
            return self.sat(f.left) & self.sat(f.right)
        if isinstance(f, Disj):
            return self.sat(f.left) | self.sat(f.right)
        if isinstance(f, Diamond):
            return _diamond(self.lts, self.automaton(f.program), self.sat(f.body))
        if isinstance(f, Box):
            return states - _diamond(self.lts, self.automaton(f.program), states - self.sat(f.body))
        raise TypeError(f"not a formula: {f!r}")

    def path(self, p: Program, goal: FrozenSet[State]) -> Optional[Tuple[Label, ...]]:
        """Shortest p-path from the initial state into goal, least labels first"""
        automaton = self.automaton(p)
        start = (self.lts.initial, automaton.initial)
        parent: Dict = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            state, a = node
            if state in goal and a in automaton.finals:
                labels: List[Label] = []
                while parent[node] is not None:
                    node, label = parent[node]
                    labels.append(label)
                return tuple(reversed(labels))
            for label, target in self.lts.successors(state):
                for a2 in sorted(automaton.step(a, label), key=automaton.states.index):
                    nxt = (target, a2)
                    if nxt not in parent:
                        parent[nxt] = (node, label)
                        queue.append(nxt)
        return None


def check(lts: Lts, formula: Formula) -> PdlResult:
    """
    Evaluate a formula on every state; the verdict is read at the initial state

    For a top-level Diamond that holds the result carries a witness path, for
    a top-level Box that fails the shortest path to a violating state.

    Raises:
        UnknownAtomError: An atom is outside the LTS's alphabet
    """
    checker = _Checker(lts)
    satisfying = checker.sat(formula)
    holds = lts.initial in satisfying
    path = None
    if isinstance(formula, Diamond) and holds:
        path = checker.path(formula.program, checker.sat(formula.body))
    elif isinstance(formula, Box) and not holds:
        path = checker.path(formula.program, lts.states - checker.sat(formula.body))
    return PdlResult(holds, satisfying, path)
