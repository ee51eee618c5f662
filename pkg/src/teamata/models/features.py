"""
Feature expressions: boolean formulas over feature names
"""
from dataclasses import dataclass
from typing import AbstractSet, FrozenSet, Tuple, Union


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "FeatureExpr"

    def __str__(self) -> str:
        return f"!{_wrap(self.arg, 3)}"


@dataclass(frozen=True)
class And:
    args: Tuple["FeatureExpr", ...]

    def __str__(self) -> str:
        return " && ".join(_wrap(a, 2) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: Tuple["FeatureExpr", ...]

    def __str__(self) -> str:
        return " || ".join(_wrap(a, 1) for a in self.args)


FeatureExpr = Union[Const, Var, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)

_PRECEDENCE = {Or: 1, And: 2, Not: 3, Var: 4, Const: 4}


def _wrap(expr: FeatureExpr, level: int) -> str:
    text = str(expr)
    return f"({text})" if _PRECEDENCE[type(expr)] < level else text


def conj(*args: FeatureExpr) -> FeatureExpr:
    """Conjunction, dropping true and collapsing on false"""
    flat = []
    for arg in args:
        if arg == FALSE:
            return FALSE
        if arg == TRUE:
            continue
        parts = arg.args if isinstance(arg, And) else (arg,)
        flat.extend(p for p in parts if p not in flat)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*args: FeatureExpr) -> FeatureExpr:
    """Disjunction, dropping false and collapsing on true"""
    flat = []
    for arg in args:
        if arg == TRUE:
            return TRUE
        if arg == FALSE:
            continue
        parts = arg.args if isinstance(arg, Or) else (arg,)
        flat.extend(p for p in parts if p not in flat)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def neg(arg: FeatureExpr) -> FeatureExpr:
    if isinstance(arg, Const):
        return Const(not arg.value)
    if isinstance(arg, Not):
        return arg.arg
    return Not(arg)


def implies(left: FeatureExpr, right: FeatureExpr) -> FeatureExpr:
    return disj(neg(left), right)


def xor(left: FeatureExpr, right: FeatureExpr) -> FeatureExpr:
    return disj(conj(left, neg(right)), conj(neg(left), right))


def evaluate(expr: FeatureExpr, product: AbstractSet[str]) -> bool:
    """p ⊨ expr, reading a product as the set of selected features"""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return expr.name in product
    if isinstance(expr, Not):
        return not evaluate(expr.arg, product)
    if isinstance(expr, And):
        return all(evaluate(a, product) for a in expr.args)
    if isinstance(expr, Or):
        return any(evaluate(a, product) for a in expr.args)
    raise TypeError(f"not a feature expression: {expr!r}")


def variables(expr: FeatureExpr) -> FrozenSet[str]:
    """Feature names occurring in expr"""
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, Not):
        return variables(expr.arg)
    if isinstance(expr, (And, Or)):
        return frozenset().union(*(variables(a) for a in expr.args))
    return frozenset()
