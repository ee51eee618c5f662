"""
Helper Utilities
"""
import re
from typing import Any, Hashable, Iterable, Tuple

_DIGITS = re.compile(r'(\d+)')


def natural_key(text: str) -> Tuple:
    """
    Sort key that orders embedded numbers numerically

    Args:
        text: String to split

    Returns:
        Tuple usable as a sort key ("R2" < "R10")
    """
    return tuple(int(part) if part.isdigit() else part for part in _DIGITS.split(text))


def canonical_key(value: Any) -> Tuple:
    """
    Total sort key over the values used as states and labels

    Ints sort before strings, strings naturally, tuples and sets element-wise.
    Objects exposing ``key()`` (system labels) use it.
    """
    if hasattr(value, 'key') and callable(value.key):
        return (4, value.key())
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, natural_key(value))
    if isinstance(value, tuple):
        return (2, tuple(canonical_key(v) for v in value))
    if isinstance(value, (frozenset, set)):
        return (3, tuple(sorted(canonical_key(v) for v in value)))
    return (5, repr(value))


def sorted_canonical(values: Iterable[Any]) -> list:
    """Sort values by canonical_key"""
    return sorted(values, key=canonical_key)


def format_set(values: Iterable[Hashable]) -> str:
    """Format a set as {a,b} in canonical order"""
    return "{" + ",".join(format_state(v) for v in sorted_canonical(values)) + "}"


def format_state(state: Any) -> str:
    """
    Format a state id

    System states print as (0,1,2); quotient blocks as {0,2}.
    """
    if isinstance(state, tuple):
        return "(" + ",".join(format_state(s) for s in state) + ")"
    if isinstance(state, (frozenset, set)):
        return format_set(state)
    return str(state)


def format_label(label: Any) -> str:
    """Format a label in the out->in:a / n:a notation"""
    return str(label)


def format_path(path: Iterable[Any]) -> str:
    """Format a label sequence"""
    return " ; ".join(format_label(label) for label in path) or "ε"
