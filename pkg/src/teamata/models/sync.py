"""
Synchronisation types and synchronisation type specifications
"""
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Tuple

from teamata.core.errors import ModelError
from teamata.utils.helpers import natural_key

UNBOUNDED = None


@dataclass(frozen=True)
class Interval:
    """[low, high] with high = None standing for *"""

    low: int
    high: Optional[int] = UNBOUNDED

    def __post_init__(self):
        if self.low < 0 or (self.high is not None and self.high < 0):
            raise ModelError(f"interval bounds must be non-negative: {self}")
        if self.high is not None and self.low > self.high:
            raise ModelError(f"empty interval {self}")

    def contains(self, count: int) -> bool:
        return self.low <= count and (self.high is None or count <= self.high)

    __contains__ = contains

    def __str__(self) -> str:
        return f"[{self.low},{'*' if self.high is None else self.high}]"


def interval_contains(interval: Interval, count: int) -> bool:
    """x ∈ [min, max], where max = * admits any count above min"""
    return interval.contains(count)


@dataclass(frozen=True)
class SyncType:
    """(O, I): bounds on the number of senders and receivers"""

    out: Interval
    inp: Interval

    def admits(self, senders: int, receivers: int) -> bool:
        return self.out.contains(senders) and self.inp.contains(receivers)

    def __str__(self) -> str:
        return f"{self.out} -> {self.inp}"


def sync_type(out: Tuple[int, Optional[int]], inp: Tuple[int, Optional[int]]) -> SyncType:
    """Shorthand: sync_type((1, 1), (2, None))"""
    return SyncType(Interval(*out), Interval(*inp))


class SyncTypeSpec(Mapping[str, SyncType]):
    """Immutable map from actions to synchronisation types"""

    def __init__(self, types: Optional[Mapping[str, SyncType]] = None):
        self._types: Dict[str, SyncType] = dict(types or {})

    def __getitem__(self, action: str) -> SyncType:
        return self._types[action]

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._types, key=natural_key))

    def __len__(self) -> int:
        return len(self._types)

    def __hash__(self) -> int:
        return hash(frozenset(self._types.items()))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SyncTypeSpec):
            return self._types == other._types
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{a}: {self._types[a]}" for a in self)
        return f"SyncTypeSpec({{{body}}})"

    def merged(self, other: Mapping[str, SyncType]) -> "SyncTypeSpec":
        """Union of two specs; entries of other win"""
        return SyncTypeSpec({**self._types, **dict(other)})

    def restricted(self, actions) -> "SyncTypeSpec":
        return SyncTypeSpec({a: t for a, t in self._types.items() if a in actions})
