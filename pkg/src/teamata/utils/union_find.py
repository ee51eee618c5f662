"""
Union-find over hashable elements
"""
from typing import Dict, FrozenSet, Hashable, Iterable, List

from teamata.utils.helpers import canonical_key


class UnionFind:
    """Disjoint sets with union by rank and path compression"""

    def __init__(self, elements: Iterable[Hashable] = ()):
        """
        Initialize the sets

        Args:
            elements: Initial singletons
        """
        self._leader: Dict[Hashable, Hashable] = {}
        self._rank: Dict[Hashable, int] = {}
        self.n_clusters = 0
        for element in elements:
            self.add(element)

    def __repr__(self) -> str:
        return f"UnionFind: contains {self.n_clusters} clusters."

    def __contains__(self, element: Hashable) -> bool:
        return element in self._leader

    def add(self, element: Hashable):
        if element not in self._leader:
            self._leader[element] = element
            self._rank[element] = 0
            self.n_clusters += 1

    def find(self, element: Hashable) -> Hashable:
        """Leader of the set containing element"""
        root = element
        while self._leader[root] != root:
            root = self._leader[root]
        while self._leader[element] != root:
            self._leader[element], element = root, self._leader[element]
        return root

    def union(self, a: Hashable, b: Hashable) -> bool:
        """
        Merge the sets of a and b

        Args:
            a: Element of the first set
            b: Element of the second set

        Returns:
            False when a and b were already in one set
        """
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if self._rank[a] < self._rank[b]:
            a, b = b, a
        self._leader[b] = a
        if self._rank[a] == self._rank[b]:
            self._rank[a] += 1
        self.n_clusters -= 1
        return True

    def same(self, a: Hashable, b: Hashable) -> bool:
        return self.find(a) == self.find(b)

    def groups(self) -> List[FrozenSet[Hashable]]:
        """The sets, in canonical order"""
        buckets: Dict[Hashable, set] = {}
        for element in self._leader:
            buckets.setdefault(self.find(element), set()).add(element)
        return sorted((frozenset(b) for b in buckets.values()), key=canonical_key)
