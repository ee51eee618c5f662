"""
Cache management system
"""
import threading
from collections import OrderedDict
from typing import Any, Callable, Hashable, Optional


class ClosureCache:
    """Thread-safe in-memory memo for search closures, bounded in size"""

    def __init__(self, enabled: bool = True, max_entries: int = 1024):
        """
        Initialize cache

        Args:
            enabled: When False every lookup misses and nothing is stored
            max_entries: Least recently used entries are evicted beyond this
        """
        if max_entries < 1:
            raise ValueError("max_entries must be positive")
        self.cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self.enabled = enabled
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0
        self.evictions = 0
        self._lock = threading.Lock()

    def get(self, key: Hashable) -> Optional[Any]:
        """Get value from cache"""
        with self._lock:
            if self.enabled and key in self.cache:
                self.hits += 1
                self.cache.move_to_end(key)
                return self.cache[key]
            self.misses += 1
            return None

    def set(self, key: Hashable, value: Any):
        """Set value in cache"""
        if not self.enabled:
            return
        with self._lock:
            # first writer wins so concurrent readers see one value
            if key in self.cache:
                self.cache.move_to_end(key)
                return
            self.cache[key] = value
            while len(self.cache) > self.max_entries:
                self.cache.popitem(last=False)
                self.evictions += 1

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        """Return the cached value, computing and storing it on a miss"""
        value = self.get(key)
        if value is None:
            value = compute()
            self.set(key, value)
            with self._lock:
                value = self.cache.get(key, value)
        return value

    def clear(self):
        """Clear all cache"""
        with self._lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0
            self.evictions = 0

    def __len__(self) -> int:
        return len(self.cache)
