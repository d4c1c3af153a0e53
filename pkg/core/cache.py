"""
Cache manager for in-memory memoization.

This module keeps expensive intermediate results (mainly xi-eigensolves of
the two-stage quantum solver) so that sweeps over nu, or repeated checks on
the same grid, do not repeat them.
"""

import logging
import threading
import time
from typing import Any, Callable, Dict, Optional

logger = logging.getLogger(__name__)


def make_key(*parts: Any) -> str:
    """Build a cache key from hashable parts; floats keep their full repr."""
    return ":".join(repr(part) for part in parts)


class CacheManager:
    """Thread-safe TTL cache."""

    def __init__(self, default_ttl: float = 3600):
        """
        Initialize the cache manager.

        Args:
            default_ttl (float): Time to live in seconds for entries stored without one
        """
        self.default_ttl = default_ttl
        self._cache: Dict[str, Any] = {}
        self._expiry_times: Dict[str, float] = {}
        self._lock = threading.RLock()
        self.hits = 0
        self.misses = 0

    def set(self, key: str, value: Any, ttl: Optional[float] = None) -> None:
        """
        Store a value in the cache.

        Args:
            key (str): Cache key
            value (Any): Value to store
            ttl (Optional[float]): Time to live in seconds (default: the manager's default_ttl)
        """
        with self._lock:
            self._cache[key] = value
            self._expiry_times[key] = time.time() + (self.default_ttl if ttl is None else ttl)

    def _expired(self, key: str) -> bool:
        if time.time() > self._expiry_times[key]:
            del self._cache[key]
            del self._expiry_times[key]
            return True
        return False

    def get(self, key: str) -> Optional[Any]:
        """
        Retrieve a value from the cache.

        Args:
            key (str): Cache key

        Returns:
            Optional[Any]: Cached value if found and not expired, None otherwise
        """
        with self._lock:
            if key not in self._cache or self._expired(key):
                return None
            return self._cache[key]

    def exists(self, key: str) -> bool:
        """Check if a key exists in the cache and is not expired."""
        with self._lock:
            return key in self._cache and not self._expired(key)

    def get_or_compute(self, key: str, factory: Callable[[], Any], ttl: Optional[float] = None) -> Any:
        """
        Return the cached value for key, computing and storing it on a miss.

        The factory runs outside the lock, so two threads missing the same key
        may both compute it; the value stored last wins.
        """
        with self._lock:
            if key in self._cache and not self._expired(key):
                self.hits += 1
                logger.debug("cache hit %s", key)
                return self._cache[key]
            self.misses += 1
        value = factory()
        self.set(key, value, ttl)
        return value

    def delete(self, key: str) -> None:
        """Delete a key from the cache."""
        with self._lock:
            self._cache.pop(key, None)
            self._expiry_times.pop(key, None)

    def clear(self) -> None:
        """Clear all items from the cache."""
        with self._lock:
            self._cache.clear()
            self._expiry_times.clear()

    def __len__(self) -> int:
        with self._lock:
            return len(self._cache)
