"""
In-memory memo cache for correlator values.
"""
import logging
import threading
from fractions import Fraction
from typing import Dict, Generic, Hashable, Iterator, Optional, Tuple, TypeVar

from ..utils.errors import CacheConsistencyError

logger = logging.getLogger(__name__)

K = TypeVar("K", bound=Hashable)


class MemoCache(Generic[K]):
    """Thread-safe map key -> Fraction with hit/miss counters.

    Inserts are idempotent; inserting a different value for a cached key raises.
    """

    def __init__(self, name: str = "cache"):
        self.name = name
        self._values: Dict[K, Fraction] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: K) -> Optional[Fraction]:
        with self._lock:
            value = self._values.get(key)
            if value is None:
                self.misses += 1
            else:
                self.hits += 1
        return value

    def peek(self, key: K) -> Optional[Fraction]:
        """Lookup without touching the counters."""
        return self._values.get(key)

    def insert(self, key: K, value: Fraction) -> Fraction:
        with self._lock:
            existing = self._values.get(key)
            if existing is None:
                self._values[key] = value
                return value
        if existing != value:
            logger.error(f"[{self.name}] conflicting values for {key}: {existing} vs {value}")
            raise CacheConsistencyError(
                f"{self.name}: refusing to overwrite {key} = {existing} with {value}"
            )
        return existing

    def __contains__(self, key: K) -> bool:
        return key in self._values

    def __len__(self) -> int:
        return len(self._values)

    def items(self) -> Iterator[Tuple[K, Fraction]]:
        with self._lock:
            snapshot = list(self._values.items())
        return iter(snapshot)

    def stats(self) -> str:
        return f"{self.name}: entries={len(self)} hits={self.hits} misses={self.misses}"
