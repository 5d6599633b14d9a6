"""
Multi-indices: finitely supported exponent sequences b = (b(1), b(2), ...)
encoding kappa monomials prod kappa_i^{b(i)}.

Enumerations are deterministic. Pairs, triples and tuples of multi-indices
come out sorted lexicographically on the first component's ``entries``.
"""
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import UsageError

Entries = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class MultiIndex:
    """Canonical multi-index: sorted (index, exponent) pairs, no zero exponents."""

    entries: Entries = ()
    weight: int = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        for i, m in self.entries:
            if i < 1 or m < 1:
                raise ValueError(f"non-canonical multi-index entry {(i, m)}")
        indices = [i for i, _ in self.entries]
        if indices != sorted(set(indices)):
            raise ValueError(f"multi-index entries must be strictly increasing: {self.entries}")
        object.__setattr__(self, "weight", sum(i * m for i, m in self.entries))
        object.__setattr__(self, "size", sum(m for _, m in self.entries))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "MultiIndex":
        return cls(tuple(sorted((i, m) for i, m in mapping.items() if m)))

    @classmethod
    def unit(cls, index: int, exponent: int = 1) -> "MultiIndex":
        return cls(((index, exponent),) if exponent else ())

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        """Read the "i1:e1,i2:e2" form; "-" or "" is the empty index."""
        cleaned = text.strip()
        if cleaned in ("", "-"):
            return EMPTY
        mapping: Dict[int, int] = {}
        try:
            for chunk in cleaned.split(","):
                index, exponent = chunk.split(":")
                i, m = int(index), int(exponent)
                if i < 1 or m < 0:
                    raise ValueError(chunk)
                mapping[i] = mapping.get(i, 0) + m
        except ValueError as e:
            raise UsageError(f"not a multi-index: {text!r} (expected e.g. 1:3,2:1 or -)") from e
        return cls.from_mapping(mapping)

    def __str__(self) -> str:
        if not self.entries:
            return "-"
        return ",".join(f"{i}:{m}" for i, m in self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __getitem__(self, index: int) -> int:
        for i, m in self.entries:
            if i == index:
                return m
        return 0

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        merged = self.as_dict()
        for i, m in other.entries:
            merged[i] = merged.get(i, 0) + m
        return MultiIndex.from_mapping(merged)

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        merged = self.as_dict()
        for i, m in other.entries:
            remaining = merged.get(i, 0) - m
            if remaining < 0:
                raise ValueError(f"{other} is not below {self}")
            merged[i] = remaining
        return MultiIndex.from_mapping(merged)

    def dominates(self, other: "MultiIndex") -> bool:
        """Componentwise other <= self."""
        return all(self[i] >= m for i, m in other.entries)

    @property
    def max_index(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    def is_kappa1_only(self) -> bool:
        return all(i == 1 for i, _ in self.entries)

    def sort_key(self) -> Tuple[int, Entries]:
        """(weight, lexicographic) ordering used by every table dump."""
        return (self.weight, self.entries)


EMPTY = MultiIndex()


def weight(m: MultiIndex) -> int:
    """|m| = sum i m(i)."""
    return m.weight


def size(m: MultiIndex) -> int:
    """||m|| = sum m(i)."""
    return m.size


def mi_factorial(m: MultiIndex) -> int:
    """m! = prod m(i)!."""
    result = 1
    for _, e in m.entries:
        result *= math.factorial(e)
    return result


def mi_binomial(m: MultiIndex, t: MultiIndex) -> int:
    """prod C(m(i), t(i)); 0 unless t <= m."""
    if not m.dominates(t):
        return 0
    result = 1
    for i, e in t.entries:
        result *= math.comb(m[i], e)
    return result


def multinomial(b: MultiIndex, parts: Sequence[MultiIndex]) -> int:
    """b! / prod part! for parts summing to b."""
    denominator = 1
    for part in parts:
        denominator *= mi_factorial(part)
    return mi_factorial(b) // denominator


def _sub_indices(b: MultiIndex) -> List[MultiIndex]:
    indices = [i for i, _ in b.entries]
    ranges = [range(m + 1) for _, m in b.entries]
    subs = [
        MultiIndex(tuple((i, e) for i, e in zip(indices, exps) if e))
        for exps in itertools.product(*ranges)
    ]
    subs.sort(key=lambda m: m.entries)
    return subs


@lru_cache(maxsize=None)
def splits(b: MultiIndex) -> Tuple[Tuple[MultiIndex, MultiIndex], ...]:
    """All (L, L') with L + L' = b."""
    return tuple((low, b - low) for low in _sub_indices(b))


@lru_cache(maxsize=None)
def ordered_decompositions(b: MultiIndex, k: int) -> Tuple[Tuple[MultiIndex, ...], ...]:
    """All ordered k-tuples of nonzero multi-indices summing to b."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > b.size:
        return ()
    if k == 1:
        return ((b,),)
    result = []
    for first, rest in splits(b):
        if not first or rest.size < k - 1:
            continue
        for tail in ordered_decompositions(rest, k - 1):
            result.append((first,) + tail)
    return tuple(result)


@lru_cache(maxsize=None)
def three_way_splits(b: MultiIndex) -> Tuple[Tuple[MultiIndex, MultiIndex, MultiIndex], ...]:
    """All (L, e, f) with L + e + f = b."""
    return tuple((low, e, f) for low, rest in splits(b) for e, f in splits(rest))


@lru_cache(maxsize=None)
def multi_indices_of_weight(w: int, max_index: Optional[int] = None) -> Tuple[MultiIndex, ...]:
    """Every multi-index of weight exactly w (optionally with indices <= max_index)."""
    top = w if max_index is None else min(w, max_index)

    def build(remaining: int, largest: int) -> Iterator[Dict[int, int]]:
        if remaining == 0:
            yield {}
            return
        for part in range(min(remaining, largest), 0, -1):
            for count in range(remaining // part, 0, -1):
                for tail in build(remaining - part * count, part - 1):
                    yield {part: count, **tail}

    found = [MultiIndex.from_mapping(m) for m in build(w, top)]
    found.sort(key=lambda m: m.entries)
    return tuple(found)


def multi_indices_up_to(max_weight: int, max_index: Optional[int] = None) -> List[MultiIndex]:
    """All multi-indices with weight <= max_weight, sorted by (weight, lexicographic)."""
    result: List[MultiIndex] = []
    for w in range(max_weight + 1):
        result.extend(multi_indices_of_weight(w, max_index))
    return result
