"""
Correlator service: exact evaluation of <kappa(b) tau_d1 ... tau_dn>_g.

Four engines are available:

* ``kmz_dvv``   rewrites kappa monomials as psi insertions and runs DVV
* ``ms_kappa1`` the kappa_1 recursion with beta_b weights
* ``alpha``     the higher-kappa recursion with alpha_L weights
* ``inverted``  the inverted form of the higher-kappa recursion

Every engine pivots on the largest tau exponent and memoizes into its own
``MemoCache``. Brackets that are unstable, out of degree or carry a negative
subscript contribute 0.
"""
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ..database.memo_cache import MemoCache
from ..models.schemas import Engine
from ..utils.errors import (
    CacheCorruptionError,
    DomainError,
    UnstableKeyError,
    UnsupportedEngineError,
    VerificationFailure,
)
from ..utils.exact import double_factorial
from ..utils.multiindex import (
    EMPTY,
    MultiIndex,
    mi_binomial,
    multinomial,
    ordered_decompositions,
    splits,
    three_way_splits,
)
from .constants import alpha_table, beta_closed

logger = logging.getLogger(__name__)

Taus = Tuple[int, ...]
EngineLike = Union[Engine, str]


@dataclass(frozen=True)
class CorrelatorKey:
    """A stable, canonical bracket: taus sorted descending."""

    genus: int
    kappa: MultiIndex = EMPTY
    taus: Taus = ()

    def __post_init__(self):
        taus = tuple(sorted((int(d) for d in self.taus), reverse=True))
        object.__setattr__(self, "taus", taus)
        if self.genus < 0:
            raise DomainError(f"genus must be >= 0, got {self.genus}")
        if taus and taus[-1] < 0:
            raise DomainError(f"tau exponents must be >= 0, got {list(taus)}")
        if 2 * self.genus - 2 + len(taus) <= 0:
            raise UnstableKeyError(
                f"(g={self.genus}, n={len(taus)}) is unstable: 2g - 2 + n must be positive"
            )

    @classmethod
    def of(cls, genus: int, kappa: Union[MultiIndex, str] = EMPTY, taus: Iterable[int] = ()) -> "CorrelatorKey":
        if isinstance(kappa, str):
            kappa = MultiIndex.parse(kappa)
        return cls(genus, kappa, tuple(taus))

    @property
    def n(self) -> int:
        return len(self.taus)

    @property
    def dimension(self) -> int:
        return 3 * self.genus - 3 + self.n

    @property
    def degree(self) -> int:
        return self.kappa.weight + sum(self.taus)

    def __str__(self) -> str:
        taus = ",".join(str(d) for d in self.taus) or "-"
        return f"<k={self.kappa} t={taus}>_{self.genus}"


def dimension_gate(key: CorrelatorKey) -> int:
    """3g - 3 + n; a key whose degree differs from it is 0."""
    return key.dimension


def degree_matches(key: CorrelatorKey) -> bool:
    return key.degree == key.dimension


def _pairs(total: int) -> Iterator[Tuple[int, int]]:
    """(r, s) with r + s = total, r, s >= 0; empty when total < 0."""
    for r in range(total + 1):
        yield r, total - r


def _df_ratio(numerator: int, denominator: int) -> Fraction:
    return Fraction(double_factorial(numerator), double_factorial(denominator))


@lru_cache(maxsize=None)
def sub_multisets(rest: Taus) -> Tuple[Tuple[Taus, Taus, int], ...]:
    """Every split I + J of a multiset, with the number of labelled splits it stands for."""
    counts = Counter(rest)
    values = sorted(counts, reverse=True)
    result = []
    for chosen in itertools.product(*(range(counts[v] + 1) for v in values)):
        left: List[int] = []
        right: List[int] = []
        multiplicity = 1
        for v, c in zip(values, chosen):
            multiplicity *= math.comb(counts[v], c)
            left.extend([v] * c)
            right.extend([v] * (counts[v] - c))
        result.append((tuple(left), tuple(right), multiplicity))
    return tuple(result)


def _genus_for(degree: int, n: int) -> Optional[int]:
    """The genus g with 3g - 3 + n == degree, if there is one."""
    shifted = degree + 3 - n
    if shifted < 0 or shifted % 3:
        return None
    return shifted // 3


def base_value(key: CorrelatorKey) -> Optional[Fraction]:
    """Initial values; only called on keys that pass the dimension gate."""
    if key.genus == 0 and key.n == 3:
        return Fraction(1)
    if key.genus == 1 and key.n == 1:
        # <tau_1>_1 and <kappa_1 tau_0>_1
        return Fraction(1, 24)
    return None


class CorrelatorService:
    """Evaluates correlators with any engine, one memo cache per engine."""

    def __init__(self):
        self.caches: Dict[Engine, MemoCache[CorrelatorKey]] = {
            engine: MemoCache(engine.value) for engine in Engine
        }
        logger.debug("CorrelatorService initialized")

    # -- entry points -----------------------------------------------------

    def evaluate(self, key: CorrelatorKey, engine: EngineLike = Engine.KMZ_DVV) -> Fraction:
        engine = Engine(engine)
        if engine is Engine.MS_KAPPA1 and not key.kappa.is_kappa1_only():
            raise UnsupportedEngineError(f"ms_kappa1 cannot evaluate kappa = {key.kappa}")
        if not degree_matches(key):
            return Fraction(0)

        cache = self.caches[engine]
        cached = cache.get(key)
        if cached is not None:
            return cached

        value = self._compute(key, engine)
        return cache.insert(key, value)

    def correlator(
        self,
        genus: int,
        kappa: Union[MultiIndex, str] = EMPTY,
        taus: Iterable[int] = (),
        engine: EngineLike = Engine.KMZ_DVV,
    ) -> Fraction:
        return self.evaluate(CorrelatorKey.of(genus, kappa, taus), engine)

    def evaluate_engines(self, key: CorrelatorKey, engines: Sequence[Engine]) -> Dict[Engine, Fraction]:
        """Values from several engines; ms_kappa1 is left out where it does not apply."""
        values: Dict[Engine, Fraction] = {}
        for engine in engines:
            if engine is Engine.MS_KAPPA1 and len(engines) > 1 and not key.kappa.is_kappa1_only():
                logger.debug(f"Skipping ms_kappa1 for {key}")
                continue
            values[engine] = self.evaluate(key, engine)
        return values

    def agreed_value(self, key: CorrelatorKey, engines: Sequence[Engine]) -> Fraction:
        """The common value of several engines, or VerificationFailure."""
        values = self.evaluate_engines(key, engines)
        distinct = set(values.values())
        if len(distinct) > 1:
            detail = ", ".join(f"{e.value}={v}" for e, v in values.items())
            logger.error(f"Engines disagree on {key}: {detail}")
            raise VerificationFailure(f"engines disagree on {key}: {detail}")
        return next(iter(distinct))

    def dvv(self, genus: int, taus: Iterable[int]) -> Fraction:
        """Pure-psi correlator by the DVV recursion."""
        return self.evaluate(CorrelatorKey.of(genus, EMPTY, taus), Engine.KMZ_DVV)

    def kmz_reduce(self, key: CorrelatorKey) -> Fraction:
        return self.evaluate(key, Engine.KMZ_DVV)

    def ms_kappa1(self, key: CorrelatorKey) -> Fraction:
        return self.evaluate(key, Engine.MS_KAPPA1)

    def alpha_engine(self, key: CorrelatorKey) -> Fraction:
        return self.evaluate(key, Engine.ALPHA)

    def inverted_engine(self, key: CorrelatorKey) -> Fraction:
        return self.evaluate(key, Engine.INVERTED)

    def pure_kappa(self, genus: int, b: MultiIndex, engine: EngineLike = Engine.ALPHA) -> Fraction:
        """<kappa(b)>_g = 1/(2g-2) sum_{L+L'=b} (-1)^||L|| C(b,L) <tau_{|L|+1} kappa(L')>_g."""
        if genus < 2:
            raise DomainError(f"a bracket without marked points needs genus >= 2, got {genus}")
        engine = Engine(engine)
        if b.weight != 3 * genus - 3:
            return Fraction(0)
        total = Fraction(0)
        for low, high in splits(b):
            sign = -1 if low.size % 2 else 1
            total += sign * mi_binomial(b, low) * self.bracket(engine, genus, high, (low.weight + 1,))
        return total / (2 * genus - 2)

    def string_dilaton_fast_path(
        self, key: CorrelatorKey, engine: EngineLike = Engine.KMZ_DVV
    ) -> Optional[Fraction]:
        """One-step string or dilaton reduction of a pure-psi key; None if neither applies."""
        engine = Engine(engine)
        if key.kappa or 2 * key.genus - 2 + key.n - 1 <= 0:
            return None
        taus = key.taus
        if taus[-1] == 0:
            rest = taus[:-1]
            total = Fraction(0)
            for j, d in enumerate(rest):
                if d > 0:
                    lowered = rest[:j] + (d - 1,) + rest[j + 1:]
                    total += self.bracket(engine, key.genus, EMPTY, lowered)
            return total
        if 1 in taus:
            j = taus.index(1)
            rest = taus[:j] + taus[j + 1:]
            return (2 * key.genus - 2 + key.n - 1) * self.bracket(engine, key.genus, EMPTY, rest)
        return None

    # -- dispatch -------------------------------------------------------------

    def _compute(self, key: CorrelatorKey, engine: Engine) -> Fraction:
        base = base_value(key)
        if base is not None:
            return base
        if key.n == 0:
            if engine is Engine.KMZ_DVV:
                return self._kmz_step(key)
            return self.pure_kappa(key.genus, key.kappa, engine)
        fast = self.string_dilaton_fast_path(key, engine)
        if fast is not None:
            return fast

        logger.debug(f"[{engine.value}] recursing on {key}")
        if not key.kappa:
            return self._dvv_step(key, engine)
        if engine is Engine.KMZ_DVV:
            return self._kmz_step(key)
        if engine is Engine.MS_KAPPA1:
            return self._ms_step(key)
        if engine is Engine.ALPHA:
            return self._alpha_step(key)
        return self._inverted_step(key)

    def bracket(self, engine: EngineLike, genus: int, kappa: MultiIndex, taus: Taus) -> Fraction:
        """A term inside a recursion: 0 unless stable, in degree and free of negative subscripts."""
        if genus < 0 or any(d < 0 for d in taus):
            return Fraction(0)
        n = len(taus)
        if 2 * genus - 2 + n <= 0:
            return Fraction(0)
        if kappa.weight + sum(taus) != 3 * genus - 3 + n:
            return Fraction(0)
        return self.evaluate(CorrelatorKey(genus, kappa, taus), engine)

    def _split_products(
        self, engine: Engine, genus: int, e: MultiIndex, f: MultiIndex, r: int, s: int, rest: Taus
    ) -> Fraction:
        """sum over g' and I + J = rest of <kappa(e) tau_r I>_g' <kappa(f) tau_s J>_{g-g'}."""
        total = Fraction(0)
        for left, right, multiplicity in sub_multisets(rest):
            g_left = _genus_for(e.weight + r + sum(left), len(left) + 1)
            if g_left is None or g_left > genus:
                continue
            first = self.bracket(engine, g_left, e, (r,) + left)
            if not first:
                continue
            second = self.bracket(engine, genus - g_left, f, (s,) + right)
            total += multiplicity * first * second
        return total

    # -- engines -------------------------------------------------------------

    def _dvv_step(self, key: CorrelatorKey, engine: Engine) -> Fraction:
        g, d1, rest = key.genus, key.taus[0], key.taus[1:]
        total = Fraction(0)
        for j, dj in enumerate(rest):
            others = rest[:j] + rest[j + 1:]
            total += _df_ratio(2 * d1 + 2 * dj - 1, 2 * dj - 1) * self.bracket(
                engine, g, EMPTY, (d1 + dj - 1,) + others
            )
        for r, s in _pairs(d1 - 2):
            weight = Fraction(double_factorial(2 * r + 1) * double_factorial(2 * s + 1), 2)
            total += weight * self.bracket(engine, g - 1, EMPTY, (r, s) + rest)
            total += weight * self._split_products(engine, g, EMPTY, EMPTY, r, s, rest)
        return total / double_factorial(2 * d1 + 1)

    def _kmz_step(self, key: CorrelatorKey) -> Fraction:
        b = key.kappa
        total = Fraction(0)
        for k in range(1, b.size + 1):
            sign = -1 if (b.size - k) % 2 else 1
            for parts in ordered_decompositions(b, k):
                extra = tuple(part.weight + 1 for part in parts)
                total += Fraction(sign * multinomial(b, parts), math.factorial(k)) * self.bracket(
                    Engine.KMZ_DVV, key.genus, EMPTY, key.taus + extra
                )
        return total

    def _ms_step(self, key: CorrelatorKey) -> Fraction:
        engine = Engine.MS_KAPPA1
        g, a = key.genus, key.kappa[1]
        d1, rest = key.taus[0], key.taus[1:]
        total = Fraction(0)
        for b in range(a + 1):
            beta = beta_closed(b)
            falling = Fraction(math.factorial(a), math.factorial(a - b)) * beta
            remaining = MultiIndex.unit(1, a - b)
            for j, dj in enumerate(rest):
                others = rest[:j] + rest[j + 1:]
                total += falling * _df_ratio(2 * (b + d1 + dj) - 1, 2 * dj - 1) * self.bracket(
                    engine, g, remaining, (b + d1 + dj - 1,) + others
                )
            for r, s in _pairs(b + d1 - 2):
                weight = Fraction(double_factorial(2 * r + 1) * double_factorial(2 * s + 1), 2) * beta
                total += weight * Fraction(math.factorial(a), math.factorial(a - b)) * self.bracket(
                    engine, g - 1, remaining, (r, s) + rest
                )
                for c in range(a - b + 1):
                    split = Fraction(math.factorial(a), math.factorial(c) * math.factorial(a - b - c))
                    total += weight * split * self._split_products(
                        engine, g, MultiIndex.unit(1, c), MultiIndex.unit(1, a - b - c), r, s, rest
                    )
        return total / double_factorial(2 * d1 + 1)

    def _alpha_step(self, key: CorrelatorKey) -> Fraction:
        engine = Engine.ALPHA
        g, b = key.genus, key.kappa
        d1, rest = key.taus[0], key.taus[1:]
        alpha = alpha_table(b.weight)
        total = Fraction(0)
        for low, high in splits(b):
            coefficient = alpha[low] * mi_binomial(b, low)
            w = low.weight
            for j, dj in enumerate(rest):
                others = rest[:j] + rest[j + 1:]
                total += coefficient * _df_ratio(2 * (w + d1 + dj) - 1, 2 * dj - 1) * self.bracket(
                    engine, g, high, (w + d1 + dj - 1,) + others
                )
            for r, s in _pairs(w + d1 - 2):
                weight = Fraction(double_factorial(2 * r + 1) * double_factorial(2 * s + 1), 2)
                total += coefficient * weight * self.bracket(engine, g - 1, high, (r, s) + rest)
        for low, e, f in three_way_splits(b):
            coefficient = alpha[low] * multinomial(b, (low, e, f))
            for r, s in _pairs(low.weight + d1 - 2):
                weight = Fraction(double_factorial(2 * r + 1) * double_factorial(2 * s + 1), 2)
                total += coefficient * weight * self._split_products(engine, g, e, f, r, s, rest)
        return total / double_factorial(2 * d1 + 1)

    def _inverted_step(self, key: CorrelatorKey) -> Fraction:
        engine = Engine.INVERTED
        g, b = key.genus, key.kappa
        d1, rest = key.taus[0], key.taus[1:]

        rhs = Fraction(0)
        for j, dj in enumerate(rest):
            others = rest[:j] + rest[j + 1:]
            rhs += _df_ratio(2 * (d1 + dj) - 1, 2 * dj - 1) * self.bracket(
                engine, g, b, (d1 + dj - 1,) + others
            )
        for r, s in _pairs(d1 - 2):
            weight = Fraction(double_factorial(2 * r + 1) * double_factorial(2 * s + 1), 2)
            rhs += weight * self.bracket(engine, g - 1, b, (r, s) + rest)
            for e, f in splits(b):
                rhs += weight * mi_binomial(b, e) * self._split_products(engine, g, e, f, r, s, rest)

        lower = Fraction(0)
        for low, high in splits(b):
            if not low:
                continue
            sign = -1 if low.size % 2 else 1
            w = low.weight
            lower += sign * mi_binomial(b, low) * _df_ratio(2 * d1 + 2 * w + 1, 2 * w + 1) * self.bracket(
                engine, g, high, (d1 + w,) + rest
            )
        return (rhs - lower) / double_factorial(2 * d1 + 1)

    # -- bookkeeping ---------------------------------------------------------

    def seed(self, values: Iterable[Tuple[CorrelatorKey, Fraction]], engine: EngineLike = Engine.KMZ_DVV) -> int:
        """Preload one engine cache with persisted values.

        The other engines still compute on their own, so a bad record shows up
        as an engine disagreement instead of a unanimous answer.
        """
        cache = self.caches[Engine(engine)]
        count = 0
        for key, value in values:
            base = base_value(key)
            if base is not None and base != value:
                raise CacheCorruptionError(f"{key} is an initial value {base}, the cache has {value}")
            cache.insert(key, value)
            count += 1
        logger.debug(f"Seeded {count} values into the {cache.name} cache")
        return count

    def known_values(self) -> Dict[CorrelatorKey, Fraction]:
        """Values every engine that holds the key agrees on; disputed keys are left out."""
        merged: Dict[CorrelatorKey, Fraction] = {}
        disputed = set()
        for cache in self.caches.values():
            for key, value in cache.items():
                if merged.setdefault(key, value) != value:
                    disputed.add(key)
        for key in disputed:
            logger.warning(f"Not persisting {key}: engines hold different values")
            del merged[key]
        return merged

    def stats(self) -> List[str]:
        return [cache.stats() for cache in self.caches.values()]


# Default service instance
correlator_service = CorrelatorService()


def evaluate(key: CorrelatorKey, engine: EngineLike = Engine.KMZ_DVV) -> Fraction:
    return correlator_service.evaluate(key, engine)


def correlator(
    genus: int,
    kappa: Union[MultiIndex, str] = EMPTY,
    taus: Iterable[int] = (),
    engine: EngineLike = Engine.KMZ_DVV,
) -> Fraction:
    return correlator_service.correlator(genus, kappa, taus, engine)


def dvv(genus: int, taus: Iterable[int]) -> Fraction:
    return correlator_service.dvv(genus, taus)


def pure_kappa(genus: int, b: MultiIndex, engine: EngineLike = Engine.ALPHA) -> Fraction:
    return correlator_service.pure_kappa(genus, b, engine)
