"""
Exact rational arithmetic helpers and integer combinatorics.

Every scalar in the package is a ``fractions.Fraction``; this module adds the
double factorial with the (-1)!! = 0!! = 1 convention, range-safe binomials,
memoized Bernoulli numbers and the canonical "p/q" text form.
"""
import logging
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import List

from .errors import DomainError, UsageError

logger = logging.getLogger(__name__)

Rational = Fraction


@lru_cache(maxsize=None)
def double_factorial(k: int) -> int:
    """k (k-2) (k-4) ... down to 1 or 2, with (-1)!! = 0!! = 1."""
    if k < -1:
        raise DomainError(f"double factorial undefined for {k}")
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def binomial(n: int, k: int) -> int:
    """Binomial coefficient, 0 outside 0 <= k <= n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


class _BernoulliTable:
    """Even-index Bernoulli numbers, extended on demand."""

    def __init__(self):
        self._even: List[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()

    def get(self, m: int) -> Fraction:
        if m < 0 or m % 2:
            raise DomainError(f"Bernoulli numbers are served for even m >= 0, got {m}")
        half = m // 2
        with self._lock:
            while len(self._even) <= half:
                self._extend()
            return self._even[half]

    def _extend(self):
        # sum_{j=0}^{n} C(n+1, j) B_j = 0 with B_1 = -1/2 and B_odd = 0 beyond 1
        n = 2 * len(self._even)
        acc = Fraction(n + 1) * Fraction(-1, 2)
        for j, value in enumerate(self._even):
            acc += math.comb(n + 1, 2 * j) * value
        self._even.append(-acc / (n + 1))


_bernoulli = _BernoulliTable()


def bernoulli(m: int) -> Fraction:
    """The Bernoulli number B_m for even m >= 0."""
    return _bernoulli.get(m)


def format_rational(value: Fraction) -> str:
    """Canonical text: "p/q", or "p" when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of format_rational; rejects anything that is not p or p/q."""
    cleaned = text.strip()
    numerator, _, denominator = cleaned.partition("/")
    try:
        if not denominator:
            return Fraction(int(numerator))
        q = int(denominator)
        if q <= 0:
            raise ValueError(cleaned)
        return Fraction(int(numerator), q)
    except ValueError as e:
        raise UsageError(f"not a rational number: {text!r}") from e
