"""
Sparse multivariate polynomials with exact rational coefficients,
truncated at a total-degree bound.

Monomials are dense exponent tuples of fixed length ``nvars``. The variable
layout (which slot is t_i and which is s_j) is decided by the caller.
"""
import logging
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import DomainError

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


def monomials_up_to(nvars: int, max_degree: int) -> Iterator[Monomial]:
    """Every monomial in nvars variables with total degree <= max_degree."""
    if nvars == 0:
        yield ()
        return
    for first in range(max_degree + 1):
        for tail in monomials_up_to(nvars - 1, max_degree - first):
            yield (first,) + tail


class SparsePoly:
    """dict monomial -> Fraction; zero coefficients are never stored."""

    __slots__ = ("nvars", "max_degree", "terms")

    def __init__(self, nvars: int, max_degree: int, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.nvars = nvars
        self.max_degree = max_degree
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for monomial, value in terms.items():
                self._accumulate(monomial, Fraction(value))

    @classmethod
    def constant(cls, nvars: int, max_degree: int, value: Scalar = 1) -> "SparsePoly":
        return cls(nvars, max_degree, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, max_degree: int, index: int) -> "SparsePoly":
        monomial = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, max_degree, {monomial: 1})

    def _empty(self) -> "SparsePoly":
        return SparsePoly(self.nvars, self.max_degree)

    def _accumulate(self, monomial: Monomial, value: Fraction) -> bool:
        """Add value at monomial; False if the monomial is past the degree bound."""
        if sum(monomial) > self.max_degree:
            return False
        total = self.terms.get(monomial, 0) + value
        if total:
            self.terms[monomial] = total
        else:
            self.terms.pop(monomial, None)
        return True

    # -- inspection ----------------------------------------------------------

    def coefficient(self, monomial: Monomial) -> Fraction:
        return self.terms.get(tuple(monomial), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def monomials(self) -> List[Monomial]:
        return sorted(self.terms)

    def homogeneous_parts(self) -> Dict[int, "SparsePoly"]:
        parts: Dict[int, SparsePoly] = {}
        for monomial, value in self.terms.items():
            parts.setdefault(sum(monomial), self._empty()).terms[monomial] = value
        return parts

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, SparsePoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.nvars: Fraction(other)} if other else {})
        return NotImplemented

    def __repr__(self) -> str:
        return f"SparsePoly({len(self.terms)} terms, deg<={self.max_degree})"

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            return other
        return SparsePoly.constant(self.nvars, self.max_degree, other)

    def __add__(self, other) -> "SparsePoly":
        other = self._coerce(other)
        result = self.copy()
        for monomial, value in other.terms.items():
            result._accumulate(monomial, value)
        return result

    __radd__ = __add__

    def __iadd__(self, other) -> "SparsePoly":
        for monomial, value in self._coerce(other).terms.items():
            self._accumulate(monomial, value)
        return self

    def __neg__(self) -> "SparsePoly":
        result = self._empty()
        result.terms = {m: -v for m, v in self.terms.items()}
        return result

    def __sub__(self, other) -> "SparsePoly":
        return self + (-self._coerce(other))

    def scale(self, factor: Scalar) -> "SparsePoly":
        result = self._empty()
        if factor:
            result.terms = {m: v * factor for m, v in self.terms.items()}
        return result

    def __mul__(self, other) -> "SparsePoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        result = self._empty()
        budget = self.max_degree
        for m1, v1 in self.terms.items():
            d1 = sum(m1)
            for m2, v2 in other.terms.items():
                if d1 + sum(m2) > budget:
                    continue
                result._accumulate(tuple(a + b for a, b in zip(m1, m2)), v1 * v2)
        return result

    __rmul__ = __mul__

    def copy(self) -> "SparsePoly":
        result = self._empty()
        result.terms = dict(self.terms)
        return result

    def truncate(self, max_degree: int) -> "SparsePoly":
        result = SparsePoly(self.nvars, max_degree)
        result.terms = {m: v for m, v in self.terms.items() if sum(m) <= max_degree}
        return result

    def derivative(self, index: int) -> "SparsePoly":
        result = self._empty()
        for monomial, value in self.terms.items():
            e = monomial[index]
            if e:
                lowered = monomial[:index] + (e - 1,) + monomial[index + 1:]
                result.terms[lowered] = value * e
        return result

    def shift_monomial(self, factor: Monomial, coefficient: Scalar = 1) -> Tuple["SparsePoly", int]:
        """coefficient * x^factor * self, and how many terms fell past the degree bound."""
        result = self._empty()
        dropped = 0
        for monomial, value in self.terms.items():
            raised = tuple(a + b for a, b in zip(monomial, factor))
            if not result._accumulate(raised, value * coefficient):
                dropped += 1
        return result, dropped

    def substitute(self, replacements: Mapping[int, "SparsePoly"]) -> "SparsePoly":
        """Compose: variable i -> replacements[i]; other variables stay."""
        result = self._empty()
        cache: Dict[Tuple[int, int], SparsePoly] = {}

        def power(index: int, e: int) -> SparsePoly:
            if (index, e) not in cache:
                cache[(index, e)] = (
                    SparsePoly.constant(self.nvars, self.max_degree)
                    if e == 0
                    else power(index, e - 1) * replacements[index]
                )
            return cache[(index, e)]

        for monomial, value in self.terms.items():
            kept = tuple(0 if i in replacements else e for i, e in enumerate(monomial))
            term = SparsePoly(self.nvars, self.max_degree, {kept: value})
            for index, e in enumerate(monomial):
                if e and index in replacements:
                    term = term * power(index, e)
            result += term
        return result

    def exp(self) -> "SparsePoly":
        """exp(self) for a polynomial without constant term, by d Z_d = sum_j j G_j Z_{d-j}."""
        zero = (0,) * self.nvars
        if zero in self.terms:
            raise DomainError("exp needs a polynomial with zero constant term")
        parts = self.homogeneous_parts()
        layers: List[SparsePoly] = [SparsePoly.constant(self.nvars, self.max_degree)]
        for d in range(1, self.max_degree + 1):
            layer = self._empty()
            for j in range(1, d + 1):
                if j in parts and not layers[d - j].is_zero():
                    layer = layer + (parts[j] * layers[d - j]).scale(j)
            layers.append(layer.scale(Fraction(1, d)))
        result = self._empty()
        for layer in layers:
            result.terms.update(layer.terms)
        logger.debug(f"exp of {len(self.terms)} terms gave {len(result.terms)} terms")
        return result

