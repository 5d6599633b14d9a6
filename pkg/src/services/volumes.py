"""
Weil-Petersson volume polynomials and top kappa_1 volumes.

Vol_{g,n}(L) is a polynomial in L_i^2 whose coefficients are rational
multiples of even powers of pi. With D = 3g - 3 + n, the coefficient of
prod L_i^(2 d_i) is

    2^(2 d0 - D) pi^(2 d0) <kappa_1^d0 prod tau_di>_g / (d0! prod d_i!)

where d0 = D - sum d_i. pi is carried symbolically as an exponent.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from ..models.schemas import Engine, VolumeTermRecord
from ..utils.errors import DomainError
from ..utils.exact import format_rational
from ..utils.multiindex import MultiIndex
from .correlator import CorrelatorKey, CorrelatorService, correlator_service

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]


@dataclass(frozen=True)
class VolumeCoefficient:
    """rational * pi^pi_power."""

    rational: Fraction
    pi_power: int

    def render(self) -> str:
        if self.pi_power:
            return f"{format_rational(self.rational)} * pi^{self.pi_power}"
        return format_rational(self.rational)


@dataclass
class VolumePolynomial:
    """Symmetric polynomial stored on sorted (descending) exponent vectors."""

    genus: int
    n: int
    terms: Dict[Exponents, VolumeCoefficient] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return 3 * self.genus - 3 + self.n

    def coefficient(self, exponents: Sequence[int]) -> Optional[VolumeCoefficient]:
        """Coefficient of prod L_i^(2 d_i), in any variable order."""
        if len(exponents) != self.n:
            raise DomainError(f"expected {self.n} exponents, got {len(exponents)}")
        return self.terms.get(tuple(sorted(exponents, reverse=True)))

    def constant_term(self) -> VolumeCoefficient:
        return self.terms[(0,) * self.n]

    def expanded_terms(self) -> List[Tuple[Exponents, VolumeCoefficient]]:
        """Every term with its variables spelled out, sorted by exponent vector."""
        expanded = []
        for exponents, coefficient in self.terms.items():
            for permuted in set(itertools.permutations(exponents)):
                expanded.append((permuted, coefficient))
        expanded.sort(key=lambda item: item[0])
        return expanded

    def render_lines(self) -> List[str]:
        lines = []
        for exponents, coefficient in self.expanded_terms():
            parts = [coefficient.render()]
            parts += [f"L{i + 1}^{2 * d}" for i, d in enumerate(exponents) if d]
            lines.append(" * ".join(parts))
        return lines

    def tsv_lines(self) -> List[str]:
        return [
            f"{','.join(str(d) for d in exponents)}\t{format_rational(c.rational)}\t{c.pi_power}"
            for exponents, c in self.expanded_terms()
        ]

    def records(self) -> List[VolumeTermRecord]:
        return [
            VolumeTermRecord(
                exponents=list(exponents),
                coefficient=format_rational(c.rational),
                pi_power=c.pi_power,
            )
            for exponents, c in self.expanded_terms()
        ]


def _sorted_vectors(n: int, max_total: int, largest: int) -> Iterator[Exponents]:
    """Non-increasing n-tuples of nonnegative integers with sum <= max_total."""
    if n == 0:
        yield ()
        return
    for first in range(min(largest, max_total), -1, -1):
        for tail in _sorted_vectors(n - 1, max_total - first, first):
            yield (first,) + tail


def _check_stable(genus: int, n: int):
    if genus < 0 or n < 0 or 2 * genus - 2 + n <= 0:
        raise DomainError(f"(g={genus}, n={n}) is not a stable pair")


def _scale(d0: int, dimension: int) -> Fraction:
    return Fraction(2) ** (2 * d0 - dimension)


def volume_polynomial(
    genus: int,
    n: int,
    engine: Engine = Engine.KMZ_DVV,
    service: Optional[CorrelatorService] = None,
) -> VolumePolynomial:
    """Vol_{g,n}(L) for n >= 1."""
    _check_stable(genus, n)
    if n < 1:
        raise DomainError("volume polynomials need at least one boundary component")
    service = service or correlator_service
    polynomial = VolumePolynomial(genus=genus, n=n)
    dimension = polynomial.dimension
    for exponents in _sorted_vectors(n, dimension, dimension):
        d0 = dimension - sum(exponents)
        key = CorrelatorKey(genus, MultiIndex.unit(1, d0), exponents)
        value = service.evaluate(key, engine)
        denominator = math.factorial(d0) * math.prod(math.factorial(d) for d in exponents)
        polynomial.terms[exponents] = VolumeCoefficient(
            rational=_scale(d0, dimension) * value / denominator,
            pi_power=2 * d0,
        )
    logger.info(f"Built volume polynomial ({genus},{n}) with {len(polynomial.terms)} symmetric terms")
    return polynomial


def wp_top(
    genus: int,
    n: int = 0,
    engine: Engine = Engine.KMZ_DVV,
    service: Optional[CorrelatorService] = None,
) -> Fraction:
    """<kappa_1^(3g-3+n) tau_0^n>_g."""
    _check_stable(genus, n)
    service = service or correlator_service
    key = CorrelatorKey(genus, MultiIndex.unit(1, 3 * genus - 3 + n), (0,) * n)
    return service.evaluate(key, engine)


def evaluate_volume(polynomial: VolumePolynomial, lengths: Sequence[Fraction]) -> Dict[int, Fraction]:
    """Substitute exact lengths; the result maps each pi power to its rational coefficient."""
    if len(lengths) != polynomial.n:
        raise DomainError(f"expected {polynomial.n} lengths, got {len(lengths)}")
    squares = [Fraction(length) ** 2 for length in lengths]
    graded: Dict[int, Fraction] = {}
    for exponents, coefficient in polynomial.expanded_terms():
        monomial = math.prod((squares[i] ** d for i, d in enumerate(exponents)), start=Fraction(1))
        graded[coefficient.pi_power] = graded.get(coefficient.pi_power, Fraction(0)) + coefficient.rational * monomial
    return {power: value for power, value in sorted(graded.items()) if value}


def extract_correlator(polynomial: VolumePolynomial, exponents: Sequence[int]) -> Fraction:
    """Read <kappa_1^d0 prod tau_di>_g back out of a volume coefficient."""
    coefficient = polynomial.coefficient(exponents)
    if coefficient is None:
        raise DomainError(f"no term with exponents {list(exponents)} in Vol_({polynomial.genus},{polynomial.n})")
    d0 = polynomial.dimension - sum(exponents)
    denominator = math.factorial(d0) * math.prod(math.factorial(d) for d in exponents)
    return coefficient.rational * denominator / _scale(d0, polynomial.dimension)


def constant_term_from_wp(genus: int, n: int, engine: Engine = Engine.KMZ_DVV,
                          service: Optional[CorrelatorService] = None) -> VolumeCoefficient:
    """2^D pi^(2D) wp_top(g, n) / D!, the value of Vol_{g,n} at L = 0."""
    dimension = 3 * genus - 3 + n
    top = wp_top(genus, n, engine, service)
    return VolumeCoefficient(rational=Fraction(2) ** dimension * top / math.factorial(dimension), pi_power=2 * dimension)
