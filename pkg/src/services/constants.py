"""
Tautological constants: beta_b of the kappa_1 recursion, alpha_L of the
higher-kappa recursion, the power-series inversion engines behind both, and
the positivity scan for inverses of the three conjecture series.
"""
import logging
import math
import threading
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Sequence, Union

from ..models.schemas import PositivityReport, SeriesId, TableEntry
from ..utils.errors import DomainError
from ..utils.exact import bernoulli, double_factorial, format_rational
from ..utils.multiindex import EMPTY, MultiIndex, mi_factorial, multi_indices_up_to, splits

logger = logging.getLogger(__name__)

Family = Union[Mapping[MultiIndex, Fraction], Callable[[MultiIndex], Fraction]]


def beta_closed(b: int) -> Fraction:
    """(-1)^(b-1) 2^b (2^(2b) - 2) B_2b / (2b)!, with beta_0 = 1."""
    if b < 0:
        raise DomainError(f"beta index must be >= 0, got {b}")
    if b == 0:
        return Fraction(1)
    sign = 1 if b % 2 else -1
    return sign * Fraction(2 ** b * (2 ** (2 * b) - 2)) * bernoulli(2 * b) / math.factorial(2 * b)


def invert_univariate(coeffs: Sequence[Fraction], max_order: int) -> List[Fraction]:
    """Coefficients of 1 / (sum c_k x^k) up to x^max_order."""
    if not coeffs or coeffs[0] != 1:
        raise DomainError("series inversion needs a leading coefficient of 1")
    padded = [Fraction(c) for c in coeffs[: max_order + 1]]
    padded += [Fraction(0)] * (max_order + 1 - len(padded))
    inverse = [Fraction(1)]
    for k in range(1, max_order + 1):
        inverse.append(-sum(padded[i] * inverse[k - i] for i in range(1, k + 1)))
    return inverse


def sine_series(max_order: int) -> List[Fraction]:
    """sin(sqrt(2x)) / sqrt(2x) = sum (-1)^k 2^k x^k / (2k+1)!."""
    return [Fraction((-1) ** k * 2 ** k, math.factorial(2 * k + 1)) for k in range(max_order + 1)]


def beta_series(max_order: int) -> List[Fraction]:
    """(beta_0, ..., beta_max) by inverting the sine series."""
    if max_order < 0:
        raise DomainError(f"series order must be >= 0, got {max_order}")
    return invert_univariate(sine_series(max_order), max_order)


def _family_getter(family: Family) -> Callable[[MultiIndex], Fraction]:
    if isinstance(family, Mapping):
        return lambda m: Fraction(family.get(m, 0))
    return lambda m: Fraction(family(m))


def invert_multiindex(family: Family, max_weight: int) -> Dict[MultiIndex, Fraction]:
    """The family a with sum_{L+L'=b} a_L beta_L' = delta_{b,0} for |b| <= max_weight."""
    beta = _family_getter(family)
    if beta(EMPTY) != 1:
        raise DomainError("multi-index inversion needs beta_0 = 1")
    inverse: Dict[MultiIndex, Fraction] = {}
    for b in multi_indices_up_to(max_weight):
        if not b:
            inverse[b] = Fraction(1)
            continue
        inverse[b] = -sum(
            inverse[low] * beta(high) for low, high in splits(b) if high
        )
    return inverse


def recursion_kernel(m: MultiIndex) -> Fraction:
    """(-1)^||L|| / (L! (2|L|+1)!!)."""
    return Fraction((-1) ** m.size, mi_factorial(m) * double_factorial(2 * m.weight + 1))


def odd_kernel(m: MultiIndex) -> Fraction:
    """(-1)^||L|| / (L! (2|L|-1)!!)."""
    return Fraction((-1) ** m.size, mi_factorial(m) * double_factorial(2 * m.weight - 1))


def plain_kernel(m: MultiIndex) -> Fraction:
    """(-1)^||L|| / (L! |L|!)."""
    return Fraction((-1) ** m.size, mi_factorial(m) * math.factorial(m.weight))


SERIES_KERNELS: Dict[SeriesId, Callable[[MultiIndex], Fraction]] = {
    SeriesId.RECURSION_KERNEL: recursion_kernel,
    SeriesId.ODD_KERNEL: odd_kernel,
    SeriesId.PLAIN_KERNEL: plain_kernel,
}


class AlphaTable:
    """alpha_L for every |L| <= max_weight, grown one weight layer at a time.

    alpha_0 = 1 and, for b != 0,
    alpha_b = b! sum_{L+L'=b, L' != 0} (-1)^(||L'||-1) alpha_L / (L! L'! (2|L'|+1)!!).
    """

    def __init__(self, max_weight: int = 0, values: Mapping[MultiIndex, Fraction] = None):
        self.values: Dict[MultiIndex, Fraction] = {EMPTY: Fraction(1)}
        self.max_weight = 0
        self._lock = threading.Lock()
        if values:
            self._adopt(values)
        self.extend(max_weight)

    def _adopt(self, values: Mapping[MultiIndex, Fraction]):
        """Take over preloaded values for every complete weight layer."""
        complete = 0
        for w in range(1, max(m.weight for m in values) + 1):
            layer = [m for m in multi_indices_up_to(w) if m.weight == w]
            if not all(m in values for m in layer):
                break
            complete = w
        for m, v in values.items():
            if m.weight <= complete:
                self.values[m] = Fraction(v)
        self.max_weight = complete
        logger.info(f"Adopted preloaded alpha table up to weight {complete}")

    def extend(self, max_weight: int) -> "AlphaTable":
        if max_weight <= self.max_weight:
            return self
        with self._lock:
            for b in multi_indices_up_to(max_weight):
                if b.weight <= self.max_weight or b in self.values:
                    continue
                self.values[b] = self._next_value(b)
            self.max_weight = max(self.max_weight, max_weight)
        logger.debug(f"Alpha table extended to weight {max_weight} ({len(self.values)} entries)")
        return self

    def _next_value(self, b: MultiIndex) -> Fraction:
        total = Fraction(0)
        for low, high in splits(b):
            if not high:
                continue
            sign = 1 if high.size % 2 else -1
            total += sign * self.values[low] / (
                mi_factorial(low) * mi_factorial(high) * double_factorial(2 * high.weight + 1)
            )
        return mi_factorial(b) * total

    def __getitem__(self, m: MultiIndex) -> Fraction:
        if m.weight > self.max_weight:
            self.extend(m.weight)
        return self.values[m]

    def __len__(self) -> int:
        return len(self.values)

    def relation_residual(self, b: MultiIndex) -> Fraction:
        """sum_{L+L'=b} (-1)^||L|| alpha_L / (L! L'! (2|L'|+1)!!); zero for b != 0."""
        return sum(
            (
                (-1) ** low.size
                * self[low]
                / (mi_factorial(low) * mi_factorial(high) * double_factorial(2 * high.weight + 1))
                for low, high in splits(b)
            ),
            Fraction(0),
        )

    def sorted_items(self):
        return sorted(self.values.items(), key=lambda item: item[0].sort_key())

    def to_lines(self) -> List[str]:
        """Table dump: multiindex<TAB>p/q sorted by (weight, lexicographic)."""
        return [f"{m}\t{format_rational(v)}" for m, v in self.sorted_items()]


_shared_alpha = AlphaTable()


def alpha_table(max_weight: int) -> AlphaTable:
    """The process-wide alpha table, extended to max_weight."""
    if max_weight < 0:
        raise DomainError(f"max weight must be >= 0, got {max_weight}")
    return _shared_alpha.extend(max_weight)


def install_alpha_table(table: AlphaTable) -> AlphaTable:
    """Make table the process-wide alpha table."""
    global _shared_alpha
    _shared_alpha = table
    return table


def _sign(value: Fraction) -> str:
    if value > 0:
        return "+"
    if value < 0:
        return "-"
    return "0"


def positivity_scan(series_id: SeriesId, max_weight: int) -> PositivityReport:
    """Invert one conjecture series and report the sign of every coefficient."""
    series_id = SeriesId(series_id)
    kernel = SERIES_KERNELS[series_id]
    inverse = invert_multiindex(kernel, max_weight)
    report = PositivityReport(series=series_id, max_weight=max_weight)
    for m, value in sorted(inverse.items(), key=lambda item: item[0].sort_key()):
        report.entries.append(
            TableEntry(multiindex=str(m), weight=m.weight, value=format_rational(value), sign=_sign(value))
        )
    if not report.all_positive:
        logger.warning(f"{series_id.value}: {len(report.non_positive)} non-positive coefficients")
    return report
