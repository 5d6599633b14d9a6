"""
Generating functions and Virasoro operators in the variables t_0..t_T, s_1..s_S.

    G(s, t) = sum <kappa(m) prod tau_i^n_i>_g s^m / m! prod t_i^n_i / n_i!
    F(t)    = G(0, t)

V_k (k >= -1) acts by

    -1/2 sum_L (2(|L|+k)+3)!! (-1)^||L|| / (L! (2|L|+1)!!) s^L d/dt_{|L|+k+1}
    + 1/2 sum_j (2(j+k)+1)!! / (2j-1)!! t_j d/dt_{j+k}
    + 1/4 sum_{d1+d2=k-1} (2d1+1)!! (2d2+1)!! d^2/dt_d1 dt_d2
    + delta_{k,-1} t_0^2 / 4 + delta_{k,0} / 16
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..models.schemas import Engine, VerifyBounds
from ..utils.errors import DomainError
from ..utils.exact import double_factorial
from ..utils.multiindex import EMPTY, MultiIndex, mi_factorial, multi_indices_of_weight, multi_indices_up_to
from ..utils.sparse_poly import Monomial, SparsePoly, monomials_up_to
from .correlator import CorrelatorKey, CorrelatorService, correlator_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariableLayout:
    """Slot i holds t_i for i <= T; slot T + j holds s_j."""

    bounds: VerifyBounds

    @property
    def nvars(self) -> int:
        return self.bounds.nvars

    @property
    def max_t(self) -> int:
        return self.bounds.max_t

    @property
    def max_s(self) -> int:
        return self.bounds.max_s

    def t(self, i: int) -> int:
        return i

    def s(self, j: int) -> int:
        return self.bounds.max_t + j

    def zero(self) -> SparsePoly:
        return SparsePoly(self.nvars, self.bounds.max_degree)

    def monomial(self, kappa: MultiIndex = EMPTY, t_counts: Optional[Dict[int, int]] = None) -> Monomial:
        exponents = [0] * self.nvars
        for i, m in kappa.entries:
            exponents[self.s(i)] = m
        for i, n in (t_counts or {}).items():
            exponents[self.t(i)] = n
        return tuple(exponents)

    def s_part(self, monomial: Monomial) -> MultiIndex:
        return MultiIndex.from_mapping({j: monomial[self.s(j)] for j in range(1, self.max_s + 1)})

    def t_part(self, monomial: Monomial) -> Tuple[int, ...]:
        return monomial[: self.max_t + 1]

    def join(self, t_monomial: Tuple[int, ...], kappa: MultiIndex) -> Monomial:
        s_exponents = [0] * self.max_s
        for i, m in kappa.entries:
            s_exponents[i - 1] = m
        return tuple(t_monomial) + tuple(s_exponents)

    def weight(self, monomial: Monomial) -> int:
        """|m| + sum (i - 1) n_i; equals 3g - 3 for a genus-g term of G."""
        top = self.max_t
        t_weight = sum((i - 1) * monomial[i] for i in range(top + 1))
        return t_weight + sum(j * monomial[top + j] for j in range(1, self.max_s + 1))

    def genus(self, monomial: Monomial) -> Optional[int]:
        shifted = self.weight(monomial) + 3
        if shifted % 3:
            return None
        return shifted // 3


class VirasoroOperator:
    """V_k restricted to the variables of a layout; out-of-bounds terms are counted, not kept."""

    def __init__(self, k: int, layout: VariableLayout):
        if k < -1:
            raise DomainError(f"Virasoro operators are indexed by k >= -1, got {k}")
        self.k = k
        self.layout = layout

    def first_group(self) -> List[Tuple[MultiIndex, int, Fraction]]:
        """(L, a, coefficient) with a = |L| + k + 1 <= T."""
        k = self.k
        terms = []
        for L in multi_indices_up_to(self.layout.max_t - k - 1):
            a = L.weight + k + 1
            sign = -1 if L.size % 2 else 1
            coefficient = Fraction(
                -sign * double_factorial(2 * (L.weight + k) + 3),
                2 * mi_factorial(L) * double_factorial(2 * L.weight + 1),
            )
            terms.append((L, a, coefficient))
        return terms

    def second_group(self) -> List[Tuple[int, Fraction]]:
        """(j, coefficient) for t_j d/dt_{j+k}, with 0 <= j + k <= T."""
        k = self.k
        return [
            (j, Fraction(double_factorial(2 * (j + k) + 1), 2 * double_factorial(2 * j - 1)))
            for j in range(max(0, -k), self.layout.max_t - k + 1)
        ]

    def third_group(self) -> List[Tuple[int, int, Fraction]]:
        return [
            (d1, self.k - 1 - d1, Fraction(double_factorial(2 * d1 + 1) * double_factorial(2 * (self.k - 1 - d1) + 1), 4))
            for d1 in range(self.k)
        ]

    def differential_part(self, poly: SparsePoly) -> Tuple[SparsePoly, int]:
        """The derivative terms of V_k applied to poly, with the count of discarded terms."""
        layout = self.layout
        result = SparsePoly(poly.nvars, poly.max_degree)
        discarded = 0

        for L, a, coefficient in self.first_group():
            derivative = poly.derivative(layout.t(a))
            if derivative.is_zero():
                continue
            if L.max_index > layout.max_s:
                discarded += len(derivative)
                continue
            shifted, dropped = derivative.shift_monomial(layout.monomial(L), coefficient)
            result += shifted
            discarded += dropped

        for j, coefficient in self.second_group():
            derivative = poly.derivative(layout.t(j + self.k))
            if derivative.is_zero():
                continue
            if j > layout.max_t:
                discarded += len(derivative)
                continue
            shifted, dropped = derivative.shift_monomial(layout.monomial(t_counts={j: 1}), coefficient)
            result += shifted
            discarded += dropped

        for d1, d2, coefficient in self.third_group():
            if max(d1, d2) > layout.max_t:
                continue
            result += poly.derivative(layout.t(d1)).derivative(layout.t(d2)).scale(coefficient)

        return result, discarded

    def multiplier(self) -> SparsePoly:
        """The multiplication part: t_0^2/4 for k = -1, 1/16 for k = 0, else 0."""
        layout = self.layout
        if self.k == -1:
            return SparsePoly(layout.nvars, layout.bounds.max_degree, {layout.monomial(t_counts={0: 2}): Fraction(1, 4)})
        if self.k == 0:
            return SparsePoly.constant(layout.nvars, layout.bounds.max_degree, Fraction(1, 16))
        return layout.zero()

    def apply(self, poly: SparsePoly) -> Tuple[SparsePoly, int]:
        """V_k(poly) and the number of out-of-bounds monomials dropped on the way."""
        result, discarded = self.differential_part(poly)
        if self.k == -1:
            shifted, dropped = poly.shift_monomial(self.layout.monomial(t_counts={0: 2}), Fraction(1, 4))
            result += shifted
            discarded += dropped
        elif self.k == 0:
            result += poly.scale(Fraction(1, 16))
        return result, discarded


def apply_virasoro(k: int, poly: SparsePoly, layout: VariableLayout) -> SparsePoly:
    """V_k(poly) with out-of-bounds monomials discarded."""
    image, discarded = VirasoroOperator(k, layout).apply(poly)
    if discarded:
        logger.debug(f"V_{k}: discarded {discarded} out-of-bounds monomials")
    return image


def _correlator_coefficient(
    layout: VariableLayout, monomial: Monomial, g_max: int, service: CorrelatorService, engine: Engine
) -> Optional[Fraction]:
    genus = layout.genus(monomial)
    if genus is None or genus < 0 or genus > g_max:
        return None
    t_part = layout.t_part(monomial)
    n = sum(t_part)
    if 2 * genus - 2 + n <= 0:
        return None
    kappa = layout.s_part(monomial)
    taus = tuple(i for i, count in enumerate(t_part) for _ in range(count))
    value = service.evaluate(CorrelatorKey(genus, kappa, taus), engine)
    if not value:
        return None
    denominator = mi_factorial(kappa) * math.prod(math.factorial(c) for c in t_part)
    return value / denominator


def build_generating_function(
    layout: VariableLayout,
    g_max: int,
    with_kappa: bool = True,
    engine: Engine = Engine.KMZ_DVV,
    service: Optional[CorrelatorService] = None,
) -> SparsePoly:
    """G (or F when with_kappa is False) truncated to the layout bounds and g <= g_max."""
    service = service or correlator_service
    poly = layout.zero()
    bounds = layout.bounds
    top = 3 * g_max - 3
    for t_monomial in monomials_up_to(bounds.max_t + 1, bounds.max_degree):
        t_weight = sum((i - 1) * n for i, n in enumerate(t_monomial))
        if t_weight > top:
            continue
        s_budget = bounds.max_degree - sum(t_monomial)
        kappas = multi_indices_up_to(top - t_weight, bounds.max_s) if with_kappa else [EMPTY]
        for kappa in kappas:
            if kappa.size > s_budget:
                continue
            monomial = layout.join(t_monomial, kappa)
            coefficient = _correlator_coefficient(layout, monomial, g_max, service, engine)
            if coefficient is not None:
                poly.terms[monomial] = coefficient
    logger.info(f"Built {'G' if with_kappa else 'F'} with {len(poly)} terms ({bounds.render()}, g<={g_max})")
    return poly


def build_G(layout: VariableLayout, g_max: int, engine: Engine = Engine.KMZ_DVV,
            service: Optional[CorrelatorService] = None) -> SparsePoly:
    return build_generating_function(layout, g_max, True, engine, service)


def build_F(layout: VariableLayout, g_max: int, engine: Engine = Engine.KMZ_DVV,
            service: Optional[CorrelatorService] = None) -> SparsePoly:
    return build_generating_function(layout, g_max, False, engine, service)


def shift_polynomial(k: int, layout: VariableLayout) -> SparsePoly:
    """p_k(s) = sum_{|L|=k-1} (-1)^(||L||-1) / L! s^L, restricted to s_1..s_S."""
    if k < 1:
        raise DomainError(f"shift polynomials start at k = 1, got {k}")
    poly = layout.zero()
    for L in multi_indices_of_weight(k - 1, layout.max_s):
        sign = 1 if L.size % 2 else -1
        poly.terms[layout.monomial(L)] = Fraction(sign, mi_factorial(L))
    return poly


def shifted_F(F: SparsePoly, layout: VariableLayout) -> SparsePoly:
    """F(t_0, t_1, t_2 + p_2, ..., t_T + p_T), truncated."""
    replacements = {
        layout.t(k): SparsePoly.variable(layout.nvars, layout.bounds.max_degree, layout.t(k)) + shift_polynomial(k, layout)
        for k in range(2, layout.max_t + 1)
    }
    return F.substitute(replacements)
