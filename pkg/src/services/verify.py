"""
Verification checks: Virasoro relations and annihilation, the KdV shift,
Itzykson-Zuber, the mixed psi/kappa identities, cross-engine agreement,
constants and volumes. Every check is an exact rational comparison and
reports checked/skipped counts.
"""
import asyncio
import logging
import math
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..models.schemas import CheckReport, Engine, SkipReason, Suite, VerifyBounds
from ..utils.errors import DomainError
from ..utils.exact import double_factorial, format_rational
from ..utils.multiindex import MultiIndex, mi_binomial, mi_factorial, multi_indices_up_to, splits
from ..utils.sparse_poly import Monomial, SparsePoly, monomials_up_to
from . import constants, volumes
from .correlator import CorrelatorKey, CorrelatorService, correlator_service, sub_multisets
from .virasoro import VariableLayout, VirasoroOperator, build_F, build_G, shifted_F

logger = logging.getLogger(__name__)

# Bounds for checks that expand exp(G) in full.
SMALL_BOUNDS = VerifyBounds(max_t=4, max_s=2, max_degree=5, commutator_degree=3)


def _finish(report: CheckReport) -> CheckReport:
    if report.passed:
        logger.info(report.render())
    else:
        logger.error(f"{report.render()}: {'; '.join(report.failures)}")
    return report


# -- Virasoro ---------------------------------------------------------------

def commutator_check(n: int, m: int, layout: VariableLayout) -> CheckReport:
    """[V_n, V_m] e = (n - m) V_{n+m} e on every basis monomial whose images stay in bounds."""
    if min(n, m) < -1 or (n != m and n + m < -1):
        raise DomainError(f"commutator indices out of range: ({n}, {m})")
    bounds = layout.bounds
    report = CheckReport(name="virasoro-commutator", params=f"n={n},m={m},{bounds.render()}")
    v_n, v_m = VirasoroOperator(n, layout), VirasoroOperator(m, layout)
    v_sum = VirasoroOperator(n + m, layout) if n != m else None

    for monomial in monomials_up_to(layout.nvars, min(bounds.commutator_degree, bounds.max_degree)):
        e = SparsePoly(layout.nvars, bounds.max_degree, {monomial: 1})
        first_m, lost_a = v_m.apply(e)
        first_n, lost_b = v_n.apply(e)
        nm, lost_c = v_n.apply(first_m)
        mn, lost_d = v_m.apply(first_n)
        lost = lost_a + lost_b + lost_c + lost_d
        expected = layout.zero()
        if v_sum is not None:
            image, lost_e = v_sum.apply(e)
            expected = image.scale(n - m)
            lost += lost_e
        if lost:
            report.record_skip(SkipReason.INDEX_OVERFLOW)
            continue
        report.record(nm - mn == expected, f"monomial {monomial}")
    return _finish(report)


def _first_group_reach(layout: VariableLayout, monomial: Monomial, k: int) -> bool:
    """Whether every G term read by the s^L d/dt_a part at this monomial is in bounds."""
    s_weight = layout.s_part(monomial).weight
    return s_weight + k + 1 <= layout.max_t and sum(monomial) + 1 <= layout.bounds.max_degree


def _second_group_reach(layout: VariableLayout, monomial: Monomial, k: int) -> bool:
    start = max(0, -k)
    return all(j + k <= layout.max_t for j in range(start, layout.max_t + 1) if monomial[layout.t(j)])


def _bounded_product(p1: SparsePoly, p2: SparsePoly, layout: VariableLayout, max_degree: int, max_weight: int) -> SparsePoly:
    """p1 * p2 keeping only terms of degree <= max_degree and weight <= max_weight."""
    def buckets(poly: SparsePoly) -> Dict[Tuple[int, int], List[Tuple[Monomial, Fraction]]]:
        grouped: Dict[Tuple[int, int], List[Tuple[Monomial, Fraction]]] = {}
        for monomial, value in poly.terms.items():
            grouped.setdefault((sum(monomial), layout.weight(monomial)), []).append((monomial, value))
        return grouped

    collected: Dict[Monomial, Fraction] = {}
    left, right = buckets(p1), buckets(p2)
    for (d1, w1), terms1 in left.items():
        for (d2, w2), terms2 in right.items():
            if d1 + d2 > max_degree or w1 + w2 > max_weight:
                continue
            for m1, v1 in terms1:
                for m2, v2 in terms2:
                    product = tuple(a + b for a, b in zip(m1, m2))
                    collected[product] = collected.get(product, 0) + v1 * v2
    return SparsePoly(layout.nvars, layout.bounds.max_degree, collected)


def log_annihilator(k: int, G: SparsePoly, layout: VariableLayout, g_max: int) -> SparsePoly:
    """exp(-G) V_k exp(G), assembled from derivatives of G."""
    operator = VirasoroOperator(k, layout)
    linear, _ = operator.differential_part(G)
    result = linear + operator.multiplier()
    max_weight = 3 * g_max - 3 - k
    for d1, d2, coefficient in operator.third_group():
        if max(d1, d2) > layout.max_t:
            continue
        product = _bounded_product(
            G.derivative(layout.t(d1)), G.derivative(layout.t(d2)), layout, layout.bounds.max_degree - 2, max_weight
        )
        result += product.scale(coefficient)
    return result


def _exponential_sources(layout: VariableLayout, monomial: Monomial, k: int) -> Optional[List[Monomial]]:
    """Monomials of Z that V_k reads to produce this monomial; None if one is out of index range."""
    top = layout.max_t
    sources: List[Monomial] = []
    s_part = layout.s_part(monomial)
    for low, _ in splits(s_part):
        a = low.weight + k + 1
        if a > top:
            return None
        source = list(monomial)
        for i, m in low.entries:
            source[layout.s(i)] -= m
        source[layout.t(a)] += 1
        sources.append(tuple(source))
    for j in range(max(0, -k), top + 1):
        if not monomial[layout.t(j)]:
            continue
        if j + k > top:
            return None
        source = list(monomial)
        source[layout.t(j)] -= 1
        source[layout.t(j + k)] += 1
        sources.append(tuple(source))
    for d1 in range(k):
        d2 = k - 1 - d1
        if max(d1, d2) > top:
            return None
        source = list(monomial)
        source[layout.t(d1)] += 1
        source[layout.t(d2)] += 1
        sources.append(tuple(source))
    if k == -1 and monomial[layout.t(0)] >= 2:
        source = list(monomial)
        source[layout.t(0)] -= 2
        sources.append(tuple(source))
    if k == 0:
        sources.append(monomial)
    return sources


def _complete_in_genus(layout: VariableLayout, monomial: Monomial, g_max: int) -> bool:
    """Every factor of this Z monomial is a G term of genus <= g_max."""
    heaviest = layout.weight(monomial) + monomial[layout.t(0)]
    return heaviest + 3 <= 3 * g_max


def annihilation_check(
    k: int,
    g_max: int,
    layout: VariableLayout,
    G: Optional[SparsePoly] = None,
    via_exponential: bool = False,
    engine: Engine = Engine.KMZ_DVV,
    service: Optional[CorrelatorService] = None,
) -> CheckReport:
    """V_k exp(G) = 0 on every monomial whose coefficient only needs genus <= g_max data in bounds."""
    if k < -1:
        raise DomainError(f"Virasoro operators are indexed by k >= -1, got {k}")
    bounds = layout.bounds
    mode = "exp" if via_exponential else "log"
    report = CheckReport(name="virasoro-annihilation", params=f"k={k},g<={g_max},{bounds.render()},{mode}")
    if G is None:
        G = build_G(layout, g_max, engine, service)

    if via_exponential:
        image, _ = VirasoroOperator(k, layout).apply(G.exp())
        for monomial in monomials_up_to(layout.nvars, bounds.max_degree):
            sources = _exponential_sources(layout, monomial, k)
            if sources is None or any(sum(s) > bounds.max_degree for s in sources):
                report.record_skip(SkipReason.INDEX_OVERFLOW)
            elif not all(_complete_in_genus(layout, s, g_max) for s in sources):
                report.record_skip(SkipReason.GENUS_OVERFLOW)
            else:
                value = image.coefficient(monomial)
                report.record(value == 0, f"{monomial}: {format_rational(value)}")
        return _finish(report)

    Q = log_annihilator(k, G, layout, g_max)
    for monomial in monomials_up_to(layout.nvars, bounds.max_degree):
        shifted = layout.weight(monomial) + 3 + k
        if shifted % 3:
            # no genus has this weight
            continue
        if shifted // 3 > g_max:
            report.record_skip(SkipReason.GENUS_OVERFLOW)
            continue
        reachable = _first_group_reach(layout, monomial, k) and _second_group_reach(layout, monomial, k)
        if k >= 1 and (sum(monomial) + 2 > bounds.max_degree or k - 1 > layout.max_t):
            reachable = False
        if not reachable:
            report.record_skip(SkipReason.INDEX_OVERFLOW)
            continue
        value = Q.coefficient(monomial)
        report.record(value == 0, f"{monomial}: {format_rational(value)}")
    return _finish(report)


def shift_check(
    g_max: int,
    layout: VariableLayout,
    G: Optional[SparsePoly] = None,
    engine: Engine = Engine.KMZ_DVV,
    service: Optional[CorrelatorService] = None,
) -> CheckReport:
    """G(s, t) = F(t_0, t_1, t_2 + p_2, ..., t_T + p_T) coefficient-wise."""
    bounds = layout.bounds
    report = CheckReport(name="kdv-shift", params=f"g<={g_max},{bounds.render()}")
    if G is None:
        G = build_G(layout, g_max, engine, service)
    substituted = shifted_F(build_F(layout, g_max, engine, service), layout)
    for monomial in monomials_up_to(layout.nvars, bounds.max_degree):
        genus = layout.genus(monomial)
        if genus is not None and genus > g_max:
            report.record_skip(SkipReason.GENUS_OVERFLOW)
            continue
        if layout.s_part(monomial).weight + 1 > layout.max_t:
            report.record_skip(SkipReason.INDEX_OVERFLOW)
            continue
        left, right = G.coefficient(monomial), substituted.coefficient(monomial)
        report.record(left == right, f"{monomial}: G={format_rational(left)} shifted F={format_rational(right)}")
    return _finish(report)


def exp_log_check(layout: VariableLayout, G: Optional[SparsePoly] = None, g_max: int = 2,
                  service: Optional[CorrelatorService] = None) -> CheckReport:
    """exp(G) * exp(-G) = 1 within bounds."""
    report = CheckReport(name="exp-inverse", params=layout.bounds.render())
    if G is None:
        G = build_G(layout, g_max, service=service)
    product = G.exp() * (-G).exp()
    one = SparsePoly.constant(layout.nvars, layout.bounds.max_degree)
    report.record(product == one, f"{len(product)} terms")
    return _finish(report)


# -- Itzykson-Zuber ------------------------------------------------------------

def iz_recursion(g_max: int) -> List[Fraction]:
    """phi_0 .. phi_g_max from phi_{g+1} = (25g^2-1)/24 phi_g + 1/2 sum_{m=1}^g phi_{g+1-m} phi_m."""
    phi = [Fraction(-1), Fraction(1, 24)]
    for g in range(1, g_max):
        phi.append(
            Fraction(25 * g * g - 1, 24) * phi[g]
            + Fraction(1, 2) * sum((phi[g + 1 - m] * phi[m] for m in range(1, g + 1)), Fraction(0))
        )
    return phi[: g_max + 1]


def iz_from_correlator(g: int, service: Optional[CorrelatorService] = None) -> Fraction:
    """(5g-5)(5g-3) / (2^g (3g-3)!) <tau_2^(3g-3)>_g."""
    service = service or correlator_service
    top = service.dvv(g, (2,) * (3 * g - 3))
    return Fraction((5 * g - 5) * (5 * g - 3), 2 ** g * math.factorial(3 * g - 3)) * top


def iz_check(g_max: int, service: Optional[CorrelatorService] = None) -> CheckReport:
    if g_max < 2:
        raise DomainError(f"the Itzykson-Zuber check starts at genus 2, got g_max = {g_max}")
    report = CheckReport(name="itzykson-zuber", params=f"g<={g_max}")
    phi = iz_recursion(g_max)
    report.record(phi[1] == Fraction(1, 24), f"phi_1 = {phi[1]}")
    for g in range(2, g_max + 1):
        direct = iz_from_correlator(g, service)
        report.record(direct == phi[g], f"g={g}: recursion {phi[g]} vs correlator {direct}")
    return _finish(report)


# -- identities on random keys -----------------------------------------------------

def _tau_multisets(n: int, total: int, largest: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Non-increasing n-tuples of nonnegative integers summing to total."""
    if largest is None:
        largest = total
    if n == 0:
        return [()] if total == 0 else []
    result = []
    for first in range(min(largest, total), -1, -1):
        for tail in _tau_multisets(n - 1, total - first, first):
            result.append((first,) + tail)
    return result


def _sample(pool: Sequence, trials: int, rng: random.Random) -> List:
    """trials draws from the pool, replayed in pool (small-first) order."""
    if not pool:
        return []
    picks = sorted(rng.choices(range(len(pool)), k=trials))
    return [pool[i] for i in picks]


def _half_weight(r: int, s: int) -> Fraction:
    return Fraction(double_factorial(2 * r + 1) * double_factorial(2 * s + 1), 2)


def _split_sum(service, engine, genus, left_kappa, right_kappa, left_extra, right_extra, points) -> Fraction:
    """sum over g' and labelled I + J = points of <left I>_g' <right J>_{g-g'}."""
    total = Fraction(0)
    for left, right, multiplicity in sub_multisets(points):
        for g_left in range(genus + 1):
            first = service.bracket(engine, g_left, left_kappa, left_extra + left)
            if not first:
                continue
            total += multiplicity * first * service.bracket(engine, genus - g_left, right_kappa, right_extra + right)
    return total


def kappa1_identity_pool(max_dimension: int = 6, max_a: int = 3) -> List[Tuple[int, int, int, Tuple[int, ...]]]:
    """(g, a, d1, rest) in degree, away from (0,3) and (1,1), smallest first."""
    pool = []
    for g in range(0, max_dimension // 3 + 2):
        for n in range(1, max_dimension - 3 * g + 4):
            dimension = 3 * g - 3 + n
            if 2 * g - 2 + n <= 0 or dimension > max_dimension or (g, n) in ((0, 3), (1, 1)):
                continue
            for a in range(0, min(max_a, dimension) + 1):
                for d1 in range(0, dimension - a + 1):
                    for rest in _tau_multisets(n - 1, dimension - a - d1):
                        pool.append((g, a, d1, rest))
    pool.sort(key=lambda item: (3 * item[0] - 3 + len(item[3]) + 1, item))
    return pool


def kappa1_identity(service: CorrelatorService, engine: Engine, g: int, a: int, d1: int, rest: Tuple[int, ...]) -> Tuple[Fraction, Fraction]:
    """Both sides of the kappa_1 form of the psi/kappa recursion."""
    kappa = MultiIndex.unit(1, a)
    lhs = Fraction(0)
    for b in range(a + 1):
        sign = -1 if b % 2 else 1
        lhs += sign * math.comb(a, b) * Fraction(double_factorial(2 * (d1 + b) + 1), double_factorial(2 * b + 1)) * service.bracket(
            engine, g, MultiIndex.unit(1, a - b), (d1 + b,) + rest
        )
    rhs = Fraction(0)
    for j, dj in enumerate(rest):
        others = rest[:j] + rest[j + 1:]
        rhs += Fraction(double_factorial(2 * d1 + 2 * dj - 1), double_factorial(2 * dj - 1)) * service.bracket(
            engine, g, kappa, (d1 + dj - 1,) + others
        )
    for r in range(d1 - 1):
        s = d1 - 2 - r
        rhs += _half_weight(r, s) * service.bracket(engine, g - 1, kappa, (r, s) + rest)
        for c in range(a + 1):
            rhs += _half_weight(r, s) * math.comb(a, c) * _split_sum(
                service, engine, g, MultiIndex.unit(1, c), MultiIndex.unit(1, a - c), (r,), (s,), rest
            )
    return lhs, rhs


def kappa_pool(
    max_dimension: int, max_kappa_weight: int, min_n: int, extra_points: int = 0, extra_degree: int = 0
) -> List[Tuple[int, MultiIndex, Tuple[int, ...]]]:
    """(g, b, taus) such that adding extra_points insertions of total degree extra_degree gives a stable in-degree bracket."""
    pool = []
    for g in range(0, max_dimension // 3 + 2):
        for n in range(min_n, max_dimension - 3 * g + 4):
            points = n + extra_points
            dimension = 3 * g - 3 + points
            if 2 * g - 2 + points <= 0 or dimension > max_dimension:
                continue
            for b in multi_indices_up_to(max_kappa_weight):
                remaining = dimension - extra_degree - b.weight
                if remaining < 0:
                    continue
                for taus in _tau_multisets(n, remaining):
                    pool.append((g, b, taus))
    pool.sort(key=lambda item: (3 * item[0] + len(item[2]), item[1].sort_key(), item[0], item[2]))
    return pool


def dilaton_identity(service: CorrelatorService, engine: Engine, g: int, b: MultiIndex, taus: Tuple[int, ...]) -> Tuple[Fraction, Fraction]:
    """sum_{L+L'=b} (-1)^||L|| C(b,L) <tau_{|L|+1} prod tau kappa(L')>_g vs (2g-2+n) <prod tau kappa(b)>_g."""
    lhs = Fraction(0)
    for low, high in splits(b):
        sign = -1 if low.size % 2 else 1
        lhs += sign * mi_binomial(b, low) * service.bracket(engine, g, high, (low.weight + 1,) + taus)
    rhs = (2 * g - 2 + len(taus)) * service.bracket(engine, g, b, taus)
    return lhs, rhs


def splitting_identity(service: CorrelatorService, engine: Engine, g: int, b: MultiIndex, taus: Tuple[int, ...]) -> Tuple[Fraction, Fraction]:
    """<tau_0 tau_1 prod tau kappa(b)>_g vs 1/12 <tau_0^4 ...>_{g-1} + 1/2 sum C(b,L) <tau_0^2 I kappa(L)><tau_0^2 J kappa(L')>."""
    lhs = service.bracket(engine, g, b, (0, 1) + taus)
    rhs = Fraction(1, 12) * service.bracket(engine, g - 1, b, (0, 0, 0, 0) + taus)
    for low, high in splits(b):
        rhs += Fraction(mi_binomial(b, low), 2) * _split_sum(service, engine, g, low, high, (0, 0), (0, 0), taus)
    return lhs, rhs


def proposition_checks(
    trials: int,
    seed: int,
    engine: Engine = Engine.KMZ_DVV,
    service: Optional[CorrelatorService] = None,
    max_dimension: int = 6,
    max_kappa_weight: int = 3,
) -> List[CheckReport]:
    """Seeded randomized checks of the kappa_1 recursion, the generalized dilaton and the tau_0 tau_1 splitting."""
    service = service or correlator_service
    rng = random.Random(seed)
    params = f"trials={trials},seed={seed}"
    reports = []

    report = CheckReport(name="kappa1-recursion-identity", params=params)
    for g, a, d1, rest in _sample(kappa1_identity_pool(max_dimension, max_kappa_weight), trials, rng):
        lhs, rhs = kappa1_identity(service, engine, g, a, d1, rest)
        report.record(lhs == rhs, f"g={g},a={a},d1={d1},rest={rest}: {lhs} != {rhs}")
    reports.append(_finish(report))

    report = CheckReport(name="generalized-dilaton", params=params)
    for g, b, taus in _sample(kappa_pool(max_dimension - 1, max_kappa_weight, 1, 1, 1), trials, rng):
        lhs, rhs = dilaton_identity(service, engine, g, b, taus)
        report.record(lhs == rhs, f"g={g},b={b},taus={taus}: {lhs} != {rhs}")
    reports.append(_finish(report))

    report = CheckReport(name="tau0-tau1-splitting", params=params)
    for g, b, taus in _sample(kappa_pool(max_dimension, max_kappa_weight, 0, 2, 1), trials, rng):
        lhs, rhs = splitting_identity(service, engine, g, b, taus)
        report.record(lhs == rhs, f"g={g},b={b},taus={taus}: {lhs} != {rhs}")
    reports.append(_finish(report))
    return reports


# -- engines, constants, volumes ------------------------------------------------------

def stable_keys(max_dimension: int, max_kappa_weight: int) -> List[CorrelatorKey]:
    """Every stable in-degree key with 3g-3+n <= max_dimension and |kappa| <= max_kappa_weight."""
    keys = []
    for g in range(0, max_dimension // 3 + 2):
        for n in range(0, max_dimension - 3 * g + 4):
            dimension = 3 * g - 3 + n
            if 2 * g - 2 + n <= 0 or dimension > max_dimension:
                continue
            for b in multi_indices_up_to(min(max_kappa_weight, dimension)):
                for taus in _tau_multisets(n, dimension - b.weight):
                    keys.append(CorrelatorKey(g, b, taus))
    keys.sort(key=lambda key: (key.dimension, key.genus, key.kappa.sort_key(), key.taus))
    return keys


def engines_check(
    max_dimension: int, max_kappa_weight: int, service: Optional[CorrelatorService] = None
) -> CheckReport:
    """All applicable engines agree on every small key."""
    service = service or correlator_service
    report = CheckReport(name="cross-engine", params=f"dim<={max_dimension},kappa<={max_kappa_weight}")
    engines = list(Engine)
    for key in stable_keys(max_dimension, max_kappa_weight):
        values = service.evaluate_engines(key, engines)
        agree = len(set(values.values())) == 1
        report.record(agree, f"{key}: " + ", ".join(f"{e.value}={v}" for e, v in values.items()))
    return _finish(report)


def constants_checks(max_weight: int = 15, max_beta: int = 25) -> List[CheckReport]:
    reports = []

    report = CheckReport(name="beta-closed-vs-series", params=f"b<={max_beta}")
    series = constants.beta_series(max_beta)
    for b in range(max_beta + 1):
        closed = constants.beta_closed(b)
        report.record(closed == series[b], f"b={b}: {closed} vs {series[b]}")
    reports.append(_finish(report))

    table = constants.alpha_table(max_weight)
    inverse = constants.invert_multiindex(constants.recursion_kernel, max_weight)
    report = CheckReport(name="alpha-table", params=f"weight<={max_weight}")
    for m in multi_indices_up_to(max_weight):
        value = table[m]
        if m:
            report.record(table.relation_residual(m) == 0, f"{m}: relation residual")
        report.record(value == mi_factorial(m) * inverse[m], f"{m}: {value} vs L! * inverse")
        report.record(value > 0, f"{m}: {value} is not positive")
    for b in range(max_weight + 1):
        value = table[MultiIndex.unit(1, b)]
        report.record(value == math.factorial(b) * constants.beta_closed(b), f"alpha_{b}e1 = {value}")
    reports.append(_finish(report))
    return reports


def volume_checks(
    max_dimension: int = 6, engine: Engine = Engine.KMZ_DVV, service: Optional[CorrelatorService] = None
) -> List[CheckReport]:
    service = service or correlator_service
    reports = []

    report = CheckReport(name="volume-known", params="V04,V11")
    v04 = volumes.volume_polynomial(0, 4, engine, service)
    report.record(v04.constant_term() == volumes.VolumeCoefficient(Fraction(2), 2), "V04 constant")
    report.record(v04.coefficient((1, 0, 0, 0)) == volumes.VolumeCoefficient(Fraction(1, 2), 0), "V04 L^2")
    report.record(len(v04.terms) == 2, "V04 term count")
    v11 = volumes.volume_polynomial(1, 1, engine, service)
    report.record(v11.constant_term() == volumes.VolumeCoefficient(Fraction(1, 12), 2), "V11 constant")
    report.record(v11.coefficient((1,)) == volumes.VolumeCoefficient(Fraction(1, 48), 0), "V11 L^2")
    reports.append(_finish(report))

    report = CheckReport(name="volume-coefficients", params=f"dim<={max_dimension}")
    for g in range(0, max_dimension // 3 + 2):
        for n in range(1, max_dimension - 3 * g + 4):
            if 2 * g - 2 + n <= 0 or 3 * g - 3 + n > max_dimension:
                continue
            polynomial = volumes.volume_polynomial(g, n, engine, service)
            for exponents, coefficient in polynomial.terms.items():
                d0 = polynomial.dimension - sum(exponents)
                expected = service.evaluate(CorrelatorKey(g, MultiIndex.unit(1, d0), exponents), engine)
                report.record(
                    volumes.extract_correlator(polynomial, exponents) == expected,
                    f"({g},{n}) {exponents}: round trip",
                )
                report.record(coefficient.rational > 0, f"({g},{n}) {exponents}: not positive")
            report.record(
                polynomial.constant_term() == volumes.constant_term_from_wp(g, n, engine, service),
                f"({g},{n}): constant term vs top kappa_1 volume",
            )
    reports.append(_finish(report))
    return reports


# -- battery -------------------------------------------------------------------

def _suites(suite: Suite) -> List[Suite]:
    if suite is Suite.ALL:
        return [s for s in Suite if s is not Suite.ALL]
    return [suite]


async def run_battery(
    suite: Suite,
    bounds: VerifyBounds,
    g_max: int = 3,
    iz_g_max: int = 6,
    trials: int = 200,
    seed: int = 20240607,
    max_dimension: int = 7,
    max_kappa_weight: int = 4,
    alpha_max_weight: int = 15,
    engine: Engine = Engine.KMZ_DVV,
    service: Optional[CorrelatorService] = None,
) -> List[CheckReport]:
    """Run the selected suites concurrently; reports come back in a fixed order."""
    service = service or correlator_service
    selected = _suites(Suite(suite))
    layout = VariableLayout(bounds)
    small = VariableLayout(SMALL_BOUNDS)

    G: Optional[SparsePoly] = None
    if Suite.VIRASORO in selected or Suite.SHIFT in selected:
        G = await asyncio.to_thread(build_G, layout, g_max, engine, service)

    jobs: List[Callable[[], object]] = []
    if Suite.CONSTANTS in selected:
        jobs.append(lambda: constants_checks(alpha_max_weight))
    if Suite.ENGINES in selected:
        jobs.append(lambda: engines_check(max_dimension, max_kappa_weight, service))
    if Suite.IZ in selected:
        jobs.append(lambda: iz_check(iz_g_max, service))
    if Suite.VOLUMES in selected:
        jobs.append(lambda: volume_checks(6, engine, service))
    if Suite.VIRASORO in selected:
        for n in range(-1, 4):
            for m in range(-1, 4):
                jobs.append(lambda n=n, m=m: commutator_check(n, m, layout))
        for k in range(-1, 3):
            jobs.append(lambda k=k: annihilation_check(k, g_max, layout, G, engine=engine, service=service))
            jobs.append(lambda k=k: annihilation_check(k, g_max, small, None, True, engine, service))
        jobs.append(lambda: exp_log_check(small, None, g_max, service))
    if Suite.SHIFT in selected:
        jobs.append(lambda: shift_check(g_max, layout, G, engine, service))
    if Suite.PROPOSITIONS in selected:
        jobs.append(lambda: proposition_checks(trials, seed, engine, service))

    results = await asyncio.gather(*(asyncio.to_thread(job) for job in jobs))
    reports: List[CheckReport] = []
    for result in results:
        reports.extend(result if isinstance(result, list) else [result])
    failed = sum(1 for report in reports if not report.passed)
    logger.info(f"Verification finished: {len(reports)} checks, {failed} failed")
    return reports
