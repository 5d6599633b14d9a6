from fractions import Fraction

import pytest

from src.models.schemas import Engine, SkipReason, Suite
from src.services import verify
from src.services.verify import SMALL_BOUNDS
from src.services.virasoro import build_G
from src.utils.errors import DomainError
from src.utils.multiindex import MultiIndex
from src.utils.sparse_poly import monomials_up_to


def test_iz_recursion_values():
    phi = verify.iz_recursion(3)
    assert phi[:3] == [Fraction(-1), Fraction(1, 24), Fraction(49, 1152)]
    assert phi[3] == Fraction(1225, 6912)


def test_iz_check(service):
    report = verify.iz_check(4, service)
    assert report.passed
    assert report.checked == 4
    with pytest.raises(DomainError):
        verify.iz_check(1, service)


def test_iz_from_correlator(service):
    assert verify.iz_from_correlator(2, service) == Fraction(49, 1152)


@pytest.mark.parametrize("n,m", [(-1, 0), (0, 1), (1, -1), (2, 0), (1, 2), (-1, -1)])
def test_commutator(small_layout, n, m):
    report = verify.commutator_check(n, m, small_layout)
    assert report.passed, report.failures
    assert report.checked > 0


def test_commutator_index_range(small_layout):
    with pytest.raises(DomainError):
        verify.commutator_check(-2, 1, small_layout)


@pytest.mark.parametrize("k", [-1, 0, 1, 2])
def test_annihilation_log_mode(service, small_layout, k):
    G = build_G(small_layout, 2, service=service)
    report = verify.annihilation_check(k, 2, small_layout, G, service=service)
    assert report.passed, report.failures
    assert report.checked > 0
    assert report.checked + report.skipped > report.checked


@pytest.mark.parametrize("k", [-1, 0, 2])
def test_annihilation_log_mode_counts_only_genus_weights(service, small_layout, k):
    G = build_G(small_layout, 2, service=service)
    report = verify.annihilation_check(k, 2, small_layout, G, service=service)
    weighted = [
        m
        for m in monomials_up_to(small_layout.nvars, small_layout.bounds.max_degree)
        if (small_layout.weight(m) + 3 + k) % 3 == 0
    ]
    assert report.checked + report.skipped == len(weighted)
    assert report.passed, report.failures


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_annihilation_exponential_mode(service, small_layout, k):
    report = verify.annihilation_check(k, 2, small_layout, via_exponential=True, service=service)
    assert report.passed, report.failures
    assert report.checked > 0


def test_annihilation_fails_on_a_wrong_value(service, small_layout):
    G = build_G(small_layout, 1, service=service)
    tampered = G.copy()
    tampered.terms[small_layout.monomial(t_counts={1: 1})] = Fraction(1, 12)
    report = verify.annihilation_check(0, 1, small_layout, tampered, service=service)
    assert not report.passed
    assert report.failures


def test_shift(service, small_layout):
    report = verify.shift_check(2, small_layout, service=service)
    assert report.passed, report.failures
    assert report.skip_reasons.get(SkipReason.GENUS_OVERFLOW, 0) > 0


def test_exp_inverse(service, small_layout):
    assert verify.exp_log_check(small_layout, g_max=1, service=service).passed


def test_propositions(service):
    reports = verify.proposition_checks(15, 7, service=service, max_dimension=4, max_kappa_weight=2)
    assert [r.name for r in reports] == ["kappa1-recursion-identity", "generalized-dilaton", "tau0-tau1-splitting"]
    for report in reports:
        assert report.passed, report.failures
        assert report.checked == 15


def test_proposition_sampling_is_seeded(service):
    first = [r.render() for r in verify.proposition_checks(5, 11, service=service, max_dimension=3, max_kappa_weight=1)]
    second = [r.render() for r in verify.proposition_checks(5, 11, service=service, max_dimension=3, max_kappa_weight=1)]
    assert first == second


def test_identities_on_known_keys(service):
    lhs, rhs = verify.dilaton_identity(service, Engine.KMZ_DVV, 1, MultiIndex.unit(1), (0,))
    assert lhs == rhs
    lhs, rhs = verify.splitting_identity(service, Engine.ALPHA, 1, MultiIndex.unit(1), ())
    assert lhs == rhs == Fraction(1, 12)


def test_engines_check(service):
    report = verify.engines_check(4, 2, service)
    assert report.passed, report.failures
    assert report.checked == len(verify.stable_keys(4, 2))


def test_constants_checks():
    reports = verify.constants_checks(max_weight=6, max_beta=10)
    assert all(r.passed for r in reports)


def test_volume_checks(service):
    reports = verify.volume_checks(4, service=service)
    assert all(r.passed for r in reports), [r.failures for r in reports]


def test_report_render(service):
    report = verify.iz_check(2, service)
    assert report.render() == "CHECK itzykson-zuber g<=2 PASS checked=2 skipped=0"


@pytest.mark.asyncio
async def test_run_battery_order(service):
    reports = await verify.run_battery(
        Suite.IZ, SMALL_BOUNDS, iz_g_max=3, service=service
    )
    assert [r.name for r in reports] == ["itzykson-zuber"]
    assert reports[0].passed


@pytest.mark.asyncio
async def test_run_battery_virasoro_suite(service):
    reports = await verify.run_battery(Suite.VIRASORO, SMALL_BOUNDS, g_max=2, service=service)
    names = [r.name for r in reports]
    assert names.count("virasoro-commutator") == 25
    assert names.count("virasoro-annihilation") == 8
    assert names[-1] == "exp-inverse"
    assert all(r.passed for r in reports), [r.render() for r in reports if not r.passed]
