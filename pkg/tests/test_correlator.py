from fractions import Fraction
import math

import pytest

from src.models.schemas import Engine
from src.services.correlator import CorrelatorKey, degree_matches, dimension_gate, sub_multisets
from src.utils.errors import (
    CacheConsistencyError,
    CacheCorruptionError,
    DomainError,
    UnstableKeyError,
    UnsupportedEngineError,
    VerificationFailure,
)
from src.utils.multiindex import MultiIndex

HIGHER_ENGINES = [Engine.KMZ_DVV, Engine.ALPHA, Engine.INVERTED]

PSI_VALUES = [
    (2, (4,), Fraction(1, 1152)),
    (2, (4, 1), Fraction(1, 384)),
    (2, (3, 2), Fraction(29, 5760)),
    (2, (2, 2, 2), Fraction(7, 240)),
    (3, (7,), Fraction(1, 82944)),
    (1, (0, 1, 2), Fraction(1, 12)),
]

KAPPA1_VALUES = [
    (1, "1:1", (0,), Fraction(1, 24)),
    (1, "1:1", (0, 1), Fraction(1, 12)),
    (1, "1:2", (0, 0), Fraction(1, 8)),
    (0, "1:1", (0, 0, 0, 0), Fraction(1)),
    (0, "1:2", (0, 0, 0, 0, 0), Fraction(5)),
    (0, "1:1", (1, 0, 0, 0, 0), Fraction(3)),
    (2, "1:3", (), Fraction(43, 2880)),
]

HIGHER_VALUES = [
    (2, "3:1", (), Fraction(1, 1152)),
    (2, "1:1,2:1", (), Fraction(1, 240)),
]


def test_key_is_canonical():
    key = CorrelatorKey.of(1, "1:1", [0, 2, 1])
    assert key.taus == (2, 1, 0)
    assert key == CorrelatorKey(1, MultiIndex.unit(1), (1, 0, 2))
    assert str(key) == "<k=1:1 t=2,1,0>_1"


def test_unstable_and_invalid_keys():
    with pytest.raises(UnstableKeyError):
        CorrelatorKey.of(1, "-", [])
    with pytest.raises(UnstableKeyError):
        CorrelatorKey.of(0, "-", [0, 0])
    with pytest.raises(DomainError):
        CorrelatorKey.of(0, "-", [0, 0, -1])


def test_dimension_gate(service):
    key = CorrelatorKey.of(0, "-", [1, 0, 0])
    assert dimension_gate(key) == 0
    assert not degree_matches(key)
    assert service.correlator(0, "-", [1, 0, 0]) == 0
    assert service.correlator(1, "-", [0, 1]) == 0
    assert service.correlator(0, "-", [0, 0, 0]) == 1


@pytest.mark.parametrize("genus,taus,expected", PSI_VALUES)
@pytest.mark.parametrize("engine", list(Engine))
def test_psi_values(service, engine, genus, taus, expected):
    assert service.correlator(genus, "-", taus, engine) == expected


def test_tau2_power_genus_three(service):
    assert service.dvv(3, (2,) * 6) == Fraction(1225, 144)


@pytest.mark.parametrize("taus", [(2, 0, 0, 0, 0), (1, 1, 0, 0, 0), (3, 1, 0, 0, 0, 0, 0), (2, 2, 0, 0, 0, 0, 0)])
def test_genus_zero_closed_form(service, taus):
    expected = Fraction(math.factorial(len(taus) - 3), math.prod(math.factorial(d) for d in taus))
    assert service.dvv(0, taus) == expected


@pytest.mark.parametrize("genus,kappa,taus,expected", KAPPA1_VALUES)
@pytest.mark.parametrize("engine", list(Engine))
def test_kappa1_values(service, engine, genus, kappa, taus, expected):
    assert service.correlator(genus, kappa, taus, engine) == expected


@pytest.mark.parametrize("genus,kappa,taus,expected", HIGHER_VALUES)
@pytest.mark.parametrize("engine", HIGHER_ENGINES)
def test_higher_kappa_values(service, engine, genus, kappa, taus, expected):
    assert service.correlator(genus, kappa, taus, engine) == expected


def test_ms_engine_rejects_higher_kappa(service):
    with pytest.raises(UnsupportedEngineError):
        service.correlator(2, "3:1", [], Engine.MS_KAPPA1)


def test_evaluate_engines_skips_ms_for_higher_kappa(service):
    key = CorrelatorKey.of(1, "2:1", [0, 0])
    values = service.evaluate_engines(key, list(Engine))
    assert Engine.MS_KAPPA1 not in values
    assert len(set(values.values())) == 1
    assert service.agreed_value(key, list(Engine)) == values[Engine.KMZ_DVV]


def test_agreed_value_reports_disagreement(service):
    key = CorrelatorKey.of(1, "1:1", [0])
    service.caches[Engine.ALPHA].insert(key, Fraction(1, 2))
    with pytest.raises(VerificationFailure):
        service.agreed_value(key, [Engine.KMZ_DVV, Engine.ALPHA])


def test_pure_kappa_needs_genus_two(service):
    with pytest.raises(DomainError):
        service.pure_kappa(1, MultiIndex.unit(1))
    assert service.pure_kappa(2, MultiIndex.parse("1:3")) == Fraction(43, 2880)


def test_string_and_dilaton_fast_path(service):
    key = CorrelatorKey.of(2, "-", [5, 0])
    assert service.string_dilaton_fast_path(key) == Fraction(1, 1152)
    dilaton = CorrelatorKey.of(2, "-", [4, 1])
    assert service.string_dilaton_fast_path(dilaton) == 3 * Fraction(1, 1152)
    assert service.string_dilaton_fast_path(CorrelatorKey.of(2, "-", [3, 2])) is None


def test_bracket_is_zero_outside_the_domain(service):
    assert service.bracket(Engine.KMZ_DVV, -1, MultiIndex(), (0, 0, 0)) == 0
    assert service.bracket(Engine.KMZ_DVV, 0, MultiIndex(), (0, 0)) == 0
    assert service.bracket(Engine.KMZ_DVV, 0, MultiIndex(), (0, 0, -1)) == 0


def test_sub_multisets_counts_labelled_splits():
    splits = sub_multisets((1, 0, 0))
    assert sum(m for _, _, m in splits) == 8
    assert ((0,), (1, 0), 2) in splits


def test_cache_hits_and_seed(service):
    service.correlator(2, "1:3", [])
    before = service.caches[Engine.KMZ_DVV].hits
    service.correlator(2, "1:3", [])
    assert service.caches[Engine.KMZ_DVV].hits == before + 1

    key = CorrelatorKey.of(2, "1:3", [])
    with pytest.raises(CacheConsistencyError):
        service.seed([(key, Fraction(1, 2))])


def test_seed_fills_only_the_reference_engine(service):
    key = CorrelatorKey.of(2, "1:1,2:1", [])
    assert service.seed([(key, Fraction(1, 2))]) == 1
    assert service.caches[Engine.KMZ_DVV].peek(key) == Fraction(1, 2)
    assert service.caches[Engine.ALPHA].peek(key) is None
    with pytest.raises(VerificationFailure):
        service.agreed_value(key, HIGHER_ENGINES)
    assert key not in service.known_values()


def test_seed_rejects_wrong_initial_values(service):
    with pytest.raises(CacheCorruptionError):
        service.seed([(CorrelatorKey.of(1, "1:1", [0]), Fraction(1, 23))])


def test_known_values_merges_engines(service):
    service.correlator(1, "1:2", [0, 0], Engine.ALPHA)
    service.correlator(1, "1:2", [0, 0], Engine.INVERTED)
    known = service.known_values()
    assert known[CorrelatorKey.of(1, "1:2", [0, 0])] == Fraction(1, 8)


def test_named_engine_entry_points(service):
    key = CorrelatorKey.of(0, "1:1", [0, 0, 0, 0])
    assert service.kmz_reduce(key) == 1
    assert service.ms_kappa1(key) == 1
    assert service.alpha_engine(key) == 1
    assert service.inverted_engine(key) == 1

    higher = CorrelatorKey.of(1, "2:1", [0, 0])
    assert service.alpha_engine(higher) == service.inverted_engine(higher) == service.kmz_reduce(higher)
