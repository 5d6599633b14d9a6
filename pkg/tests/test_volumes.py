from fractions import Fraction

import pytest

from src.services import volumes
from src.services.volumes import VolumeCoefficient
from src.utils.errors import DomainError


def test_v04(service):
    v04 = volumes.volume_polynomial(0, 4, service=service)
    assert v04.constant_term() == VolumeCoefficient(Fraction(2), 2)
    assert v04.coefficient((0, 0, 1, 0)) == VolumeCoefficient(Fraction(1, 2), 0)
    assert len(v04.expanded_terms()) == 5
    assert "2 * pi^2" in v04.render_lines()
    assert "1/2 * L1^2" in v04.render_lines()


def test_v11(service):
    v11 = volumes.volume_polynomial(1, 1, service=service)
    assert v11.render_lines() == ["1/12 * pi^2", "1/48 * L1^2"]
    assert v11.tsv_lines() == ["0\t1/12\t2", "1\t1/48\t0"]


def test_v05(service):
    v05 = volumes.volume_polynomial(0, 5, service=service)
    assert v05.constant_term() == VolumeCoefficient(Fraction(10), 4)
    assert v05.coefficient((1, 0, 0, 0, 0)) == VolumeCoefficient(Fraction(3), 2)
    assert v05.coefficient((1, 1, 0, 0, 0)) == VolumeCoefficient(Fraction(1, 2), 0)
    assert v05.coefficient((2, 0, 0, 0, 0)) == VolumeCoefficient(Fraction(1, 8), 0)


def test_v12_constant_term(service):
    v12 = volumes.volume_polynomial(1, 2, service=service)
    assert v12.constant_term() == VolumeCoefficient(Fraction(1, 4), 4)
    assert volumes.constant_term_from_wp(1, 2, service=service) == v12.constant_term()


def test_wp_top(service):
    assert volumes.wp_top(2, service=service) == Fraction(43, 2880)
    assert volumes.wp_top(0, 5, service=service) == 5


def test_extract_correlator_round_trip(service):
    v12 = volumes.volume_polynomial(1, 2, service=service)
    assert volumes.extract_correlator(v12, (0, 0)) == Fraction(1, 8)
    assert volumes.extract_correlator(v12, (0, 1)) == Fraction(1, 12)


def test_evaluate_volume_by_pi_power(service):
    v04 = volumes.volume_polynomial(0, 4, service=service)
    values = volumes.evaluate_volume(v04, [Fraction(1), Fraction(2), 0, 0])
    assert values == {0: Fraction(5, 2), 2: Fraction(2)}
    with pytest.raises(DomainError):
        volumes.evaluate_volume(v04, [1, 2])


def test_volume_domain_errors(service):
    with pytest.raises(DomainError):
        volumes.volume_polynomial(0, 2, service=service)
    with pytest.raises(DomainError):
        volumes.volume_polynomial(2, 0, service=service)
    with pytest.raises(DomainError):
        volumes.wp_top(1, 0, service=service)


def test_records_mirror_tsv(service):
    records = volumes.volume_polynomial(1, 1, service=service).records()
    assert [r.model_dump() for r in records] == [
        {"exponents": [0], "coefficient": "1/12", "pi_power": 2},
        {"exponents": [1], "coefficient": "1/48", "pi_power": 0},
    ]
