from fractions import Fraction

import pytest

from src.services.virasoro import (
    VirasoroOperator,
    apply_virasoro,
    build_F,
    build_G,
    shift_polynomial,
)
from src.utils.errors import DomainError
from src.utils.multiindex import MultiIndex
from src.utils.sparse_poly import SparsePoly


def test_layout_slots(tiny_layout):
    assert tiny_layout.nvars == 6
    monomial = tiny_layout.monomial(MultiIndex.parse("1:1,2:1"), {0: 2})
    assert monomial == (2, 0, 0, 0, 1, 1)
    assert tiny_layout.s_part(monomial) == MultiIndex.parse("1:1,2:1")
    assert tiny_layout.weight(monomial) == 1
    assert tiny_layout.genus(monomial) is None
    assert tiny_layout.genus(tiny_layout.monomial(t_counts={0: 3})) == 0


def test_operator_index_range(tiny_layout):
    with pytest.raises(DomainError):
        VirasoroOperator(-2, tiny_layout)


def test_v0_on_one(tiny_layout):
    one = SparsePoly.constant(tiny_layout.nvars, tiny_layout.bounds.max_degree)
    assert apply_virasoro(0, one, tiny_layout) == Fraction(1, 16)


def test_v_minus_one_on_one(tiny_layout):
    one = SparsePoly.constant(tiny_layout.nvars, tiny_layout.bounds.max_degree)
    expected = SparsePoly(tiny_layout.nvars, tiny_layout.bounds.max_degree, {tiny_layout.monomial(t_counts={0: 2}): Fraction(1, 4)})
    assert apply_virasoro(-1, one, tiny_layout) == expected


def test_v1_on_t2(tiny_layout):
    nvars, degree = tiny_layout.nvars, tiny_layout.bounds.max_degree
    t2 = SparsePoly.variable(nvars, degree, tiny_layout.t(2))
    expected = SparsePoly(
        nvars,
        degree,
        {tiny_layout.monomial(): Fraction(-15, 2), tiny_layout.monomial(t_counts={1: 1}): Fraction(15, 2)},
    )
    assert apply_virasoro(1, t2, tiny_layout) == expected


def test_shift_polynomials(tiny_layout):
    nvars, degree = tiny_layout.nvars, tiny_layout.bounds.max_degree
    s1 = tiny_layout.monomial(MultiIndex.parse("1:1"))
    s2 = tiny_layout.monomial(MultiIndex.parse("2:1"))
    s1_squared = tiny_layout.monomial(MultiIndex.parse("1:2"))
    assert shift_polynomial(2, tiny_layout) == SparsePoly(nvars, degree, {s1: 1})
    assert shift_polynomial(3, tiny_layout) == SparsePoly(nvars, degree, {s2: 1, s1_squared: Fraction(-1, 2)})
    with pytest.raises(DomainError):
        shift_polynomial(0, tiny_layout)


def test_generating_functions(service, tiny_layout):
    G = build_G(tiny_layout, 1, service=service)
    F = build_F(tiny_layout, 1, service=service)
    t0_cubed = tiny_layout.monomial(t_counts={0: 3})
    assert G.coefficient(t0_cubed) == Fraction(1, 6)
    assert G.coefficient(tiny_layout.monomial(t_counts={1: 1})) == Fraction(1, 24)
    kappa_t0 = tiny_layout.monomial(MultiIndex.unit(1), {0: 1})
    assert G.coefficient(kappa_t0) == Fraction(1, 24)
    assert F.coefficient(kappa_t0) == 0
    assert all(not tiny_layout.s_part(m) for m in F.monomials())
