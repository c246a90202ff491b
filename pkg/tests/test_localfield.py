from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from sympy import divisors

from bd_cover.core.errors import BadModulus, BadPrime, NotNonSquare, UnsupportedParameter, ZeroResidue
from bd_cover.core.localfield import (
    AdditiveCharacter,
    FieldKind,
    MuM,
    RootOfUnity,
    SquareClass,
    make_field,
    psi_eval,
    square_class,
    teichmuller,
)


def test_base_field():
    F = make_field(5)
    assert (F.q, F.e, F.f) == (5, 1, 1)
    assert F.is_base


def test_ramified_extension_uses_sqrt_radicand():
    K = make_field(5, "ramified", d=5)
    assert (K.q, K.e) == (5, 2)
    assert K.uniformizer() == K.sqrt_d()
    assert K.sqrt_d().valuation() == 1


def test_unramified_extension_radicand_is_nonresidue():
    K = make_field(5, FieldKind.UNRAMIFIED)
    assert (K.q, K.e) == (25, 1)
    assert K.d == 2


@pytest.mark.parametrize("p", [2, 9, 1])
def test_bad_primes(p):
    with pytest.raises(BadPrime):
        make_field(p)


def test_square_radicand_rejected():
    with pytest.raises(NotNonSquare):
        make_field(5, "ramified", d=4)
    with pytest.raises(UnsupportedParameter):
        make_field(5, "ramified")


def test_valuation_unit(q5):
    v, u = q5.element(50).valuation_unit()
    assert v == 2
    assert u == 2
    v, u = q5.element(Fraction(1, 75)).valuation_unit()
    assert v == -2
    assert u * 3 == 1


@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=10**6))
def test_valuation_is_additive(a, b):
    """v(ab) = v(a) + v(b) on nonzero rationals of Q_5."""
    F = make_field(5)
    x, y = F.element(a), F.element(Fraction(1, b))
    assert (x * y).valuation() == x.valuation() + y.valuation()


def test_square_classes(q5):
    assert square_class(q5.element(4)) == SquareClass.ONE
    assert square_class(q5.element(2)) == SquareClass.U
    assert square_class(q5.element(5)) == SquareClass.P
    assert square_class(q5.element(10)) == SquareClass.UP
    assert SquareClass.U * SquareClass.UP == SquareClass.P


def test_teichmuller_lifts(q5):
    assert teichmuller(q5, 1) == 1
    t = teichmuller(q5, 2)
    assert t.residue()[0] == 2
    assert t ** 4 == 1
    assert teichmuller(q5, 4) == -1
    with pytest.raises(ZeroResidue):
        teichmuller(q5, 0)


def test_teichmuller_in_unramified_extension():
    K = make_field(3, "unramified")
    t = teichmuller(K, (1, 1))
    assert t ** 8 == 1
    assert t.residue() == (1, 1)


def test_psi_level_zero(q5):
    psi = AdditiveCharacter(q5, 0)
    assert psi_eval(psi, q5.element(5)).is_one
    assert psi_eval(psi, q5.element(1)).angle == Fraction(1, 5)
    assert psi_eval(psi.twisted(Fraction(1, 5)), q5.element(1)).angle == Fraction(1, 25)


@given(st.integers(min_value=-200, max_value=200), st.integers(min_value=-200, max_value=200))
def test_psi_is_additive(a, b):
    """psi(x + y) = psi(x) psi(y)."""
    F = make_field(5)
    psi = AdditiveCharacter(F, 0)
    x, y = F.element(Fraction(a, 25)), F.element(Fraction(b, 5))
    assert psi_eval(psi, x + y) == psi_eval(psi, x) * psi_eval(psi, y)


def test_roots_of_unity():
    z = RootOfUnity(Fraction(3, 8))
    assert (z ** 8).is_one
    assert RootOfUnity.from_sign(-1).sign == -1
    assert MuM.from_sign(4, -1).exp == 2
    assert MuM(4, 1).push(8).exp == 2
    with pytest.raises(BadModulus):
        MuM.from_sign(3, -1)


def test_parse_literals():
    K = make_field(5, "ramified", d=5)
    x = K.parse("1/2-3√D")
    assert x.a == K.scalar(Fraction(1, 2))
    assert x.b == K.scalar(-3)
    assert K.parse("√D") == K.sqrt_d()
    with pytest.raises(ValueError):
        K.parse("abc")


@pytest.mark.parametrize("p,degree", [(7, 1), (13, 1), (5, 2), (7, 2)])
def test_root_of_unity_generators_are_compatible(p, degree):
    res = make_field(p, "unramified" if degree == 2 else "base").residue_field
    for m in divisors(res.q - 1):
        gen = res.generator_of_order(m)
        assert res.order(gen) == m
        for d in divisors(m):
            assert res.pow(gen, m // d) == res.generator_of_order(d)


def test_generators_agree_with_base_field():
    F, K = make_field(7), make_field(7, "unramified")
    assert F.residue_field.generator_of_order(6) == K.residue_field.generator_of_order(6)
