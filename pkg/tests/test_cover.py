from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bd_cover.core.cover import (
    BlockCoverElement,
    CoverElement,
    GL2Element,
    commutator,
    cover_inv,
    cover_mul,
    flicker_symbol,
    is_good,
    kubota_c,
    minus_one_square_kernel,
    minus_one_tilde,
    norm_symbol,
    random_gl2,
    random_torus_unit,
    torus_matrix,
)
from bd_cover.core.errors import BadModulus, DegenerateInput, NotRegular
from bd_cover.core.etale import NormOneElement, hilbert90_solve, iota, make_etale, random_regular_norm_one
from bd_cover.core.localfield import AdditiveCharacter, MuM, RootOfUnity, make_field
from bd_cover.core.sampling import random_nonzero, suite_rng
from bd_cover.core.symbols import hilbert2, hilbert_m

seeds = st.integers(min_value=0, max_value=2**32)


def test_cocycle_with_identity(q5):
    g = GL2Element.of(q5, 2, 3, 5, 7)
    assert kubota_c(GL2Element.identity(q5), g, 2).is_one
    assert kubota_c(g, GL2Element.identity(q5), 4).is_one


def test_inverse(q5):
    a = CoverElement(GL2Element.of(q5, 2, 3, 5, 7), MuM(4, 1))
    assert a * a.inverse() == CoverElement.identity(q5, 4)


def test_diagonal_product(q5):
    x = CoverElement.section(GL2Element.diag(q5, 5, 1), 2)
    y = CoverElement.section(GL2Element.diag(q5, 1, 2), 2)
    xy = cover_mul(x, y)
    assert xy.g == GL2Element.diag(q5, 5, 2)
    # c = (d2, a1) = (2, 5)_5
    assert xy.zeta.sign == -1
    assert cover_mul(xy, cover_inv(xy)) == CoverElement.identity(q5, 2)



@given(seeds, st.sampled_from([(5, 2), (5, 4), (7, 3), (7, 6)]))
@settings(max_examples=40, deadline=None)
def test_associativity(seed, pm):
    """(xy)z = x(yz) in the cover."""
    p, m = pm
    F = make_field(p)
    rng = suite_rng(seed, "assoc")
    x, y, z = (CoverElement.section(random_gl2(F, rng), m) for _ in range(3))
    assert (x * y) * z == x * (y * z)


def test_commutator_diagonal_example(q3):
    gamma = CoverElement.section(GL2Element.diag(q3, 3, Fraction(1, 3)), 2)
    assert commutator(GL2Element.diag(q3, 1, 3), gamma).sign == -1


def test_commutator_central_odd_degree(q7):
    gamma = CoverElement.section(GL2Element.scalar(q7, -1), 3)
    g = GL2Element.of(q7, 7, 2, 1, 3)
    assert commutator(g, gamma).is_one


def test_commutator_requires_centralizer(q5):
    with pytest.raises(DegenerateInput):
        commutator(GL2Element.of(q5, 1, 1, 0, 1), CoverElement.section(GL2Element.diag(q5, 2, 3), 2))


@given(seeds, st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=40, deadline=None)
def test_flicker_commutator(seed, label):
    """[M(u), s(M(x))] = (x, tau u)_{K,m}."""
    rng = suite_rng(seed, "flicker")
    K = make_etale(make_field(5), label)
    x = random_regular_norm_one(K, rng)
    u = random_torus_unit(K, rng)
    gamma = CoverElement.section(torus_matrix(x.value), 4)
    assert commutator(torus_matrix(u), gamma) == flicker_symbol(x, u, 4)


def test_norm_symbol_odd_degree(q7):
    x0 = NormOneElement.split(make_etale(q7), 7)
    assert norm_symbol(x0, q7.element(3), 3).is_one


def test_good_examples(q7):
    K = make_etale(q7)
    assert not is_good(K, NormOneElement.split(K, 7), 3)
    assert is_good(K, NormOneElement.split(K, 343), 3)
    assert is_good(K, NormOneElement.split(K, 7), 2)


def test_good_rejects_central(q7):
    K = make_etale(q7)
    with pytest.raises(NotRegular):
        is_good(K, NormOneElement(K.one()), 3)


@pytest.mark.parametrize("p,m", [(3, 2), (5, 2), (5, 4), (7, 6), (13, 4)])
def test_lift_of_minus_one_squares_to_one(p, m):
    F = make_field(p)
    lift = minus_one_tilde(m, AdditiveCharacter(F, 0), n_blocks=2)
    assert minus_one_square_kernel(F, m, lift).is_one


def test_lift_of_minus_one_twist_variance(q3, psi3):
    base = minus_one_tilde(2, psi3)
    twisted = minus_one_tilde(2, psi3.twisted(3))
    assert twisted.root / base.root == RootOfUnity.from_sign(hilbert2(q3, -1, 3))


def test_lift_of_minus_one_odd_degree(q7):
    assert minus_one_tilde(3, None, F=q7).root.is_one


def test_lift_needs_character_when_m_is_2_mod_4(q5):
    with pytest.raises(BadModulus):
        minus_one_tilde(2, None, F=q5)


def test_block_product_inverse(q5):
    blocks = [GL2Element.of(q5, 2, 3, 5, 7), GL2Element.diag(q5, 5, 2)]
    x = BlockCoverElement(tuple(blocks), MuM(4, 3))
    product = x * x.inverse()
    assert product.zeta.is_one
    assert all(g == GL2Element.identity(q5) for g in product.blocks)


@given(seeds, st.sampled_from([(3, 2), (5, 4), (7, 3), (7, 6), (13, 4), (13, 12)]))
@settings(max_examples=60, deadline=None)
def test_conjugating_a_lift_of_minus_one(seed, pm):
    """s(g) z s(-1) s(g)^-1 = (-1, det g)_{F,m} z s(-1) for every kernel coordinate z."""
    p, m = pm
    F = make_field(p)
    rng = suite_rng(seed, "minus-one-adjoint")
    g = random_gl2(F, rng)
    lift = CoverElement.section(GL2Element.scalar(F, -1), m).twist(MuM(m, int(rng.integers(m))))
    assert lift.conj(g).zeta / lift.zeta == hilbert_m(F, m, -1, g.det)
    assert commutator(g, lift) == hilbert_m(F, m, -1, g.det)


@given(seeds, st.sampled_from([(5, 2), (5, 4), (7, 6), (13, 4), (13, 12)]), st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=60, deadline=None)
def test_commutator_over_iota_any_hilbert90_solution(seed, pm, label):
    """[M(u), s(M(iota x0))] = (N omega, N u)_2 for every omega with omega / tau(omega) = x0."""
    p, m = pm
    F = make_field(p)
    K = make_etale(F, label)
    rng = suite_rng(seed, "commutator-omega")
    x0 = random_regular_norm_one(K, rng)
    u = random_torus_unit(K, rng)
    omega = hilbert90_solve(x0) * random_nonzero(F, rng)
    gamma = CoverElement.section(torus_matrix(iota(m, x0).value), m)
    expected = norm_symbol(x0, u.norm(), m, omega)
    assert expected == norm_symbol(x0, u.norm(), m)
    assert commutator(torus_matrix(u), gamma) == expected


def test_lift_of_minus_one_base_field(q5, q7, psi5):
    assert minus_one_tilde(4, None, F=q5).root == minus_one_tilde(4, psi5).root
    assert minus_one_tilde(2, psi5, F=q5).root == minus_one_tilde(2, psi5).root
    with pytest.raises(BadModulus):
        minus_one_tilde(4, None)
    with pytest.raises(DegenerateInput):
        minus_one_tilde(2, psi5, F=q7)
