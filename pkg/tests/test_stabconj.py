import pytest
from hypothesis import given, settings, strategies as st

from bd_cover.core.cover import GL2Element, random_gl2, random_sl2, torus_matrix
from bd_cover.core.errors import BadSign, DegenerateInput, NotRegular, UnsupportedParameter
from bd_cover.core.etale import NormOneElement, make_etale, random_regular_norm_one
from bd_cover.core.localfield import MuM, make_field
from bd_cover.core.sampling import random_sign, suite_rng
from bd_cover.core.stabconj import (
    RegClassParam,
    cad_sigma,
    cali_factor,
    calibrated,
    check_signs,
    equiv_params,
    inv_of,
    kappa_eval,
    make_torus_param,
    minus_one_shift,
    transport_param,
)
from bd_cover.core.symbols import hilbert2, sgn_quadratic

seeds = st.integers(min_value=0, max_value=2**32)


@pytest.fixture
def param3(q3):
    """One ramified block Q_3(sqrt 3) with c' = 1."""
    return make_torus_param(q3, [(3, 1)])


@pytest.fixture
def x3(ramified3):
    """(1 + sqrt 3) / (1 - sqrt 3), a regular norm-one element."""
    return NormOneElement.from_ratio(ramified3.element(1, 1))


def test_torus_param(q5):
    param = make_torus_param(q5, [("split", 1), ("u", 2), ("p", 3)])
    assert param.n == 3
    assert param.field_indices == [1, 2]
    assert not param.is_anisotropic
    with pytest.raises(UnsupportedParameter):
        make_torus_param(q5, [("u", 1)], k_sharp_degrees=[2])
    with pytest.raises(DegenerateInput):
        make_torus_param(q5, [("u", 0)])


def test_regular_class_param(param3, ramified3, x3):
    RegClassParam(param3, (x3,))
    with pytest.raises(NotRegular):
        RegClassParam(param3, (NormOneElement(-ramified3.one()),))


def test_inv_classes(q3, param3):
    assert inv_of(param3, [random_sl2(q3, suite_rng(1, "inv"))]).is_trivial
    inv = inv_of(param3, [GL2Element.diag(q3, 1, 2)])
    assert inv.labels() == ["-1"]
    assert kappa_eval("+", param3, inv) == 1
    assert kappa_eval("-", param3, inv) == -1
    trivial = inv_of(param3, [GL2Element.diag(q3, 1, -2)])
    assert kappa_eval("-", param3, trivial) == 1
    with pytest.raises(BadSign):
        kappa_eval("*", param3, inv)


def test_inv_ignores_split_blocks(q5):
    param = make_torus_param(q5, [("split", 1)])
    assert inv_of(param, [GL2Element.diag(q5, 1, 2)]).signs == ()


def test_cali_examples(q3, q7, ramified3, x3):
    minus = NormOneElement(-ramified3.one())
    assert cali_factor(2, q3.element(3), minus) == 1
    assert cali_factor(2, q3.element(4), x3) == 1
    split = NormOneElement.split(make_etale(q7), 7)
    assert cali_factor(3, q7.element(7), split) == 1


@pytest.mark.parametrize("nu", [2, 3, -3, 6, 5])
def test_cali_at_minus_one(q3, ramified3, nu):
    """C(nu, -1) = (-1, nu) sgn(nu)."""
    minus = NormOneElement(-ramified3.one())
    expected = hilbert2(q3, -1, nu) * sgn_quadratic(ramified3, nu)
    assert cali_factor(2, q3.element(nu), minus) == expected


def test_cali_topologically_unipotent(q5):
    K = make_etale(q5, "u")
    x = NormOneElement.from_ratio(K.element(1, 5))
    assert all(cali_factor(2, q5.element(nu), x) == 1 for nu in (2, 5, 10))


def test_check_signs():
    assert check_signs(4, [1, -1]) == (1, -1)
    with pytest.raises(BadSign):
        check_signs(2, [-1])
    with pytest.raises(BadSign):
        check_signs(4, [2])


def test_cad_identity(q3, param3, x3):
    elem = calibrated(param3, 2, [x3])
    moved = cad_sigma(2, [GL2Element.identity(q3)], elem.sigma, elem)
    assert moved.same_as(elem)
    assert moved.is_well_formed


def test_cad_torus_element_is_trivial(param3, ramified3, x3):
    elem = calibrated(param3, 2, [x3])
    g = torus_matrix(ramified3.element(1, 1))
    assert cad_sigma(2, [g], elem.sigma, elem).same_as(elem)


@given(seeds, st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=30, deadline=None)
def test_cad_composition(seed, label):
    """CAd(g1 g2) = CAd(g1) CAd(g2), and the image stays well formed."""
    rng = suite_rng(seed, "compose")
    F = make_field(5)
    param = make_torus_param(F, [(label, 1)])
    K = param.blocks[0].algebra
    elem = calibrated(param, 4, [random_regular_norm_one(K, rng)])
    g1, g2 = random_sl2(F, rng).scaled(2), GL2Element.diag(F, 1, 5)
    once = cad_sigma(4, [g1 @ g2], elem.sigma, elem)
    twice = cad_sigma(4, [g1], elem.sigma, cad_sigma(4, [g2], elem.sigma, elem))
    assert once.same_as(twice)
    assert once.is_well_formed


def test_cad_sign_mismatch(param3, x3):
    elem = calibrated(param3, 2, [x3])
    with pytest.raises(BadSign):
        cad_sigma(2, [GL2Element.identity(param3.base)], [-1], elem)


def test_equiv_params(q3, param3, x3):
    a = RegClassParam(param3, (x3,))
    assert equiv_params(a, a)
    by_norm = transport_param(param3, [GL2Element.diag(q3, 1, -2)])
    assert equiv_params(a, RegClassParam(by_norm, (x3,)))
    by_non_norm = transport_param(param3, [GL2Element.diag(q3, 1, 2)])
    assert not equiv_params(a, RegClassParam(by_non_norm, (x3,)))


def test_equiv_params_detects_inverse(param3, x3):
    a = RegClassParam(param3, (x3,))
    flipped = RegClassParam(param3.scale_c([param3.base.element(-1)]), (x3.inverse(),))
    assert equiv_params(a, flipped)


CAD_CONFIGS = [(5, 2), (5, 4), (7, 3), (7, 6), (13, 4), (13, 12)]


def _random_calibrated(seed, pm, label, name):
    p, m = pm
    rng = suite_rng(seed, name)
    F = make_field(p)
    param = make_torus_param(F, [(label, 1)])
    K = param.blocks[0].algebra
    sigma = [random_sign(rng) if m % 4 == 0 else 1]
    elem = calibrated(param, m, [random_regular_norm_one(K, rng)], sigma)
    return elem, random_gl2(F, rng), MuM(m, int(rng.integers(m)))


@given(seeds, st.sampled_from(CAD_CONFIGS), st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=60, deadline=None)
def test_cad_commutes_with_kernel(seed, pm, label):
    """CAd(g)(z delta~, delta_0) = z CAd(g)(delta~, delta_0) for z in mu_m, either sign."""
    elem, g, z = _random_calibrated(seed, pm, label, "cad-kernel")
    m = elem.m
    assert cad_sigma(m, [g], elem.sigma, elem.twist(z)).same_as(cad_sigma(m, [g], elem.sigma, elem).twist(z))


@given(seeds, st.sampled_from(CAD_CONFIGS), st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=60, deadline=None)
def test_cad_of_minus_one_shift(seed, pm, label):
    """CAd(g) of the shift by a lift of -1 is the shifted image, times sgn(det g) when m = 2 mod 4."""
    elem, g, z = _random_calibrated(seed, pm, label, "cad-minus-one")
    m = elem.m
    K = elem.param.blocks[0].algebra
    shifted = minus_one_shift(elem, 0, z)
    assert shifted.is_well_formed
    lhs = cad_sigma(m, [g], shifted.sigma, shifted)
    rhs = minus_one_shift(cad_sigma(m, [g], elem.sigma, elem), 0, z)
    if m % 4 == 2:
        rhs = rhs.twist(MuM.from_sign(m, sgn_quadratic(K, g.det)))
    assert lhs.same_as(rhs)


def test_minus_one_shift_moves_delta0(q5):
    K = make_etale(q5, "u")
    param = make_torus_param(q5, [("u", 1)])
    x = random_regular_norm_one(K, suite_rng(0, "shift"))
    twofold = minus_one_shift(calibrated(param, 2, [x]), 0)
    assert twofold.delta0[0] == -x
    assert twofold.sigma == (1,)
    fourfold = minus_one_shift(calibrated(param, 4, [x]), 0)
    assert fourfold.delta0[0] == x
    assert fourfold.sigma == (-1,)
