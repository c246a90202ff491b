import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bd_cover.core.errors import DegenerateInput, SnapFailure
from bd_cover.core.localfield import AdditiveCharacter, RootOfUnity, SquareClass, make_field, square_class
from bd_cover.core.quadforms import (
    DiagQuadForm,
    disc_pm,
    hasse,
    is_isotropic,
    snap_to_eighth_root,
    weil_index,
    weil_index_scalar,
    witt_decompose,
)
from bd_cover.core.symbols import hilbert2

nonzero = st.integers(min_value=-300, max_value=300).filter(lambda n: n != 0)
primes = st.sampled_from([3, 5, 7, 11])


def test_ternary_form_invariants(q3):
    q = DiagQuadForm.of(q3, [-6, 2, 3])
    assert disc_pm(q) == SquareClass.ONE
    assert hasse(q) == -1


def test_hyperbolic_plane(q5, psi5):
    h = DiagQuadForm.of(q5, [1, -1])
    assert disc_pm(h) == SquareClass.ONE
    assert weil_index(psi5, h).is_one
    w = witt_decompose(h)
    assert (w.kernel.rank, w.hyperbolic_rank) == (0, 1)


def test_unit_form_hasse(q5):
    assert hasse(DiagQuadForm.of(q5, [1, 1, 1, 1])) == 1


def test_isotropy(q3, q5):
    assert not is_isotropic(DiagQuadForm.of(q3, [1, 1]))
    assert is_isotropic(DiagQuadForm.of(q5, [1, 1]))
    assert witt_decompose(DiagQuadForm.of(q3, [1, 1, 1, 1, 1])).hyperbolic_rank >= 1


def test_witt_kernel_is_anisotropic(q3):
    w = witt_decompose(DiagQuadForm.of(q3, [1, 1, 1, 3, -3]))
    assert w.kernel.rank + 2 * w.hyperbolic_rank == 5
    assert not is_isotropic(w.kernel)


def test_zero_entry_rejected(q5):
    with pytest.raises(DegenerateInput):
        DiagQuadForm.of(q5, [1, 0])


def test_gamma_one_is_fourth_root(psi5):
    assert weil_index_scalar(psi5, 1).den in (1, 2, 4)


def test_gamma_depends_on_square_class_only(q5, psi5):
    assert weil_index_scalar(psi5, 3) == weil_index_scalar(psi5, 3 * 4 * 25)
    assert weil_index_scalar(psi5, Fraction(1, 5)) == weil_index_scalar(psi5, 5 * 9)


@given(primes, nonzero, nonzero)
def test_weil_hilbert_relation(p, a, b):
    """(a, b)_2 = gamma(ab) gamma(1) / (gamma(a) gamma(b))."""
    F = make_field(p)
    psi = AdditiveCharacter(F, 0)
    g = lambda t: weil_index_scalar(psi, t)
    ratio = g(a * b) * g(1) / (g(a) * g(b))
    assert ratio.sign == hilbert2(F, a, b)


@given(primes, nonzero)
def test_gamma_of_negative_is_inverse(p, a):
    """gamma(-t) = gamma(t)^-1."""
    psi = AdditiveCharacter(make_field(p), 0)
    assert weil_index_scalar(psi, -a) == weil_index_scalar(psi, a).inverse()


@given(primes, nonzero, nonzero)
def test_binary_form_isometry(p, a, b):
    """<a, b> and <a + b, ab(a + b)> have equal Weil index when a + b != 0."""
    if a + b == 0:
        return
    F = make_field(p)
    psi = AdditiveCharacter(F, 0)
    lhs = weil_index(psi, DiagQuadForm.of(F, [a, b]))
    rhs = weil_index(psi, DiagQuadForm.of(F, [a + b, a * b * (a + b)]))
    assert lhs == rhs


@given(st.integers(min_value=0, max_value=7))
def test_snap_exact_roots(k):
    """Eighth roots of unity snap to themselves."""
    z = cmath.exp(2j * cmath.pi * k / 8)
    assert snap_to_eighth_root(z).angle == Fraction(k, 8)


def test_snap_rejects_far_points():
    with pytest.raises(SnapFailure):
        snap_to_eighth_root(complex(0.6, 0.1))


@given(primes, st.sampled_from([-1, 0, 1]), nonzero, nonzero, nonzero)
@settings(max_examples=200, deadline=None)
def test_ternary_hasse_from_weil_indices(p, level, a, b, c):
    """eps(q) = gamma(q) gamma(1)^-2 gamma(d(q)) for ternary q with d the signed discriminant."""
    F = make_field(p)
    psi = AdditiveCharacter(F, level)
    q = DiagQuadForm.of(F, [a, b, c])
    signed_det = -a * b * c
    assert disc_pm(q) == square_class(F.element(signed_det))
    value = weil_index(psi, q) / weil_index_scalar(psi, 1) ** 2 * weil_index_scalar(psi, signed_det)
    assert value == RootOfUnity.from_sign(hasse(q))


@given(primes, st.sampled_from([-1, 0, 1]), nonzero, st.integers(min_value=1, max_value=60))
@settings(max_examples=100, deadline=None)
def test_gamma_invariant_under_square_twist(p, level, t, c):
    """gamma_{psi_{c^2}}(t) = gamma_psi(t)."""
    F = make_field(p)
    psi = AdditiveCharacter(F, level)
    assert weil_index_scalar(psi.twisted(c * c), t) == weil_index_scalar(psi, t)


@pytest.mark.parametrize("level", [-1, 0, 1])
def test_weil_hilbert_relation_across_levels(level):
    F = make_field(7)
    psi = AdditiveCharacter(F, level)
    g = lambda t: weil_index_scalar(psi, t)
    for a, b in [(3, 7), (7, 7), (-1, 3), (14, 21), (Fraction(1, 7), 5)]:
        assert (g(a * b) * g(1) / (g(a) * g(b))).sign == hilbert2(F, a, b)
