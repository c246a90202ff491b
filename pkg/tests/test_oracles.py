from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bd_cover.core.cover import is_good
from bd_cover.core.errors import UnsupportedParameter
from bd_cover.core.etale import NormOneElement, make_etale, random_regular_norm_one
from bd_cover.core.localfield import make_field
from bd_cover.core.oracles import (
    good_by_symbols,
    hilbert2_bruteforce,
    isotropic_bruteforce,
    square_bruteforce,
)
from bd_cover.core.quadforms import DiagQuadForm, is_isotropic
from bd_cover.core.sampling import suite_rng
from bd_cover.core.symbols import hilbert2

primes = st.sampled_from([3, 5, 7, 11, 13])
nonzero = st.integers(min_value=-2000, max_value=2000).filter(lambda n: n != 0)


def test_known_symbols(q3, q5):
    assert hilbert2_bruteforce(q5, 2, 5) == -1
    assert hilbert2_bruteforce(q3, 3, 3) == -1
    assert hilbert2_bruteforce(q5, 2, 3) == 1


@given(primes, nonzero, nonzero, st.integers(min_value=1, max_value=30))
def test_symbol_matches_search(p, a, b, den):
    """The tame formula agrees with solvability of z^2 = a x^2 + b y^2."""
    F = make_field(p)
    a = Fraction(a, den)
    assert hilbert2(F, a, b) == hilbert2_bruteforce(F, a, b)


@given(primes, nonzero)
def test_squares(p, n):
    """A rational square is always recognized."""
    F = make_field(p)
    assert square_bruteforce(F, n * n)
    assert square_bruteforce(F, Fraction(1, n * n))


def test_non_squares(q5):
    assert not square_bruteforce(q5, 2)
    assert not square_bruteforce(q5, 5)


@given(primes, st.lists(nonzero, min_size=2, max_size=3))
def test_isotropy_matches_search(p, entries):
    """Closed-form isotropy agrees with the search for ranks 2 and 3."""
    F = make_field(p)
    assert is_isotropic(DiagQuadForm.of(F, entries)) == isotropic_bruteforce(F, entries)


def test_isotropy_rank_limit(q5):
    with pytest.raises(UnsupportedParameter):
        isotropic_bruteforce(q5, [1, 1, 1, 1])


def test_bruteforce_needs_base_field():
    K = make_field(5, "unramified")
    with pytest.raises(UnsupportedParameter):
        hilbert2_bruteforce(K, 2, 5)


def test_good_examples(q7):
    K = make_etale(q7)
    assert not good_by_symbols(NormOneElement.split(K, 7), 3)
    assert good_by_symbols(NormOneElement.split(K, 343), 3)


@given(st.integers(min_value=0, max_value=2**32),
       st.sampled_from([(7, 3), (7, 6), (13, 4), (13, 6), (5, 4)]),
       st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=60, deadline=None)
def test_good_matches_symbol_criterion(seed, pm, label):
    """x is good iff (x^2, v)_{K,m} = 1 on generators of K^x."""
    p, m = pm
    K = make_etale(make_field(p), label)
    x = random_regular_norm_one(K, suite_rng(seed, "good"))
    assert is_good(K, x, m) == good_by_symbols(x, m)


@pytest.mark.parametrize("a,b,expected", [
    (5, 2, -1),
    (5, 4, 1),
    (10, 15, 1),
    (Fraction(2, 125), 3, -1),
    (250, 2 * 5 ** 3, 1),
])
def test_symbol_search_reduces_parity_first(q5, a, b, expected):
    """Entries are reduced to valuation 0 or 1 before the mod-p smooth-point search."""
    assert hilbert2_bruteforce(q5, a, b) == expected == hilbert2(q5, a, b)
