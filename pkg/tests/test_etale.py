import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bd_cover.core.errors import DegenerateInput, NotRegular
from bd_cover.core.etale import (
    NormOneElement,
    hilbert90_solve,
    iota,
    iota_kernel,
    make_etale,
    norm_class_of_solution,
    random_norm_one,
    random_regular_norm_one,
    resolve_hilbert90,
)
from bd_cover.core.localfield import SquareClass, make_field
from bd_cover.core.sampling import random_nonzero, suite_rng


def test_make_etale_canonical_radicands(q5):
    assert make_etale(q5).is_split
    assert make_etale(q5, 4).is_split
    assert make_etale(q5, 3).D == 2
    assert make_etale(q5, "p").D == 5
    assert make_etale(q5, 15).D == 10


def test_hilbert90_split(q5):
    K = make_etale(q5)
    x0 = NormOneElement.split(K, 3)
    assert hilbert90_solve(x0) == K.element(3, 1)


def test_hilbert90_field_special_points(ramified3):
    K = ramified3
    assert hilbert90_solve(NormOneElement(K.one())) == 1
    omega = hilbert90_solve(NormOneElement(-K.one()))
    assert omega == K.sqrt_D()
    assert omega.norm() == -3


@given(st.integers(min_value=0, max_value=2**32), st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=50)
def test_hilbert90_solves(seed, label):
    """omega / tau(omega) = x0 for every sampled x0 in K^1."""
    K = make_etale(make_field(7), label)
    x0 = random_norm_one(K, suite_rng(seed, "etale"))
    omega = hilbert90_solve(x0)
    assert omega / omega.tau() == x0.value
    assert norm_class_of_solution(x0) in set(SquareClass)


def test_norm_one_check(ramified3):
    with pytest.raises(DegenerateInput):
        NormOneElement(ramified3.element(2))
    with pytest.raises(NotRegular):
        NormOneElement(-ramified3.one()).require_regular()


def test_iota_images(q7, ramified3):
    x = NormOneElement(-ramified3.one())
    assert iota(2, x) == x
    assert iota(4, x).is_one
    split = NormOneElement.split(make_etale(q7), 2)
    assert iota(6, split).value.parts[0] == 8


def test_iota_kernel_split(q7):
    kernel = iota_kernel(6, make_etale(q7))
    assert kernel.order == 3
    (gen,) = kernel.generators
    assert kernel.contains(gen)
    assert not gen.is_one


def test_iota_kernel_field(q5):
    K = make_etale(q5, "u")
    assert iota_kernel(2, K).order == 1
    kernel = iota_kernel(4, K)
    assert kernel.order == 2
    assert kernel.generators[0].is_minus_one


@given(st.integers(min_value=0, max_value=2**32))
@settings(max_examples=30)
def test_norm_one_group_closed(seed):
    """Products and inverses of norm-one elements have norm one."""
    rng = suite_rng(seed, "group")
    K = make_etale(make_field(5), "p")
    x, y = random_norm_one(K, rng), random_norm_one(K, rng)
    assert (x * y.inverse()).value.norm() == 1
    assert (x * x.inverse()).is_one


def test_sampling_is_deterministic():
    a = suite_rng(42, "cover").integers(0, 10**9, size=4)
    b = suite_rng(42, "cover").integers(0, 10**9, size=4)
    c = suite_rng(42, "good").integers(0, 10**9, size=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@given(st.integers(min_value=0, max_value=2**32), st.sampled_from([3, 5, 7, 11]),
       st.sampled_from(["split", "u", "p", "up"]))
@settings(max_examples=60, deadline=None)
def test_norm_class_independent_of_solution(seed, p, label):
    """Every Hilbert 90 solution for x0 is omega t with t in F^x, so N(omega t) has one square class."""
    F = make_field(p)
    K = make_etale(F, label)
    rng = suite_rng(seed, "hilbert90-class")
    x0 = random_regular_norm_one(K, rng)
    omega = hilbert90_solve(x0) * random_nonzero(F, rng)
    assert norm_class_of_solution(x0, omega) == norm_class_of_solution(x0)


def test_wrong_hilbert90_solution_rejected(ramified3):
    x0 = NormOneElement.from_ratio(ramified3.element(1, 1))
    with pytest.raises(DegenerateInput):
        resolve_hilbert90(x0, ramified3.element(1, 2))
