"""Random elements for property suites, driven by numpy Generators."""

import hashlib
from fractions import Fraction

import numpy as np

from bd_cover.core.errors import PrecisionExhausted
from bd_cover.core.localfield import FieldElement, LocalField


def suite_rng(seed: int, name: str) -> np.random.Generator:
    """Independent stream for one named suite."""
    digest = hashlib.sha256(name.encode()).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))


def random_digits(rng: np.random.Generator, p: int, n: int) -> int:
    digits = rng.integers(0, p, size=n)
    return sum(int(d) * p ** i for i, d in enumerate(digits))


def random_unit(F: LocalField, rng: np.random.Generator) -> FieldElement:
    """Uniform unit of the base field, to full precision."""
    p = F.p
    n = random_digits(rng, p, F.precision - 1) * p + int(rng.integers(1, p))
    return F.base.element(n)


def random_nonzero(F: LocalField, rng: np.random.Generator, vmin: int = -2, vmax: int = 2) -> FieldElement:
    """Unit of the base field times p^v with v uniform in [vmin, vmax]."""
    v = int(rng.integers(vmin, vmax + 1))
    return random_unit(F, rng) * F.base.element(Fraction(F.p) ** v)


def random_integral(F: LocalField, rng: np.random.Generator) -> FieldElement:
    """Uniform element of the ring of integers of the base field."""
    return F.base.element(random_digits(rng, F.p, F.precision))


def random_ext_nonzero(K: LocalField, rng: np.random.Generator, vmin: int = -1, vmax: int = 1) -> FieldElement:
    """Nonzero element of a quadratic extension with small valuation."""
    while True:
        a = random_integral(K, rng)
        b = random_integral(K, rng)
        x = K.from_scalars(a.a, b.a)
        if x.is_zero:
            continue
        try:
            x.valuation()
        except PrecisionExhausted:
            continue
        v = int(rng.integers(vmin, vmax + 1))
        return x * K.uniformizer() ** v


def random_sign(rng: np.random.Generator) -> int:
    return 1 if rng.integers(0, 2) else -1


def random_rational(rng: np.random.Generator, bound: int = 200) -> Fraction:
    """Nonzero rational with numerator and denominator up to ``bound``."""
    num = int(rng.integers(1, bound + 1)) * random_sign(rng)
    den = int(rng.integers(1, bound + 1))
    return Fraction(num, den)
