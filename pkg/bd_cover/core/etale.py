"""Quadratic etale algebras K/F, norm-one tori and the isogeny t -> t^(m/gcd(2,m))."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Optional, Union

import numpy as np
from loguru import logger

from bd_cover.core.errors import DegenerateInput, NotRegular, UnsupportedParameter
from bd_cover.core.localfield import (
    FieldElement,
    FieldKind,
    LocalField,
    Rational,
    SquareClass,
    make_field,
    smallest_nonresidue,
    square_class,
    square_class_of_int,
    teichmuller,
)
from bd_cover.core.sampling import random_ext_nonzero, random_nonzero

Scalar = Union[FieldElement, int, Fraction]


@dataclass(frozen=True)
class QuadEtale:
    """F x F with the swap, or F(sqrt D) with sqrt D -> -sqrt D.

    ``D`` is None for the split algebra and otherwise the canonical
    radicand u, p or u*p of its square class.
    """

    base: LocalField
    D: Optional[int] = None

    @property
    def is_split(self) -> bool:
        return self.D is None

    @property
    def d_class(self) -> SquareClass:
        return SquareClass.ONE if self.D is None else square_class_of_int(self.base.p, self.D)

    @cached_property
    def field(self) -> LocalField:
        """The quadratic field K (only for non-split algebras)."""
        if self.is_split:
            raise UnsupportedParameter("the split algebra is not a field")
        kind = FieldKind.UNRAMIFIED if self.d_class == SquareClass.U else FieldKind.RAMIFIED
        return make_field(self.base.p, kind, self.base.precision, d=self.D)

    def _base(self, x: Scalar) -> FieldElement:
        return x.embed(self.base) if isinstance(x, FieldElement) else self.base.element(x)

    def element(self, a: Scalar, b: Scalar = 0) -> "EtaleElement":
        """a + b sqrt D for a field, (a, b) for the split algebra."""
        a, b = self._base(a), self._base(b)
        if self.is_split:
            return EtaleElement(self, (a, b))
        K = self.field
        return EtaleElement(self, (K.from_scalars(a.a, b.a),))

    def from_field(self, x: FieldElement) -> "EtaleElement":
        if self.is_split or x.field != self.field:
            raise UnsupportedParameter(f"{x} is not an element of {self}")
        return EtaleElement(self, (x,))

    def scalar(self, c: Scalar) -> "EtaleElement":
        """Image of c in F under the diagonal embedding."""
        return self.element(c, c) if self.is_split else self.element(c)

    def one(self) -> "EtaleElement":
        return self.scalar(1)

    def sqrt_D(self) -> "EtaleElement":
        """A square root of D (for the split algebra D = 1 and this is (1, -1))."""
        return self.element(1, -1) if self.is_split else self.element(0, 1)

    def radicand(self) -> FieldElement:
        return self.base.element(1 if self.is_split else self.D)

    def __str__(self) -> str:
        return f"{self.base} x {self.base}" if self.is_split else str(self.field)


def make_etale(F: LocalField, D: Union[None, str, Rational, SquareClass] = None) -> QuadEtale:
    """Quadratic etale algebra F[t]/(t^2 - D).

    D may be None or "split", a nonzero rational, or a square class label.
    A square D gives the split algebra.
    """
    if D is None or D == "split":
        return QuadEtale(F.base)
    cls = SquareClass(D) if isinstance(D, (str, SquareClass)) else square_class_of_int(F.p, D)
    if cls == SquareClass.ONE:
        return QuadEtale(F.base)
    u = smallest_nonresidue(F.p)
    canonical = {SquareClass.U: u, SquareClass.P: F.p, SquareClass.UP: u * F.p}[cls]
    return QuadEtale(F.base, canonical)


@dataclass(frozen=True, eq=False)
class EtaleElement:
    """Element of a quadratic etale algebra."""

    algebra: QuadEtale
    parts: tuple[FieldElement, ...]

    def _wrap(self, parts: tuple[FieldElement, ...]) -> "EtaleElement":
        return EtaleElement(self.algebra, parts)

    def _coerce(self, other: object) -> "EtaleElement":
        if isinstance(other, EtaleElement):
            return other
        return self.algebra.scalar(other)

    def __add__(self, other: object) -> "EtaleElement":
        o = self._coerce(other)
        return self._wrap(tuple(x + y for x, y in zip(self.parts, o.parts)))

    __radd__ = __add__

    def __neg__(self) -> "EtaleElement":
        return self._wrap(tuple(-x for x in self.parts))

    def __sub__(self, other: object) -> "EtaleElement":
        return self + (-self._coerce(other))

    def __mul__(self, other: object) -> "EtaleElement":
        o = self._coerce(other)
        return self._wrap(tuple(x * y for x, y in zip(self.parts, o.parts)))

    __rmul__ = __mul__

    def inverse(self) -> "EtaleElement":
        return self._wrap(tuple(x.inverse() for x in self.parts))

    def __truediv__(self, other: object) -> "EtaleElement":
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int) -> "EtaleElement":
        return self._wrap(tuple(x ** e for x in self.parts))

    def tau(self) -> "EtaleElement":
        if self.algebra.is_split:
            return self._wrap((self.parts[1], self.parts[0]))
        return self._wrap((self.parts[0].conjugate(),))

    def norm(self) -> FieldElement:
        if self.algebra.is_split:
            return self.parts[0] * self.parts[1]
        return self.parts[0].norm()

    def trace(self) -> FieldElement:
        if self.algebra.is_split:
            return self.parts[0] + self.parts[1]
        return self.parts[0].trace()

    def coords(self) -> tuple[FieldElement, FieldElement]:
        """(a, b) with x = a + b sqrt D, or the two components when split."""
        if self.algebra.is_split:
            return self.parts[0], self.parts[1]
        x = self.parts[0]
        F = self.algebra.base
        return F.from_scalars(x.a), F.from_scalars(x.b)

    @property
    def is_invertible(self) -> bool:
        return not any(x.is_zero for x in self.parts)

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        return all(x == y for x, y in zip(self.parts, o.parts))

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        if self.algebra.is_split:
            return f"({self.parts[0]}, {self.parts[1]})"
        return str(self.parts[0])


@dataclass(frozen=True, eq=False)
class NormOneElement:
    """Element x of K^1, i.e. N(x) = 1."""

    value: EtaleElement

    def __post_init__(self) -> None:
        if not self.value.is_invertible or not self.value.norm() == 1:
            raise DegenerateInput(f"{self.value} does not have norm one")

    @property
    def algebra(self) -> QuadEtale:
        return self.value.algebra

    @classmethod
    def split(cls, K: QuadEtale, a: Scalar) -> "NormOneElement":
        a = K._base(a)
        return cls(K.element(a, a.inverse()))

    @classmethod
    def from_ratio(cls, omega: EtaleElement) -> "NormOneElement":
        """omega / tau(omega), surjective onto K^1 by Hilbert 90."""
        return cls(omega / omega.tau())

    def __mul__(self, other: "NormOneElement") -> "NormOneElement":
        return NormOneElement(self.value * other.value)

    def inverse(self) -> "NormOneElement":
        return NormOneElement(self.value.tau())

    def __pow__(self, e: int) -> "NormOneElement":
        return NormOneElement(self.value ** e)

    def __neg__(self) -> "NormOneElement":
        return NormOneElement(-self.value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormOneElement):
            return NotImplemented
        return self.value == other.value

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_one(self) -> bool:
        return self.value == 1

    @property
    def is_minus_one(self) -> bool:
        return self.value == -1

    @property
    def is_regular(self) -> bool:
        return not (self.is_one or self.is_minus_one)

    def require_regular(self) -> None:
        if not self.is_regular:
            raise NotRegular(f"{self.value} is central in SL(2)")

    def __str__(self) -> str:
        return str(self.value)


# ============ Hilbert 90 and the isogeny ============

def hilbert90_solve(x0: NormOneElement) -> EtaleElement:
    """Some omega in K^x with omega / tau(omega) = x0.

    Split: (a, 1/a) -> (a, 1). Field: 1 for x0 = 1, sqrt D for x0 = -1,
    otherwise 1 + x0.
    """
    K = x0.algebra
    if K.is_split:
        return K.element(x0.value.parts[0], 1)
    if x0.is_one:
        return K.one()
    omega = x0.value + 1
    if omega.norm().is_zero:
        return K.sqrt_D()
    return omega


def resolve_hilbert90(x0: NormOneElement, omega: Optional[EtaleElement] = None) -> EtaleElement:
    """omega itself after checking omega / tau(omega) = x0, or hilbert90_solve(x0).

    Raises:
        DegenerateInput: omega does not solve Hilbert 90 for x0
    """
    if omega is None:
        return hilbert90_solve(x0)
    if not omega / omega.tau() == x0.value:
        raise DegenerateInput(f"{omega} does not solve Hilbert 90 for {x0}")
    return omega


def norm_class_of_solution(x0: NormOneElement, omega: Optional[EtaleElement] = None) -> SquareClass:
    """Square class of N(omega), independent of the Hilbert 90 solution."""
    return square_class(resolve_hilbert90(x0, omega).norm())


def iota_exponent(m: int) -> int:
    return m // gcd(2, m)


def iota(m: int, x0: NormOneElement) -> NormOneElement:
    """t -> t^(m / gcd(2, m)) on K^1."""
    return x0 ** iota_exponent(m)


@dataclass
class IotaKernel:
    """Kernel of iota on K^1 with explicit generators."""

    algebra: QuadEtale
    m: int
    order: int
    generators: list[NormOneElement] = field(default_factory=list)

    def contains(self, x: NormOneElement) -> bool:
        return iota(self.m, x).is_one


def iota_kernel(m: int, K: QuadEtale) -> IotaKernel:
    """Kernel of iota: mu_k embedded as (z, 1/z) when split, {1} or {+-1} for a field."""
    F = K.base
    k = iota_exponent(m)
    if K.is_split:
        if k == 1:
            kernel = IotaKernel(K, m, 1)
        else:
            z = teichmuller(F, F.residue_field.generator_of_order(k))
            kernel = IotaKernel(K, m, k, [NormOneElement.split(K, z)])
    elif m % 4:
        kernel = IotaKernel(K, m, 1)
    else:
        kernel = IotaKernel(K, m, 2, [NormOneElement(-K.one())])
    for g in kernel.generators:
        if not kernel.contains(g):
            raise DegenerateInput(f"kernel generator {g} is not killed by iota")
    return kernel


def in_pm_iota_image(m: int, x: NormOneElement) -> bool:
    """Whether x lies in {+-1} * iota(K^1) = {+-1} * (K^1)^k, k = m/gcd(2,m).

    Only the residue (and valuation, when split) matters because 1 + p is
    k-divisible for p not dividing k.
    """
    K = x.algebra
    F = K.base
    p = F.p
    k = iota_exponent(m)
    if k == 1:
        return True
    if K.is_split:
        a = x.value.parts[0]
        v, unit = a.valuation_unit()
        if v % k:
            return False
        r = unit.residue()[0]
        e = (p - 1) // gcd(k, p - 1)
        return pow(r, e, p) == 1 or pow(-r % p, e, p) == 1
    L = K.field
    r = x.value.parts[0].residue()
    res = L.residue_field
    if L.kind == FieldKind.RAMIFIED:
        return True
    e = (p + 1) // gcd(k, p + 1)
    minus_r = ((-r[0]) % p, (-r[1]) % p)
    return res.pow(r, e) == res.one or res.pow(minus_r, e) == res.one


# ============ Sampling ============

def random_norm_one(K: QuadEtale, rng: np.random.Generator, vmax: int = 2) -> NormOneElement:
    """omega / tau(omega) for a random invertible omega."""
    if K.is_split:
        return NormOneElement.split(K, random_nonzero(K.base, rng, -vmax, vmax))
    omega = K.from_field(random_ext_nonzero(K.field, rng, -1, 1))
    x = NormOneElement.from_ratio(omega)
    logger.trace(f"sampled {x} in {K}^1")
    return x


def random_regular_norm_one(K: QuadEtale, rng: np.random.Generator, vmax: int = 2) -> NormOneElement:
    while True:
        x = random_norm_one(K, rng, vmax)
        if x.is_regular:
            return x
