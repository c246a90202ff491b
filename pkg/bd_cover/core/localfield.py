"""Bounded-precision arithmetic for Q_p (p odd) and its quadratic extensions.

Elements carry a valuation plus a unit known modulo p^prec (capped relative
precision). Quadratic extensions F(sqrt d) are handled through coordinates
(a, b) over the base, meaning a + b*sqrt(d); norm, trace and inverse are the
closed formulas of a quadratic extension.
"""

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Optional, Union

from loguru import logger
from sympy import discrete_log, divisors, isprime, is_quad_residue, multiplicity, n_order, primitive_root

from bd_cover.core.config import DEFAULT_PRECISION
from bd_cover.core.errors import (
    BadModulus,
    BadPrime,
    DegenerateInput,
    NotNonSquare,
    PrecisionExhausted,
    UnsupportedParameter,
    ZeroResidue,
)

# Absolute precision carried by an exact zero.
EXACT = 1 << 24

Rational = Union[int, Fraction]
Residue = tuple[int, int]


# ============ Scalars ============

@dataclass(frozen=True, eq=False)
class PadicScalar:
    """Element p^val * unit of Q_p with the unit known modulo p^prec.

    A zero carries prec == 0, unit == 0 and uses ``val`` as its absolute
    precision; ``val >= EXACT`` marks an exact zero.
    """

    p: int
    val: int
    unit: int
    prec: int

    @classmethod
    def zero(cls, p: int, absprec: int = EXACT) -> "PadicScalar":
        return cls(p, min(absprec, EXACT), 0, 0)

    @classmethod
    def from_rational(cls, p: int, x: Rational, prec: int) -> "PadicScalar":
        """Exact rational truncated to ``prec`` relative digits."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p)
        num, den = x.numerator, x.denominator
        vn = multiplicity(p, num)
        vd = multiplicity(p, den)
        mod = p ** prec
        unit = (num // p ** vn) * pow(den // p ** vd, -1, mod) % mod
        return cls(p, vn - vd, unit, prec)

    @property
    def is_zero(self) -> bool:
        return self.prec == 0

    @property
    def is_exact_zero(self) -> bool:
        return self.is_zero and self.val >= EXACT

    @property
    def absprec(self) -> int:
        return self.val if self.is_zero else self.val + self.prec

    def __add__(self, other: "PadicScalar") -> "PadicScalar":
        absprec = min(self.absprec, other.absprec)
        live = [x for x in (self, other) if not x.is_zero]
        if not live:
            return PadicScalar.zero(self.p, absprec)
        v0 = min(x.val for x in live)
        if absprec <= v0:
            return PadicScalar.zero(self.p, absprec)
        k = absprec - v0
        mod = self.p ** k
        total = sum(x.unit * self.p ** (x.val - v0) for x in live if x.val - v0 < k) % mod
        if total == 0:
            return PadicScalar.zero(self.p, absprec)
        shift = multiplicity(self.p, total)
        return PadicScalar(self.p, v0 + shift, total // self.p ** shift, k - shift)

    def __neg__(self) -> "PadicScalar":
        if self.is_zero:
            return self
        return PadicScalar(self.p, self.val, (-self.unit) % self.p ** self.prec, self.prec)

    def __sub__(self, other: "PadicScalar") -> "PadicScalar":
        return self + (-other)

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        if self.is_zero or other.is_zero:
            if self.is_exact_zero or other.is_exact_zero:
                return PadicScalar.zero(self.p)
            if self.is_zero and other.is_zero:
                return PadicScalar.zero(self.p, self.val + other.val)
            zero, live = (self, other) if self.is_zero else (other, self)
            return PadicScalar.zero(self.p, zero.val + live.val)
        prec = min(self.prec, other.prec)
        mod = self.p ** prec
        return PadicScalar(self.p, self.val + other.val, self.unit * other.unit % mod, prec)

    def inverse(self) -> "PadicScalar":
        if self.is_zero:
            raise PrecisionExhausted("cannot invert a value indistinguishable from zero")
        return PadicScalar(self.p, -self.val, pow(self.unit, -1, self.p ** self.prec), self.prec)

    def shift(self, k: int) -> "PadicScalar":
        """Multiply by p^k."""
        if self.is_exact_zero:
            return self
        return PadicScalar(self.p, self.val + k, self.unit, self.prec)

    def residue(self) -> int:
        """Reduction modulo p of an integral scalar."""
        if self.is_zero:
            if self.val < 1:
                raise PrecisionExhausted("residue of an undetermined value")
            return 0
        if self.val < 0:
            raise DegenerateInput("residue of a non-integral value")
        return self.unit % self.p if self.val == 0 else 0

    def is_equal(self, other: "PadicScalar") -> bool:
        return (self - other).is_zero

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return self.is_equal(other)

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        if self.is_zero:
            return "0" if self.is_exact_zero else f"O({self.p}^{self.val})"
        return f"{self.unit}*{self.p}^{self.val}"


# ============ Fields ============

class FieldKind(str, Enum):
    """Which kind of local field an element lives in."""
    BASE = "base"
    UNRAMIFIED = "unramified"
    RAMIFIED = "ramified"


class SquareClass(str, Enum):
    """The four square classes of a p-adic field with p odd."""
    ONE = "1"
    U = "u"
    P = "p"
    UP = "up"

    @classmethod
    def from_bits(cls, odd_valuation: bool, nonsquare_unit: bool) -> "SquareClass":
        return {
            (False, False): cls.ONE,
            (False, True): cls.U,
            (True, False): cls.P,
            (True, True): cls.UP,
        }[(odd_valuation, nonsquare_unit)]

    @property
    def odd_valuation(self) -> bool:
        return self in (SquareClass.P, SquareClass.UP)

    @property
    def nonsquare_unit(self) -> bool:
        return self in (SquareClass.U, SquareClass.UP)

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass.from_bits(
            self.odd_valuation != other.odd_valuation,
            self.nonsquare_unit != other.nonsquare_unit,
        )


@lru_cache(maxsize=None)
def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue modulo p."""
    return next(a for a in range(2, p) if not is_quad_residue(a, p))


@dataclass(frozen=True)
class ResidueField:
    """F_p, or F_p[t]/(t^2 - u) with u the smallest non-residue.

    Elements are pairs (c0, c1) meaning c0 + c1*t.
    """

    p: int
    degree: int = 1

    @property
    def q(self) -> int:
        return self.p ** self.degree

    @property
    def u(self) -> int:
        return smallest_nonresidue(self.p)

    @property
    def one(self) -> Residue:
        return (1, 0)

    def elements(self) -> Iterator[Residue]:
        """Nonzero elements ordered by c0 + c1*p."""
        for index in range(1, self.q):
            yield (index % self.p, index // self.p)

    def mul(self, x: Residue, y: Residue) -> Residue:
        p = self.p
        return ((x[0] * y[0] + self.u * x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p)

    def inv(self, x: Residue) -> Residue:
        if x == (0, 0):
            raise ZeroResidue("zero has no inverse in the residue field")
        if self.degree == 1:
            return (pow(x[0], -1, self.p), 0)
        n = pow((x[0] * x[0] - self.u * x[1] * x[1]) % self.p, -1, self.p)
        return (x[0] * n % self.p, -x[1] * n % self.p)

    def pow(self, x: Residue, e: int) -> Residue:
        if e < 0:
            x, e = self.inv(x), -e
        if self.degree == 1:
            return (pow(x[0], e, self.p), 0)
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def order(self, x: Residue) -> int:
        if x == (0, 0):
            raise ZeroResidue("zero has no multiplicative order")
        if self.degree == 1 or x[1] == 0:
            return n_order(x[0], self.p)
        return next(d for d in divisors(self.q - 1) if self.pow(x, d) == self.one)

    def is_square(self, x: Residue) -> bool:
        return self.pow(x, (self.q - 1) // 2) == self.one

    @lru_cache(maxsize=None)
    def generator_of_order(self, m: int) -> Residue:
        """Canonical generator of the order-m subgroup of the unit group.

        All generators are powers of one primitive element, so that
        generator_of_order(m)^(m/d) == generator_of_order(d) for d | m.
        """
        if (self.q - 1) % m:
            raise BadModulus(f"m={m} does not divide q-1={self.q - 1}")
        if m == 1:
            return self.one
        return self.pow(self.primitive_element(), (self.q - 1) // m)

    @lru_cache(maxsize=None)
    def primitive_element(self) -> Residue:
        """Smallest primitive root mod p; over F_p^2 the first generator with that norm."""
        g = (primitive_root(self.p), 0)
        if self.degree == 1:
            return g
        return next(
            x for x in self.elements()
            if self.order(x) == self.q - 1 and self.pow(x, self.p + 1) == g
        )

    def log(self, x: Residue, m: int) -> int:
        """Exponent k mod m with generator_of_order(m)^k == x."""
        if m == 1:
            return 0
        gen = self.generator_of_order(m)
        if gen[1] == 0 and x[1] == 0:
            return discrete_log(self.p, x[0], gen[0]) % m
        power = self.one
        for k in range(m):
            if power == x:
                return k
            power = self.mul(power, gen)
        raise DegenerateInput(f"{x} is not in the order-{m} subgroup")


@dataclass(frozen=True)
class LocalField:
    """Q_p or a quadratic extension Q_p(sqrt d).

    Attributes:
        p: Odd residue characteristic
        kind: Base field, unramified or ramified quadratic extension
        d: Radicand; 1 for the base, the smallest non-residue for the
            unramified extension, p or u*p for the ramified ones
        precision: Relative precision of coordinates in p-adic digits
    """

    p: int
    kind: FieldKind = FieldKind.BASE
    d: int = 1
    precision: int = DEFAULT_PRECISION

    @property
    def is_base(self) -> bool:
        return self.kind == FieldKind.BASE

    @property
    def e(self) -> int:
        return 2 if self.kind == FieldKind.RAMIFIED else 1

    @property
    def f(self) -> int:
        return 2 if self.kind == FieldKind.UNRAMIFIED else 1

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def base(self) -> "LocalField":
        return LocalField(self.p, FieldKind.BASE, 1, self.precision)

    @cached_property
    def residue_field(self) -> ResidueField:
        return ResidueField(self.p, self.f)

    def scalar(self, x: Rational) -> PadicScalar:
        return PadicScalar.from_rational(self.p, x, self.precision)

    def from_scalars(self, a: PadicScalar, b: Optional[PadicScalar] = None) -> "FieldElement":
        if self.is_base:
            return FieldElement(self, (a,))
        return FieldElement(self, (a, b if b is not None else PadicScalar.zero(self.p)))

    def element(self, x: Union[Rational, str, "FieldElement"], y: Optional[Rational] = None) -> "FieldElement":
        """Build an element from rationals (x + y*sqrt d), a literal, or a base element."""
        if isinstance(x, FieldElement):
            return x.embed(self)
        if isinstance(x, str):
            return self.parse(x)
        if y is None or y == 0:
            return self.from_scalars(self.scalar(x))
        if self.is_base:
            raise UnsupportedParameter("the base field has no sqrt(d) coordinate")
        return self.from_scalars(self.scalar(x), self.scalar(y))

    def zero(self) -> "FieldElement":
        return self.from_scalars(PadicScalar.zero(self.p))

    def one(self) -> "FieldElement":
        return self.element(1)

    def sqrt_d(self) -> "FieldElement":
        if self.is_base:
            raise UnsupportedParameter("the base field has no sqrt(d)")
        return self.from_scalars(PadicScalar.zero(self.p), self.scalar(1))

    def uniformizer(self) -> "FieldElement":
        return self.sqrt_d() if self.kind == FieldKind.RAMIFIED else self.element(self.p)

    def from_residue(self, r: Union[int, Residue]) -> "FieldElement":
        """Integer lift c0 + c1*sqrt(u) of a residue-field element."""
        r0, r1 = (r, 0) if isinstance(r, int) else r
        if r1 and self.kind != FieldKind.UNRAMIFIED:
            raise DegenerateInput("residue field of this field is F_p")
        return self.element(r0, r1)

    def nonsquare_unit(self) -> "FieldElement":
        """Canonical unit that is not a square in this field."""
        if self.kind == FieldKind.UNRAMIFIED:
            res = self.residue_field
            r = next(x for x in res.elements() if not res.is_square(x))
            return teichmuller(self, r)
        return self.element(smallest_nonresidue(self.p))

    def class_rep(self, cls: SquareClass) -> "FieldElement":
        rep = self.one()
        if cls.nonsquare_unit:
            rep = rep * self.nonsquare_unit()
        if cls.odd_valuation:
            rep = rep * self.uniformizer()
        return rep

    def parse(self, text: str) -> "FieldElement":
        """Parse ``a``, ``a+b√D`` or ``b√D`` with rational a, b."""
        match = _LITERAL.match(text.replace(" ", ""))
        if not match or not text.strip():
            raise ValueError(f"cannot parse field literal {text!r}")
        a = Fraction(match["a"]) if match["a"] else Fraction(0)
        if not match["root"]:
            return self.element(a)
        if match["sign"] is None and match["b"] is None and match["a"]:
            a, b = Fraction(0), a
        else:
            b = Fraction(match["b"]) if match["b"] else Fraction(1)
            if match["sign"] == "-":
                b = -b
        return self.element(a, b)

    def __str__(self) -> str:
        if self.is_base:
            return f"Q_{self.p}"
        return f"Q_{self.p}(sqrt({self.d}))"


_LITERAL = re.compile(
    r"^(?P<a>[+-]?\d+(?:/\d+)?)?(?:(?P<sign>[+-])?(?P<b>\d+(?:/\d+)?)?(?P<root>√D|sqrtD))?$"
)


def square_class_of_int(p: int, n: Rational) -> SquareClass:
    x = Fraction(n)
    if x == 0:
        raise DegenerateInput("zero has no square class")
    v = multiplicity(p, x.numerator) - multiplicity(p, x.denominator)
    unit = (x.numerator // p ** multiplicity(p, x.numerator)) * pow(
        x.denominator // p ** multiplicity(p, x.denominator), -1, p
    ) % p
    return SquareClass.from_bits(v % 2 == 1, not is_quad_residue(unit, p))


def make_field(
    p: int,
    kind: Union[FieldKind, str] = FieldKind.BASE,
    precision: Optional[int] = None,
    d: Optional[Rational] = None,
) -> LocalField:
    """Create a fully determined local field.

    Args:
        p: Odd prime
        kind: "base", "unramified" or "ramified"
        precision: Digits of relative precision (default 32)
        d: Radicand; required for ramified extensions (class p or up),
            optional for unramified (must be a non-square unit)

    Returns:
        LocalField with canonical radicand

    Raises:
        BadPrime: p is even or not prime
        NotNonSquare: d is a square
        UnsupportedParameter: d does not match the requested kind
    """
    kind = FieldKind(kind)
    if p < 3 or p % 2 == 0 or not isprime(p):
        raise BadPrime(f"p={p} must be an odd prime")
    precision = precision or DEFAULT_PRECISION
    u = smallest_nonresidue(p)
    if kind == FieldKind.BASE:
        return LocalField(p, kind, 1, precision)
    if kind == FieldKind.UNRAMIFIED:
        if d is not None:
            cls = square_class_of_int(p, d)
            if cls == SquareClass.ONE:
                raise NotNonSquare(f"d={d} is a square in Q_{p}")
            if cls != SquareClass.U:
                raise UnsupportedParameter(f"d={d} gives a ramified extension")
        return LocalField(p, kind, u, precision)
    if d is None:
        raise UnsupportedParameter("a ramified extension needs its radicand class")
    cls = square_class_of_int(p, d)
    if cls == SquareClass.ONE:
        raise NotNonSquare(f"d={d} is a square in Q_{p}")
    if not cls.odd_valuation:
        raise UnsupportedParameter(f"d={d} gives the unramified extension")
    canonical = p if cls == SquareClass.P else u * p
    logger.debug(f"ramified extension of Q_{p} with radicand {canonical}")
    return LocalField(p, kind, canonical, precision)


# ============ Elements ============

@dataclass(frozen=True, eq=False)
class FieldElement:
    """Element of a LocalField as coordinates over Q_p."""

    field: LocalField
    coords: tuple[PadicScalar, ...]

    @property
    def a(self) -> PadicScalar:
        return self.coords[0]

    @property
    def b(self) -> PadicScalar:
        return self.coords[1] if len(self.coords) > 1 else PadicScalar.zero(self.field.p)

    def _radicand(self) -> PadicScalar:
        return self.field.scalar(self.field.d)

    def _coerce(self, other: object) -> Optional["FieldElement"]:
        if isinstance(other, FieldElement):
            if other.field == self.field:
                return other
            if other.field.is_base and other.field == self.field.base:
                return other.embed(self.field)
            return None
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return None

    def embed(self, target: LocalField) -> "FieldElement":
        """View an element of the base field inside ``target``."""
        if target == self.field:
            return self
        if not self.field.is_base or target.base != self.field:
            raise UnsupportedParameter(f"cannot embed {self.field} into {target}")
        return target.from_scalars(self.a)

    def __add__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement) and self.field.is_base:
                return other + self
            return NotImplemented
        return FieldElement(self.field, tuple(x + y for x, y in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, tuple(-x for x in self.coords))

    def __sub__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement) and self.field.is_base:
                return -(other - self)
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "FieldElement":
        return (-self) + other

    def __mul__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement) and self.field.is_base:
                return other * self
            return NotImplemented
        if self.field.is_base:
            return FieldElement(self.field, (self.a * o.a,))
        a = self.a * o.a + self._radicand() * self.b * o.b
        b = self.a * o.b + self.b * o.a
        return FieldElement(self.field, (a, b))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.field.is_base:
            return FieldElement(self.field, (self.a.inverse(),))
        n = self.norm().a
        if n.is_zero:
            raise PrecisionExhausted("cannot invert a value indistinguishable from zero")
        ninv = n.inverse()
        return FieldElement(self.field, (self.a * ninv, -(self.b * ninv)))

    def __truediv__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement) and self.field.is_base:
                return self.embed(other.field) / other
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> "FieldElement":
        return self.inverse() * other

    def __pow__(self, e: int) -> "FieldElement":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = self.field.one()
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "FieldElement":
        """Galois conjugate sqrt(d) -> -sqrt(d)."""
        if self.field.is_base:
            return self
        return FieldElement(self.field, (self.a, -self.b))

    def norm(self) -> "FieldElement":
        """Norm down to the base field."""
        if self.field.is_base:
            return self
        n = self.a * self.a - self._radicand() * self.b * self.b
        return self.field.base.from_scalars(n)

    def trace(self) -> "FieldElement":
        """Trace down to the base field."""
        if self.field.is_base:
            return self
        return self.field.base.from_scalars(self.a + self.a)

    @property
    def is_zero(self) -> bool:
        return all(x.is_zero for x in self.coords)

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero

    __hash__ = None  # type: ignore[assignment]

    def valuation(self) -> int:
        """Normalized valuation v(pi) = 1."""
        if self.field.is_base:
            if self.a.is_zero:
                raise PrecisionExhausted("valuation of a value indistinguishable from zero")
            return self.a.val
        weights = (1, 1) if self.field.e == 1 else (2, 2)
        offsets = (0, 0) if self.field.e == 1 else (0, 1)
        live = [w * x.val + o for x, w, o in zip(self.coords, weights, offsets) if not x.is_zero]
        if not live:
            raise PrecisionExhausted("valuation of a value indistinguishable from zero")
        v = min(live)
        for x, w, o in zip(self.coords, weights, offsets):
            if x.is_zero and w * x.val + o <= v:
                raise PrecisionExhausted("valuation undetermined at tracked precision")
        return v

    def valuation_unit(self) -> tuple[int, "FieldElement"]:
        """Split off a uniformizer power: x = pi^v * u."""
        v = self.valuation()
        if self.field.e == 1:
            return v, FieldElement(self.field, tuple(x.shift(-v) for x in self.coords))
        k, odd = divmod(v, 2)
        dk = self._radicand().inverse()
        scale = PadicScalar.from_rational(self.field.p, 1, self.field.precision)
        for _ in range(abs(k)):
            scale = scale * (dk if k > 0 else self._radicand())
        a, b = self.a * scale, self.b * scale
        if odd:
            a, b = b, a * self._radicand().inverse()
        return v, FieldElement(self.field, (a, b))

    def residue(self) -> Residue:
        """Reduction of an integral element to the residue field."""
        if self.field.kind == FieldKind.UNRAMIFIED:
            return (self.a.residue(), self.b.residue())
        if self.field.kind == FieldKind.RAMIFIED and not self.b.is_zero and self.b.val < 0:
            raise DegenerateInput("residue of a non-integral value")
        return (self.a.residue(), 0)

    def unit_residue(self) -> Residue:
        """Residue of the unit part of a nonzero element."""
        return self.valuation_unit()[1].residue()

    def __str__(self) -> str:
        if self.field.is_base:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.field.d})"

    __repr__ = __str__


def valuation_unit(x: FieldElement) -> tuple[int, FieldElement]:
    return x.valuation_unit()


def square_class(x: FieldElement) -> SquareClass:
    """Square class of a nonzero element, labelled relative to its own field."""
    v, _ = x.valuation_unit()
    r = x.unit_residue()
    return SquareClass.from_bits(v % 2 == 1, not x.field.residue_field.is_square(r))


@lru_cache(maxsize=4096)
def teichmuller(field: LocalField, r: Union[int, Residue]) -> FieldElement:
    """Teichmuller lift of a nonzero residue, by iterating x -> x^q."""
    r = (r % field.p, 0) if isinstance(r, int) else (r[0] % field.p, r[1] % field.p)
    if r == (0, 0):
        raise ZeroResidue("the Teichmuller lift of zero is undefined")
    x = field.from_residue(r)
    for _ in range(field.precision + 2):
        nxt = x ** field.q
        if nxt == x:
            return nxt
        x = nxt
    return x


# ============ Roots of unity ============

@dataclass(frozen=True)
class RootOfUnity:
    """exp(2*pi*i*angle) with a rational angle in [0, 1)."""

    angle: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        a = Fraction(self.angle)
        object.__setattr__(self, "angle", a - (a.numerator // a.denominator))

    @classmethod
    def one(cls) -> "RootOfUnity":
        return cls(Fraction(0))

    @classmethod
    def from_sign(cls, s: int) -> "RootOfUnity":
        return cls(Fraction(0) if s == 1 else Fraction(1, 2))

    @property
    def num(self) -> int:
        return self.angle.numerator

    @property
    def den(self) -> int:
        return self.angle.denominator

    @property
    def order(self) -> int:
        return self.den

    @property
    def is_one(self) -> bool:
        return self.angle == 0

    @property
    def sign(self) -> int:
        if self.den > 2:
            raise DegenerateInput(f"{self} is not a sign")
        return 1 if self.angle == 0 else -1

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        if isinstance(other, MuM):
            other = other.to_root()
        return RootOfUnity(self.angle + other.angle)

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.angle)

    def __truediv__(self, other: "RootOfUnity") -> "RootOfUnity":
        return self * other.inverse()

    def __pow__(self, e: int) -> "RootOfUnity":
        return RootOfUnity(self.angle * e)

    def __str__(self) -> str:
        return f"e({self.num}/{self.den})"


@dataclass(frozen=True)
class MuM:
    """Element of mu_m written as an exponent of the canonical generator."""

    m: int
    exp: int = 0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise BadModulus(f"m={self.m} must be positive")
        object.__setattr__(self, "exp", self.exp % self.m)

    @classmethod
    def identity(cls, m: int) -> "MuM":
        return cls(m, 0)

    @classmethod
    def from_sign(cls, m: int, s: int) -> "MuM":
        """+1 or -1 as an element of mu_m (-1 needs m even)."""
        if s == 1:
            return cls(m, 0)
        if m % 2:
            raise BadModulus(f"-1 is not in mu_{m}")
        return cls(m, m // 2)

    @property
    def is_one(self) -> bool:
        return self.exp == 0

    @property
    def sign(self) -> int:
        if (2 * self.exp) % self.m:
            raise DegenerateInput(f"{self} is not a sign")
        return 1 if self.exp == 0 else -1

    def _check(self, other: "MuM") -> None:
        if other.m != self.m:
            raise BadModulus(f"mixing mu_{self.m} with mu_{other.m}")

    def __mul__(self, other: "MuM") -> "MuM":
        self._check(other)
        return MuM(self.m, self.exp + other.exp)

    def __truediv__(self, other: "MuM") -> "MuM":
        self._check(other)
        return MuM(self.m, self.exp - other.exp)

    def inverse(self) -> "MuM":
        return MuM(self.m, -self.exp)

    def __pow__(self, e: int) -> "MuM":
        return MuM(self.m, self.exp * e)

    def push(self, n: int) -> "MuM":
        """Image under mu_m -> mu_n for a multiple n of m."""
        if n % self.m:
            raise BadModulus(f"cannot push mu_{self.m} into mu_{n}")
        return MuM(n, self.exp * (n // self.m))

    def to_root(self) -> RootOfUnity:
        return RootOfUnity(Fraction(self.exp, self.m))

    def __str__(self) -> str:
        return f"zeta_{self.m}^{self.exp}"


# ============ Additive characters ============

@dataclass(frozen=True)
class AdditiveCharacter:
    """psi_c(x) = e(frac_p(c*x / p^(level+1))) on the base field.

    Trivial on p^(level+1) O, nontrivial on p^level O. On a quadratic
    extension the character is psi composed with the trace.
    """

    field: LocalField
    level: int = 0
    twist: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "twist", Fraction(self.twist))
        if self.twist == 0:
            raise DegenerateInput("additive character twist must be nonzero")
        if not self.field.is_base:
            object.__setattr__(self, "field", self.field.base)

    def twisted(self, c: Rational) -> "AdditiveCharacter":
        """psi_c: x -> psi(c*x)."""
        return AdditiveCharacter(self.field, self.level, self.twist * Fraction(c))


def psi_eval(psi: AdditiveCharacter, x: FieldElement) -> RootOfUnity:
    """Evaluate an additive character exactly.

    Raises:
        PrecisionExhausted: principal-part digits are not all determined
    """
    t = (x.trace() if not x.field.is_base else x) * psi.twist
    s = t.a
    cutoff = psi.level + 1
    if s.is_zero:
        if s.val >= cutoff:
            return RootOfUnity.one()
        raise PrecisionExhausted("principal part of psi argument undetermined")
    if s.val >= cutoff:
        return RootOfUnity.one()
    k = cutoff - s.val
    if s.prec < k:
        raise PrecisionExhausted(f"need {k} digits, have {s.prec}")
    mod = psi.field.p ** k
    return RootOfUnity(Fraction(s.unit % mod, mod))
