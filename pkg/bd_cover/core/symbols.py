"""Tame Hilbert symbols, norm characters and the rational product formula."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Union

from loguru import logger
from sympy import factorint

from bd_cover.core.errors import BadModulus, DegenerateInput
from bd_cover.core.localfield import (
    FieldElement,
    LocalField,
    MuM,
    Rational,
    Residue,
    make_field,
)

if TYPE_CHECKING:
    from bd_cover.core.etale import QuadEtale

Operand = Union[FieldElement, int, Fraction]


def _as_element(F: LocalField, x: Operand) -> FieldElement:
    if isinstance(x, FieldElement):
        return x.embed(F)
    return F.element(x)


def check_modulus(F: LocalField, m: int) -> None:
    """Raise BadModulus unless mu_m lives in the residue field of F."""
    if m < 1 or (F.q - 1) % m:
        raise BadModulus(f"m={m} must divide q-1={F.q - 1}")


def tame_residue(F: LocalField, a: Operand, b: Operand) -> Residue:
    """Residue of (-1)^(v(a)v(b)) a^v(b) b^(-v(a))."""
    a, b = _as_element(F, a), _as_element(F, b)
    va, ua = a.valuation_unit()
    vb, ub = b.valuation_unit()
    res = F.residue_field
    s = res.mul(res.pow(ua.residue(), vb), res.pow(ub.residue(), -va))
    if (va * vb) % 2:
        s = ((-s[0]) % F.p, (-s[1]) % F.p)
    return s


def hilbert_m(F: LocalField, m: int, a: Operand, b: Operand) -> MuM:
    """Degree-m tame Hilbert symbol (a, b)_{F,m}.

    Args:
        F: Field the symbol is taken over
        m: Degree, dividing q - 1
        a: First entry, nonzero
        b: Second entry, nonzero

    Returns:
        Exponent of the canonical generator of mu_m

    Raises:
        BadModulus: m does not divide q - 1
        PrecisionExhausted: an entry is indistinguishable from zero
    """
    check_modulus(F, m)
    if m == 1:
        return MuM(1, 0)
    s = tame_residue(F, a, b)
    res = F.residue_field
    w = res.pow(s, (F.q - 1) // m)
    return MuM(m, res.log(w, m))


def hilbert2(F: LocalField, a: Operand, b: Operand) -> int:
    """Quadratic Hilbert symbol as +1 or -1."""
    s = tame_residue(F, a, b)
    return 1 if F.residue_field.is_square(s) else -1


def sgn_quadratic(K: "QuadEtale", x: Operand) -> int:
    """+1 iff x is a norm from the quadratic etale algebra K."""
    if K.is_split:
        return 1
    return hilbert2(K.base, x, K.base.element(K.D))


def chi_c(F: LocalField, c: Operand, x: Operand) -> int:
    """Quadratic twist character x -> (x, c)_{F,2}."""
    return hilbert2(F, x, c)


# ============ Product formula ============

def _two_adic_symbol(a: Fraction, b: Fraction) -> int:
    def split(x: Fraction) -> tuple[int, int]:
        num, den = x.numerator, x.denominator
        alpha = 0
        while num % 2 == 0:
            num, alpha = num // 2, alpha + 1
        while den % 2 == 0:
            den, alpha = den // 2, alpha - 1
        return alpha, num * pow(den, -1, 8) % 8

    alpha, u = split(a)
    beta, v = split(b)
    eps = lambda t: ((t - 1) // 2) % 2
    omega = lambda t: ((t * t - 1) // 8) % 2
    exponent = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if exponent % 2 else 1


@dataclass
class ProductFormulaReport:
    """Local quadratic symbols of a rational pair at every relevant place."""

    a: Fraction
    b: Fraction
    places: dict[str, int] = field(default_factory=dict)

    @property
    def product(self) -> int:
        result = 1
        for value in self.places.values():
            result *= value
        return result

    @property
    def holds(self) -> bool:
        return self.product == 1

    def to_dict(self) -> dict:
        return {
            "a": str(self.a),
            "b": str(self.b),
            "places": dict(self.places),
            "product": self.product,
            "holds": self.holds,
        }


def product_formula_check(a: Rational, b: Rational, precision: int = 16) -> ProductFormulaReport:
    """Evaluate (a, b)_v at infinity, 2 and each odd prime dividing a or b."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise DegenerateInput("product formula needs nonzero rationals")
    report = ProductFormulaReport(a, b)
    report.places["inf"] = -1 if (a < 0 and b < 0) else 1
    report.places["2"] = _two_adic_symbol(a, b)
    primes: set[int] = set()
    for n in (a.numerator, a.denominator, b.numerator, b.denominator):
        primes.update(q for q in factorint(abs(n)) if q > 2)
    for q in sorted(primes):
        report.places[str(q)] = hilbert2(make_field(q, precision=precision), a, b)
    if not report.holds:
        logger.error(f"product formula fails for ({a}, {b}): {report.places}")
    return report
