"""The degree-m Kubota cover of GL(2, F) and its blockwise product over tori.

Elements are pairs (zeta, g) standing for zeta * s(g), where s is the
preferred section and s(x) s(y) = c(x, y) s(xy) with c the inverse of the
classical Kubota cocycle.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence, Union

import numpy as np
from loguru import logger

from bd_cover.core.errors import BadModulus, DegenerateInput, PrecisionExhausted
from bd_cover.core.etale import (
    EtaleElement,
    NormOneElement,
    QuadEtale,
    in_pm_iota_image,
    resolve_hilbert90,
)
from bd_cover.core.localfield import (
    AdditiveCharacter,
    FieldElement,
    LocalField,
    MuM,
    RootOfUnity,
)
from bd_cover.core.quadforms import DiagQuadForm, weil_index
from bd_cover.core.sampling import random_nonzero, random_sign
from bd_cover.core.symbols import check_modulus, hilbert2, hilbert_m

Entry = Union[FieldElement, int, Fraction]


# ============ GL(2) ============

@dataclass(frozen=True, eq=False)
class GL2Element:
    """Invertible matrix [[a, b], [c, d]] over the base field."""

    field: LocalField
    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    def __post_init__(self) -> None:
        if self.det.is_zero:
            raise DegenerateInput("matrix is not invertible at tracked precision")

    @classmethod
    def of(cls, F: LocalField, a: Entry, b: Entry, c: Entry, d: Entry) -> "GL2Element":
        conv = lambda x: x.embed(F) if isinstance(x, FieldElement) else F.element(x)
        return cls(F, conv(a), conv(b), conv(c), conv(d))

    @classmethod
    def identity(cls, F: LocalField) -> "GL2Element":
        return cls.of(F, 1, 0, 0, 1)

    @classmethod
    def diag(cls, F: LocalField, x: Entry, y: Entry) -> "GL2Element":
        return cls.of(F, x, 0, 0, y)

    @classmethod
    def scalar(cls, F: LocalField, x: Entry) -> "GL2Element":
        return cls.diag(F, x, x)

    @classmethod
    def weyl(cls, F: LocalField) -> "GL2Element":
        return cls.of(F, 0, -1, 1, 0)

    @property
    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> FieldElement:
        return self.a + self.d

    def __matmul__(self, other: "GL2Element") -> "GL2Element":
        return GL2Element(
            self.field,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GL2Element":
        inv = self.det.inverse()
        return GL2Element(self.field, self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def conj(self, h: "GL2Element") -> "GL2Element":
        """h g h^-1."""
        return h @ self @ h.inverse()

    def scaled(self, x: Entry) -> "GL2Element":
        return GL2Element(self.field, self.a * x, self.b * x, self.c * x, self.d * x)

    def x_entry(self) -> FieldElement:
        """Lower-left entry if nonzero, else lower-right."""
        return self.d if self.c.is_zero else self.c

    def entries(self) -> tuple[FieldElement, FieldElement, FieldElement, FieldElement]:
        return self.a, self.b, self.c, self.d

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GL2Element):
            return NotImplemented
        return all(x == y for x, y in zip(self.entries(), other.entries()))

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_scalar(self) -> bool:
        return self.b.is_zero and self.c.is_zero and self.a == self.d

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def torus_matrix(x: EtaleElement) -> GL2Element:
    """Matrix model of K in M_2(F): diagonal when split, a + b sqrt D -> [[a, bD], [b, a]]."""
    K = x.algebra
    F = K.base
    if K.is_split:
        return GL2Element.diag(F, *x.parts)
    a, b = x.coords()
    return GL2Element(F, a, b * K.D, b, a)


# ============ Kubota cocycle ============

def kubota_c(g1: GL2Element, g2: GL2Element, m: int) -> MuM:
    """c(g1, g2) = (x(g1)/x(g1 g2), det(g1) x(g2)/x(g1 g2))_{F,m}^-1."""
    F = g1.field
    x12 = (g1 @ g2).x_entry()
    first = g1.x_entry() / x12
    second = g1.det * g2.x_entry() / x12
    return hilbert_m(F, m, first, second).inverse()


@dataclass(frozen=True, eq=False)
class CoverElement:
    """zeta * s(g) in the degree-m cover of GL(2, F)."""

    g: GL2Element
    zeta: MuM

    @property
    def m(self) -> int:
        return self.zeta.m

    @property
    def field(self) -> LocalField:
        return self.g.field

    @classmethod
    def section(cls, g: GL2Element, m: int) -> "CoverElement":
        check_modulus(g.field, m)
        return cls(g, MuM(m, 0))

    @classmethod
    def identity(cls, F: LocalField, m: int) -> "CoverElement":
        return cls.section(GL2Element.identity(F), m)

    def __mul__(self, other: "CoverElement") -> "CoverElement":
        return CoverElement(self.g @ other.g, self.zeta * other.zeta * kubota_c(self.g, other.g, self.m))

    def inverse(self) -> "CoverElement":
        ginv = self.g.inverse()
        return CoverElement(ginv, self.zeta.inverse() * kubota_c(self.g, ginv, self.m).inverse())

    def twist(self, zeta: MuM) -> "CoverElement":
        return CoverElement(self.g, self.zeta * zeta)

    def __pow__(self, n: int) -> "CoverElement":
        base = self if n >= 0 else self.inverse()
        result = CoverElement.identity(self.field, self.m)
        for _ in range(abs(n)):
            result = result * base
        return result

    def conj(self, h: GL2Element) -> "CoverElement":
        """s(h) * self * s(h)^-1; independent of the lift of h."""
        sh = CoverElement.section(h, self.m)
        return sh * self * sh.inverse()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoverElement):
            return NotImplemented
        return self.zeta == other.zeta and self.g == other.g

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return f"({self.zeta}, {self.g})"


def cover_mul(x: CoverElement, y: CoverElement) -> CoverElement:
    return x * y


def cover_inv(x: CoverElement) -> CoverElement:
    return x.inverse()


def commutator(g: GL2Element, gamma: CoverElement) -> MuM:
    """[g, gamma] with s(g) gamma s(g)^-1 = [g, gamma] gamma.

    Raises:
        DegenerateInput: g does not commute with the image of gamma
    """
    conjugated = gamma.conj(g)
    if not conjugated.g == gamma.g:
        raise DegenerateInput("commutator needs g to centralize the image of gamma")
    return conjugated.zeta / gamma.zeta


# ============ Torus symbols ============

def flicker_symbol(x: NormOneElement, u: EtaleElement, m: int) -> MuM:
    """(x, tau(u))_{K,m}, componentwise for the split algebra.

    This is the commutator [M(u), s(M(x))] in the matrix model.
    """
    K = x.algebra
    tu = u.tau()
    if K.is_split:
        F = K.base
        return hilbert_m(F, m, x.value.parts[0], tu.parts[0]) * hilbert_m(F, m, x.value.parts[1], tu.parts[1])
    return hilbert_m(K.field, m, x.value.parts[0], tu.parts[0])


def norm_symbol(x0: NormOneElement, det: FieldElement, m: int, omega: Optional[EtaleElement] = None) -> MuM:
    """(N(omega), det)_{F,gcd(2,m)} pushed into mu_m, omega from Hilbert 90 for x0.

    Any solution omega may be passed; N(omega) is fixed up to squares.
    """
    if gcd(2, m) == 1:
        return MuM(m, 0)
    F = x0.algebra.base
    return MuM.from_sign(m, hilbert2(F, resolve_hilbert90(x0, omega).norm(), det))


# ============ Good elements ============

def is_good(K: QuadEtale, x: NormOneElement, m: int) -> bool:
    """Whether s(M(x)) is good, i.e. x in {+-1} * iota(K^1).

    Raises:
        NotRegular: x = +-1
    """
    if x.algebra != K:
        raise DegenerateInput("element does not belong to the given algebra")
    x.require_regular()
    check_modulus(K.base, m)
    good = in_pm_iota_image(m, x)
    logger.debug(f"is_good m={m} in {K}: {x} -> {good}")
    return good


# ============ Lifts of -1 ============

@dataclass(frozen=True)
class EnlargedRoot:
    """Kernel coordinate of a lift of -1 in the push-out to mu_lcm(4, m)."""

    root: RootOfUnity
    m: int
    n_blocks: int = 1

    @property
    def modulus(self) -> int:
        return lcm(4, self.m)

    def __post_init__(self) -> None:
        if self.modulus % self.root.order:
            raise BadModulus(f"{self.root} is not in mu_{self.modulus}")

    def squared(self) -> RootOfUnity:
        """Kernel part of the square of the lift, using c(-1, -1) in each block."""
        return self.root ** 2


def minus_one_tilde(m: int, psi: Optional[AdditiveCharacter], n_blocks: int = 1, F: Optional[LocalField] = None) -> EnlargedRoot:
    """Distinguished lift of -1 as a kernel coordinate against s(-1) in every block.

    Per block the coordinate is (-1,-1)_{F,m}, times gamma_psi(<1,1>)^-1
    when m = 2 mod 4; blocks multiply.

    Args:
        m: Cover degree
        psi: Additive character; required when m = 2 mod 4, otherwise
            only used to supply the base field
        n_blocks: Number of SL(2) blocks of the torus
        F: Base field, read from psi when omitted; needed only when psi is
            None, which is allowed for m odd or 4 | m

    Raises:
        BadModulus: m does not divide q - 1, psi is None with m = 2 mod 4,
            or both psi and F are None
        DegenerateInput: F differs from the field of psi
    """
    if F is None:
        if psi is None:
            raise BadModulus("minus_one_tilde needs the base field")
        F = psi.field
    elif psi is not None and psi.field != F:
        raise DegenerateInput(f"psi lives over {psi.field}, not {F}")
    check_modulus(F, m)
    block = hilbert_m(F, m, -1, -1).to_root()
    if m % 4 == 2:
        if psi is None:
            raise BadModulus("m = 2 mod 4 needs an additive character")
        block = block / weil_index(psi, DiagQuadForm.of(F, [1, 1]))
    return EnlargedRoot(block ** n_blocks, m, n_blocks)


def minus_one_square_kernel(F: LocalField, m: int, lift: EnlargedRoot) -> RootOfUnity:
    """Kernel part of (lift * s(-1))^2 per all blocks."""
    minus = GL2Element.scalar(F, -1)
    c = kubota_c(minus, minus, m).to_root() ** lift.n_blocks
    return lift.squared() * c


# ============ Blockwise covers ============

@dataclass(frozen=True, eq=False)
class BlockCoverElement:
    """Contracted product of rank-one covers: one kernel coordinate, many SL(2) blocks."""

    blocks: tuple[GL2Element, ...]
    zeta: MuM

    @property
    def m(self) -> int:
        return self.zeta.m

    @classmethod
    def section(cls, blocks: Sequence[GL2Element], m: int) -> "BlockCoverElement":
        return cls(tuple(blocks), MuM(m, 0))

    def block(self, i: int) -> CoverElement:
        """Block i as a rank-one cover element carrying the whole kernel part."""
        return CoverElement(self.blocks[i], self.zeta)

    def __mul__(self, other: "BlockCoverElement") -> "BlockCoverElement":
        zeta = self.zeta * other.zeta
        for g, h in zip(self.blocks, other.blocks):
            zeta = zeta * kubota_c(g, h, self.m)
        return BlockCoverElement(tuple(g @ h for g, h in zip(self.blocks, other.blocks)), zeta)

    def inverse(self) -> "BlockCoverElement":
        zeta = self.zeta.inverse()
        for g in self.blocks:
            zeta = zeta * kubota_c(g, g.inverse(), self.m).inverse()
        return BlockCoverElement(tuple(g.inverse() for g in self.blocks), zeta)

    def twist(self, zeta: MuM) -> "BlockCoverElement":
        return BlockCoverElement(self.blocks, self.zeta * zeta)

    def conj(self, hs: Sequence[GL2Element]) -> "BlockCoverElement":
        """Blockwise s(h_i) * self * s(h_i)^-1."""
        zeta = self.zeta
        blocks = []
        for g, h in zip(self.blocks, hs):
            conjugated = CoverElement(g, MuM(self.m, 0)).conj(h)
            zeta = zeta * conjugated.zeta
            blocks.append(conjugated.g)
        return BlockCoverElement(tuple(blocks), zeta)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockCoverElement):
            return NotImplemented
        return self.zeta == other.zeta and all(g == h for g, h in zip(self.blocks, other.blocks))

    __hash__ = None  # type: ignore[assignment]


# ============ Sampling ============

def random_gl2(F: LocalField, rng: np.random.Generator, zero_rate: float = 0.15) -> GL2Element:
    """Random invertible matrix; entries vanish with probability ``zero_rate``."""
    while True:
        entries = [
            F.zero() if rng.random() < zero_rate else random_nonzero(F, rng, -1, 2)
            for _ in range(4)
        ]
        det = entries[0] * entries[3] - entries[1] * entries[2]
        if det.is_zero:
            continue
        try:
            det.valuation()
        except PrecisionExhausted:
            continue
        return GL2Element(F, *entries)


def random_sl2(F: LocalField, rng: np.random.Generator, zero_rate: float = 0.15) -> GL2Element:
    """Random element of SL(2, F)."""
    a = random_nonzero(F, rng, -1, 2)
    b = F.zero() if rng.random() < zero_rate else random_nonzero(F, rng, -1, 2)
    c = F.zero() if rng.random() < zero_rate else random_nonzero(F, rng, -1, 2)
    d = (b * c + 1) / a
    return GL2Element(F, a, b, c, d)


def random_torus_unit(K: QuadEtale, rng: np.random.Generator) -> EtaleElement:
    """Random invertible u in K, used as a centralizing element M(u)."""
    F = K.base
    while True:
        a = random_nonzero(F, rng, -1, 1)
        b = F.zero() if rng.random() < 0.2 else random_nonzero(F, rng, -1, 1)
        u = K.element(a, b * random_sign(rng))
        if u.is_invertible and not u.norm().is_zero:
            return u
