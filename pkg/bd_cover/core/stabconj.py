"""Torus parameters, stable-conjugacy invariants and calibrated conjugation CAd.

A maximal torus of Sp(2n) is given by blocks (K_i, c_i) with K_i quadratic
etale over F and tau(c_i) = -c_i. A calibrated element stores, per block, a
frame h_i so that the block embedding is t -> h_i M(t) h_i^-1, with M the
matrix model of K_i; CAd(g) moves the frame to g_i h_i.
"""

from dataclasses import dataclass, replace
from itertools import permutations
from math import gcd
from typing import Optional, Sequence, Union

from loguru import logger

from bd_cover.core.cover import (
    BlockCoverElement,
    CoverElement,
    GL2Element,
    torus_matrix,
)
from bd_cover.core.errors import BadSign, DegenerateInput, NotRegular, UnsupportedParameter
from bd_cover.core.etale import (
    EtaleElement,
    NormOneElement,
    QuadEtale,
    hilbert90_solve,
    iota,
    make_etale,
)
from bd_cover.core.localfield import FieldElement, LocalField, MuM, Rational
from bd_cover.core.symbols import hilbert2, sgn_quadratic


# ============ Parameters ============

@dataclass(frozen=True, eq=False)
class TorusBlock:
    """(K_i, c_i) with c_i = c' sqrt D, or (c', -c') when split."""

    algebra: QuadEtale
    c_prime: FieldElement

    def __post_init__(self) -> None:
        if self.c_prime.is_zero:
            raise DegenerateInput("torus parameter c must be nonzero")

    @property
    def is_field(self) -> bool:
        return not self.algebra.is_split

    @property
    def c(self) -> EtaleElement:
        return self.algebra.sqrt_D() * self.c_prime

    def with_c(self, c_prime: FieldElement) -> "TorusBlock":
        return TorusBlock(self.algebra, c_prime)


@dataclass(frozen=True, eq=False)
class TorusParam:
    """Maximal torus of Sp(2n) as a list of rank-one blocks over F."""

    base: LocalField
    blocks: tuple[TorusBlock, ...]

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def field_indices(self) -> list[int]:
        """I_0: the blocks whose algebra is a field."""
        return [i for i, b in enumerate(self.blocks) if b.is_field]

    @property
    def is_anisotropic(self) -> bool:
        return all(b.is_field for b in self.blocks)

    def relabel(self, perm: Sequence[int]) -> "TorusParam":
        return TorusParam(self.base, tuple(self.blocks[i] for i in perm))

    def scale_c(self, factors: Sequence[FieldElement]) -> "TorusParam":
        return TorusParam(
            self.base, tuple(b.with_c(b.c_prime * f) for b, f in zip(self.blocks, factors))
        )


def make_torus_param(
    F: LocalField,
    blocks: Sequence[tuple[Union[None, str, Rational], Union[FieldElement, Rational]]],
    k_sharp_degrees: Optional[Sequence[int]] = None,
) -> TorusParam:
    """Build a torus parameter from (D, c') pairs; D None or "split" for split blocks.

    Raises:
        UnsupportedParameter: some K_i^# is a proper extension of F
    """
    if k_sharp_degrees and any(d != 1 for d in k_sharp_degrees):
        raise UnsupportedParameter("only blocks with K^# = F are supported")
    built = []
    for D, c in blocks:
        K = make_etale(F, D)
        c = c.embed(F) if isinstance(c, FieldElement) else F.element(c)
        built.append(TorusBlock(K, c))
    return TorusParam(F.base, tuple(built))


@dataclass(frozen=True, eq=False)
class RegClassParam:
    """Regular semisimple class: a torus parameter and a regular x_i in each K_i^1."""

    torus: TorusParam
    xs: tuple[NormOneElement, ...]

    def __post_init__(self) -> None:
        if len(self.xs) != self.torus.n:
            raise DegenerateInput("one norm-one element per block is required")
        for b, x in zip(self.torus.blocks, self.xs):
            if x.algebra != b.algebra:
                raise DegenerateInput("x_i must lie in K_i^1")
            if not x.is_regular:
                raise NotRegular(f"x = {x} is not regular")


# ============ inv and kappa ============

@dataclass(frozen=True, eq=False)
class InvClass:
    """Class of (nu_i) in prod over field blocks of F^x / N(K_i^x)."""

    param: TorusParam
    nus: tuple[FieldElement, ...]

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(
            sgn_quadratic(self.param.blocks[i].algebra, nu)
            for i, nu in zip(self.param.field_indices, self.nus)
        )

    @property
    def is_trivial(self) -> bool:
        return all(s == 1 for s in self.signs)

    def labels(self) -> list[str]:
        return ["1" if s == 1 else "-1" for s in self.signs]


def inv_of(param: TorusParam, gs: Sequence[GL2Element]) -> InvClass:
    """inv of the stable conjugacy realized by per-block PGL(2) elements."""
    if len(gs) != param.n:
        raise DegenerateInput("one matrix per block is required")
    return InvClass(param, tuple(gs[i].det for i in param.field_indices))


def kappa_eval(sign: str, param: TorusParam, inv: InvClass) -> int:
    """kappa_+ is trivial; kappa_- is the product of sgn_{K_i/F} over field blocks."""
    if sign not in ("+", "-"):
        raise BadSign(f"unknown kappa sign {sign!r}")
    if sign == "+":
        return 1
    result = 1
    for s in inv.signs:
        result *= s
    return result


# ============ Calibration ============

def cali_factor(m: int, nu: FieldElement, gamma0: NormOneElement) -> int:
    """C_m(nu, gamma0) = (N(omega), nu)_{F, gcd(2, m)} with omega / tau(omega) = gamma0."""
    if gcd(2, m) == 1:
        return 1
    F = gamma0.algebra.base
    return hilbert2(F, hilbert90_solve(gamma0).norm(), nu)


def check_signs(m: int, sigma: Sequence[int]) -> tuple[int, ...]:
    """Validate a sign vector against m.

    Raises:
        BadSign: a minus sign while 4 does not divide m
    """
    sigma = tuple(sigma)
    if any(s not in (1, -1) for s in sigma):
        raise BadSign(f"signs must be +1 or -1, got {sigma}")
    if m % 4 and any(s == -1 for s in sigma):
        raise BadSign(f"minus signs need 4 | m, got m={m}")
    return sigma


@dataclass(frozen=True, eq=False)
class CalibratedElement:
    """(delta~, delta_0) with image(delta~) = sigma * iota(delta_0) blockwise."""

    param: TorusParam
    m: int
    cover: BlockCoverElement
    delta0: tuple[NormOneElement, ...]
    sigma: tuple[int, ...]
    frames: tuple[GL2Element, ...]

    @property
    def zeta(self) -> MuM:
        return self.cover.zeta

    def block_image(self, i: int) -> GL2Element:
        """Expected image h_i M(sigma_i iota(delta0_i)) h_i^-1."""
        t = iota(self.m, self.delta0[i]).value * self.sigma[i]
        return torus_matrix(t).conj(self.frames[i])

    @property
    def is_well_formed(self) -> bool:
        return all(self.cover.blocks[i] == self.block_image(i) for i in range(self.param.n))

    def twist(self, zeta: MuM) -> "CalibratedElement":
        return replace(self, cover=self.cover.twist(zeta))

    def __mul__(self, other: "CalibratedElement") -> "CalibratedElement":
        if not all(h == k for h, k in zip(self.frames, other.frames)):
            raise DegenerateInput("calibrated elements live on different tori")
        return CalibratedElement(
            self.param,
            self.m,
            self.cover * other.cover,
            tuple(x * y for x, y in zip(self.delta0, other.delta0)),
            tuple(s * t for s, t in zip(self.sigma, other.sigma)),
            self.frames,
        )

    def same_as(self, other: "CalibratedElement") -> bool:
        """Equality of the pair (delta~, delta_0) and of the underlying torus."""
        return (
            self.cover == other.cover
            and all(x == y for x, y in zip(self.delta0, other.delta0))
            and self.sigma == other.sigma
        )


def calibrated(
    param: TorusParam,
    m: int,
    delta0: Sequence[NormOneElement],
    sigma: Optional[Sequence[int]] = None,
    zeta: Optional[MuM] = None,
    frames: Optional[Sequence[GL2Element]] = None,
) -> CalibratedElement:
    """zeta * s(image) over sigma * iota(delta0), in the given frames (default identity)."""
    F = param.base
    sigma = check_signs(m, sigma if sigma is not None else [1] * param.n)
    frames = tuple(frames) if frames is not None else tuple(GL2Element.identity(F) for _ in range(param.n))
    for b, x in zip(param.blocks, delta0):
        if x.algebra != b.algebra:
            raise DegenerateInput("delta_0 must lie in the torus blocks")
    elem = CalibratedElement(
        param, m, BlockCoverElement.section([], m), tuple(delta0), sigma, frames
    )
    blocks = tuple(elem.block_image(i) for i in range(param.n))
    return replace(elem, cover=BlockCoverElement(blocks, zeta if zeta is not None else MuM(m, 0)))


def _minus_one_section(F: LocalField, m: int) -> CoverElement:
    return CoverElement.section(GL2Element.scalar(F, -1), m)


def cad_sigma(
    m: int,
    gs: Sequence[GL2Element],
    sigma: Sequence[int],
    elem: CalibratedElement,
) -> CalibratedElement:
    """Calibrated stable conjugation CAd^sigma(g) on T~^sigma.

    Blocks with sigma_i = + are conjugated through the cover and twisted by
    C_m(det g_i, delta0_i). Blocks with sigma_i = - are written as
    s(-1) * t~ with t~ over iota(delta0_i); only t~ is conjugated.

    Raises:
        BadSign: sigma has a minus sign while 4 does not divide m, or
            disagrees with the element's signs
    """
    sigma = check_signs(m, sigma)
    if sigma != elem.sigma:
        raise BadSign(f"sign vector {sigma} does not match the element's {elem.sigma}")
    if m != elem.m:
        raise DegenerateInput("degree mismatch")
    F = elem.param.base
    zeta = elem.zeta
    blocks = []
    for i, g in enumerate(gs):
        block = CoverElement.section(elem.cover.blocks[i], m)
        C = MuM.from_sign(m, cali_factor(m, g.det, elem.delta0[i]))
        if sigma[i] == 1:
            moved = block.conj(g)
        else:
            minus = _minus_one_section(F, m)
            moved = minus * (minus.inverse() * block).conj(g)
        zeta = zeta * moved.zeta * C
        blocks.append(moved.g)
    frames = tuple(g @ h for g, h in zip(gs, elem.frames))
    logger.trace(f"CAd^{sigma} moved kernel {elem.zeta} -> {zeta}")
    return CalibratedElement(
        elem.param, m, BlockCoverElement(tuple(blocks), zeta), elem.delta0, sigma, frames
    )


def minus_one_shift(elem: CalibratedElement, i: int, lift: Optional[MuM] = None) -> CalibratedElement:
    """Multiply block i by the lift lift * s(-1) of -1.

    For 4 | m the block keeps delta0_i and its sign flips. Otherwise
    -iota(delta0_i) = iota(-delta0_i) and delta0_i is negated.
    """
    m = elem.m
    minus = _minus_one_section(elem.param.base, m)
    if lift is not None:
        minus = minus.twist(lift)
    product = minus * CoverElement.section(elem.cover.blocks[i], m)
    blocks = list(elem.cover.blocks)
    blocks[i] = product.g
    delta0, sigma = list(elem.delta0), list(elem.sigma)
    if m % 4 == 0:
        sigma[i] = -sigma[i]
    else:
        delta0[i] = -delta0[i]
    return replace(
        elem,
        cover=BlockCoverElement(tuple(blocks), elem.zeta * product.zeta),
        delta0=tuple(delta0),
        sigma=tuple(sigma),
    )


def torus_element_matrix(elem: CalibratedElement, i: int, u: EtaleElement) -> GL2Element:
    """h_i M(u) h_i^-1: an element of (T/Z)(F) acting on block i."""
    return torus_matrix(u).conj(elem.frames[i])


# ============ Parameter equivalence ============

def _block_matches(
    a: TorusBlock, xa: NormOneElement, b: TorusBlock, xb: NormOneElement
) -> bool:
    if a.algebra != b.algebra:
        return False
    K = a.algebra
    for twisted in (False, True):
        image = xa.inverse() if twisted else xa
        if not image == xb:
            continue
        ca = -a.c_prime if twisted else a.c_prime
        if sgn_quadratic(K, ca / b.c_prime) == 1:
            return True
    return False


def equiv_params(a: RegClassParam, b: RegClassParam) -> bool:
    """Whether two class parameters are equivalent.

    Looks for a block bijection with matching algebras that carries x to x
    up to Aut(K, tau), where the c-ratio is a norm.
    """
    if a.torus.base != b.torus.base or a.torus.n != b.torus.n:
        return False
    n = a.torus.n
    for perm in permutations(range(n)):
        if all(
            _block_matches(a.torus.blocks[i], a.xs[i], b.torus.blocks[perm[i]], b.xs[perm[i]])
            for i in range(n)
        ):
            return True
    return False


def transport_param(param: TorusParam, gs: Sequence[GL2Element]) -> TorusParam:
    """Parameter of the torus conjugated by per-block GL(2) elements: c_i -> det(g_i) c_i."""
    return param.scale_c([g.det for g in gs])
