"""Rank-one transfer factors Delta+- and the twofold-cover function nabla."""

from dataclasses import dataclass
from typing import Optional

from loguru import logger

from bd_cover.core.cover import CoverElement, GL2Element
from bd_cover.core.errors import (
    BadSign,
    DegenerateInput,
    LowerLeftZero,
    NotRegular,
    UnsupportedParameter,
)
from bd_cover.core.etale import EtaleElement, NormOneElement, resolve_hilbert90
from bd_cover.core.localfield import AdditiveCharacter, MuM, RootOfUnity
from bd_cover.core.quadforms import DiagQuadForm, weil_index, weil_index_scalar
from bd_cover.core.stabconj import CalibratedElement, minus_one_shift
from bd_cover.core.symbols import hilbert2


def _require_rank_one(elem: CalibratedElement, m: int) -> None:
    if elem.param.n != 1:
        raise UnsupportedParameter("transfer factors are defined for rank-one tori only")
    if elem.m != m:
        raise DegenerateInput(f"element lives on the {elem.m}-fold cover, not the {m}-fold one")


def _delta_plus_raw(
    m: int,
    psi: Optional[AdditiveCharacter],
    zeta: MuM,
    delta: GL2Element,
    delta0: NormOneElement,
    omega: Optional[EtaleElement],
) -> RootOfUnity:
    if m % 2:
        raise UnsupportedParameter(f"transfer factors need m even, got m={m}")
    if delta.is_scalar:
        raise NotRegular("delta is central")
    F = delta.field
    norm = resolve_hilbert90(delta0, omega).norm()
    value = zeta.to_root()
    if m % 4 == 2:
        if psi is None:
            raise UnsupportedParameter("m = 2 mod 4 needs an additive character")
        value = value * weil_index_scalar(psi, 1) / weil_index_scalar(psi, norm)
    value = value * RootOfUnity.from_sign(hilbert2(F, norm, -delta.x_entry()))
    return value


def delta_plus(
    m: int,
    psi: Optional[AdditiveCharacter],
    elem: CalibratedElement,
    omega: Optional[EtaleElement] = None,
) -> RootOfUnity:
    """Delta+(delta~, delta_0) = zeta [gamma(1)/gamma(N omega)]^[m=2 mod 4] (N omega, -x(delta))_2.

    Args:
        m: Even cover degree
        psi: Additive character, needed when m = 2 mod 4
        elem: Rank-one calibrated element
        omega: Hilbert 90 solution for delta_0 (computed when omitted)

    Raises:
        NotRegular: the image of delta~ is central
        UnsupportedParameter: m odd, or the torus has rank above one
        BadSign: the element lies over -iota(delta_0)
    """
    _require_rank_one(elem, m)
    if elem.sigma[0] != 1:
        raise BadSign("Delta+ is evaluated on elements over iota(delta_0)")
    return _delta_plus_raw(m, psi, elem.zeta, elem.cover.blocks[0], elem.delta0[0], omega)


def delta_minus(
    m: int,
    psi: Optional[AdditiveCharacter],
    elem: CalibratedElement,
    omega: Optional[EtaleElement] = None,
) -> RootOfUnity:
    """Delta-(delta~, delta_0) = gamma(1)^(2[m=2 mod 4]) Delta+(s(-1) delta~, delta_0).

    Inputs of Delta- lie over -iota(delta_0). For 4 | m these are the
    elements with sign -1. For m = 2 mod 4 every sign is + and an element
    over iota(delta_0') is read with delta_0 = -delta_0', as
    -iota(delta_0') = iota(-delta_0'); ``omega`` then solves Hilbert 90
    for -delta_0'.

    Raises:
        BadSign: 4 | m and the element does not carry the sign -1
    """
    _require_rank_one(elem, m)
    if m % 4 == 0 and elem.sigma[0] != -1:
        raise BadSign("Delta- for 4 | m is evaluated on elements over -iota(delta_0)")
    shifted = minus_one_shift(elem, 0)
    value = _delta_plus_raw(m, psi, shifted.zeta, shifted.cover.blocks[0], shifted.delta0[0], omega)
    if m % 4 == 2:
        value = value * weil_index_scalar(psi, 1) ** 2
    return value


# ============ nabla ============

def _lower_unipotent(gamma: CoverElement, t: int) -> GL2Element:
    return GL2Element.of(gamma.field, 1, 0, t, 1)


def nabla_rank1(psi: AdditiveCharacter, gamma: CoverElement, conjugate: bool = True) -> RootOfUnity:
    """nabla(zeta s(gamma)) = zeta gamma_psi(<-c, c(2 + tr gamma)>) on the twofold cover.

    A gamma with vanishing lower-left entry is first conjugated by the Weyl
    element (then by lower unipotents if needed); nabla is conjugation
    invariant so the value does not change.

    Raises:
        NotRegular: gamma is not regular semisimple
        LowerLeftZero: c = 0 and ``conjugate`` is False
    """
    if gamma.m != 2:
        raise UnsupportedParameter("nabla is defined on the twofold cover")
    g = gamma.g
    if not g.det == 1:
        raise DegenerateInput("nabla needs an element of SL(2)")
    if (g.trace * g.trace - 4).is_zero:
        raise NotRegular("gamma is not regular semisimple")
    if g.c.is_zero:
        if not conjugate:
            raise LowerLeftZero("lower-left entry vanishes")
        movers = [GL2Element.weyl(g.field)] + [_lower_unipotent(gamma, t) for t in (1, 2, 3)]
        for h in movers:
            moved = gamma.conj(h)
            if not moved.g.c.is_zero:
                logger.debug(f"nabla: conjugated {g} to {moved.g}")
                gamma, g = moved, moved.g
                break
    c = g.c
    form = DiagQuadForm.of(g.field, [-c, c * (g.trace + 2)])
    return gamma.zeta.to_root() * weil_index(psi, form)


# ============ m = 2 comparison ============

@dataclass
class M2Comparison:
    """Delta+ and nabla on the same element of the twofold cover."""

    delta_plus: RootOfUnity
    nabla: RootOfUnity

    @property
    def agree(self) -> bool:
        return self.delta_plus == self.nabla


def m2_compare(psi: AdditiveCharacter, elem: CalibratedElement) -> M2Comparison:
    """Evaluate both transfer functions at m = 2."""
    if elem.m != 2:
        raise UnsupportedParameter("the comparison is made on the twofold cover")
    _require_rank_one(elem, 2)
    result = M2Comparison(
        delta_plus(2, psi, elem),
        nabla_rank1(psi, elem.cover.block(0)),
    )
    if not result.agree:
        logger.error(f"Delta+ = {result.delta_plus} but nabla = {result.nabla}")
    return result
