"""Diagonal quadratic forms: discriminant, Hasse invariant, Weil index, Witt kernel."""

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Union

import numpy as np
from loguru import logger

from bd_cover.core.errors import (
    DegenerateInput,
    PrecisionExhausted,
    SnapFailure,
    UnsupportedParameter,
)
from bd_cover.core.localfield import (
    AdditiveCharacter,
    FieldElement,
    LocalField,
    RootOfUnity,
    SquareClass,
    psi_eval,
    square_class,
)
from bd_cover.core.symbols import hilbert2

SNAP_TOLERANCE = 1e-6

Entry = Union[FieldElement, int, Fraction]


@dataclass(frozen=True, eq=False)
class DiagQuadForm:
    """The form <d1, ..., dk>: x -> sum d_i x_i^2."""

    field: LocalField
    entries: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        for d in self.entries:
            try:
                d.valuation()
            except PrecisionExhausted as exc:
                raise DegenerateInput("diagonal entries must be nonzero") from exc

    @classmethod
    def of(cls, field: LocalField, entries: Iterable[Entry]) -> "DiagQuadForm":
        return cls(field, tuple(field.element(d) if not isinstance(d, FieldElement) else d.embed(field)
                                for d in entries))

    @property
    def rank(self) -> int:
        return len(self.entries)

    def det(self) -> FieldElement:
        result = self.field.one()
        for d in self.entries:
            result = result * d
        return result

    def oplus(self, other: "DiagQuadForm") -> "DiagQuadForm":
        """Orthogonal sum."""
        return DiagQuadForm(self.field, self.entries + other.entries)

    def scaled(self, c: Entry) -> "DiagQuadForm":
        return DiagQuadForm(self.field, tuple(d * c for d in self.entries))

    def classes(self) -> list[SquareClass]:
        return [square_class(d) for d in self.entries]

    def __str__(self) -> str:
        return "<" + ", ".join(str(d) for d in self.entries) + ">"


def disc_pm(q: DiagQuadForm) -> SquareClass:
    """Signed discriminant (-1)^(n(n-1)/2) det q as a square class."""
    n = q.rank
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    if n == 0:
        return SquareClass.ONE
    return square_class(q.det() * sign)


def hasse(q: DiagQuadForm) -> int:
    """Hasse invariant: product of (d_i, d_j) over i < j."""
    result = 1
    for i in range(q.rank):
        for j in range(i + 1, q.rank):
            result *= hilbert2(q.field, q.entries[i], q.entries[j])
    return result


# ============ Weil index ============

def snap_to_eighth_root(z: complex, tol: float = SNAP_TOLERANCE) -> RootOfUnity:
    """Nearest eighth root of unity to a unit complex number.

    Raises:
        SnapFailure: z is farther than tol from every eighth root
    """
    k = int(np.round(np.angle(z) / (np.pi / 4))) % 8
    target = np.exp(2j * np.pi * k / 8)
    if abs(z - target) > tol:
        raise SnapFailure(f"{z} is not within {tol} of an eighth root of unity")
    return RootOfUnity(Fraction(k, 8))


@lru_cache(maxsize=None)
def _weil_constant(field: LocalField, level: int, v: int, digit: int) -> RootOfUnity:
    """Weil constant of x -> psi(s x^2) for s = digit * p^v."""
    p = field.p
    twice_r = level + 1 - v
    if twice_r % 2 == 0:
        return RootOfUnity.one()
    lo = (twice_r - 1) // 2
    psi = AdditiveCharacter(field, level)
    s = field.element(digit) * field.element(p) ** v
    step = field.element(p) ** lo
    angles = [float(psi_eval(psi, s * (step * k) * (step * k)).angle) for k in range(p)]
    g = np.exp(2j * np.pi * np.asarray(angles)).sum()
    magnitude = abs(g)
    if abs(magnitude - np.sqrt(p)) > SNAP_TOLERANCE * np.sqrt(p):
        raise SnapFailure(f"Gauss sum magnitude {magnitude} differs from sqrt({p})")
    value = snap_to_eighth_root(g / magnitude)
    logger.debug(f"gamma over Q_{p}, level {level}, s = {digit}*{p}^{v}: {value}")
    return value


def weil_index_scalar(psi: AdditiveCharacter, t: Entry) -> RootOfUnity:
    """Weil index of the rank-one form <t> relative to psi.

    The index is Weil's constant of the character of second degree
    x -> psi(t x^2 / 2), evaluated by a normalized Gauss sum over
    p^floor(r) / p^ceil(r) with r = (level + 1 - v) / 2.
    """
    F = psi.field
    t = t.embed(F) if isinstance(t, FieldElement) else F.element(t)
    if not t.field.is_base:
        raise UnsupportedParameter("Weil indices are computed over the base field only")
    s = t * psi.twist / 2
    v, unit = s.valuation_unit()
    return _weil_constant(F, psi.level, v, unit.a.unit % F.p)


def weil_index(psi: AdditiveCharacter, q: DiagQuadForm) -> RootOfUnity:
    """gamma_psi(q), an eighth root of unity."""
    if q.field.base != psi.field or not q.field.is_base:
        raise UnsupportedParameter("form and character must live over the same base field")
    result = RootOfUnity.one()
    for d in q.entries:
        result = result * weil_index_scalar(psi, d)
    return result


# ============ Witt decomposition ============

def is_isotropic(q: DiagQuadForm) -> bool:
    """Isotropy of a nondegenerate form over a p-adic field, p odd."""
    r = q.rank
    if r <= 1:
        return False
    if r == 2:
        return disc_pm(q) == SquareClass.ONE
    F = q.field
    det = q.det()
    if r == 3:
        return hilbert2(F, -1, -det) == hasse(q)
    if r == 4:
        if square_class(det) != SquareClass.ONE:
            return True
        return hasse(q) == hilbert2(F, -1, -1)
    return True


@dataclass(frozen=True, eq=False)
class WittDecomposition:
    """q = kernel + hyperbolic_rank copies of the hyperbolic plane."""

    kernel: DiagQuadForm
    hyperbolic_rank: int


def witt_decompose(q: DiagQuadForm) -> WittDecomposition:
    """Split off hyperbolic planes until the remaining kernel is anisotropic.

    At each step the complement of a hyperbolic plane is found among
    diagonal forms on square-class representatives: two forms of equal
    rank are isometric iff their determinants and Hasse invariants agree.
    """
    F = q.field
    reps = [F.class_rep(c) for c in SquareClass]
    hyperbolic = DiagQuadForm.of(F, [1, -1])
    current, planes = q, 0
    while is_isotropic(current):
        target_det = square_class(current.det())
        target_hasse = hasse(current)
        for combo in combinations_with_replacement(reps, current.rank - 2):
            candidate = DiagQuadForm(F, tuple(combo))
            trial = hyperbolic.oplus(candidate)
            if square_class(trial.det()) == target_det and hasse(trial) == target_hasse:
                current, planes = candidate, planes + 1
                break
        else:
            raise DegenerateInput(f"no Witt complement found for {current}")
    return WittDecomposition(current, planes)
