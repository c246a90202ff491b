"""Toral invariants, epsilon characters, the dagger character and moment-map spaces."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from bd_cover.core.errors import (
    AsymmetricOrbit,
    DegenerateInput,
    NotRegular,
    UnsupportedParameter,
)
from bd_cover.core.etale import NormOneElement, make_etale
from bd_cover.core.localfield import AdditiveCharacter, FieldElement, SquareClass
from bd_cover.core.quadforms import DiagQuadForm, disc_pm, hasse, weil_index, weil_index_scalar
from bd_cover.core.stabconj import TorusParam
from bd_cover.core.symbols import hilbert2


# ============ Lie algebra parameters ============

@dataclass(frozen=True, eq=False)
class YParam:
    """Regular y_i in K_i with tau(y_i) = -y_i: y' sqrt D_i, or (y', -y') when split."""

    torus: TorusParam
    y_primes: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        if len(self.y_primes) != self.torus.n:
            raise DegenerateInput("one y per block is required")
        squares = [self.y_square(i) for i in range(self.torus.n)]
        for i, s in enumerate(squares):
            if s.is_zero:
                raise NotRegular(f"y_{i} vanishes")
            for t in squares[:i]:
                if s == t:
                    raise NotRegular("eigenvalues +-y_i are not pairwise distinct")

    def radicand(self, i: int) -> FieldElement:
        return self.torus.blocks[i].algebra.radicand()

    def y_square(self, i: int) -> FieldElement:
        """y_i^2, an element of F."""
        y = self.y_primes[i]
        return y * y * self.radicand(i)

    def yc(self, i: int) -> FieldElement:
        """y_i c_i, an element of F."""
        return self.y_primes[i] * self.torus.blocks[i].c_prime * self.radicand(i)

    def det(self) -> FieldElement:
        """det Y = product of N(y_i) = product of -y_i^2."""
        result = self.torus.base.one()
        for i in range(self.torus.n):
            result = result * -self.y_square(i)
        return result

    def scaled(self, factors: Sequence[FieldElement]) -> "YParam":
        return YParam(self.torus, tuple(y * f for y, f in zip(self.y_primes, factors)))

    def with_torus(self, torus: TorusParam) -> "YParam":
        return YParam(torus, self.y_primes)


def make_y_param(torus: TorusParam, y_primes: Sequence) -> YParam:
    F = torus.base
    return YParam(torus, tuple(y.embed(F) if isinstance(y, FieldElement) else F.element(y) for y in y_primes))


def q0_block(Y: YParam, i: int) -> DiagQuadForm:
    """q0_{i,Y}(u) = -2 y_i c_i N(u), diagonalized as <alpha, -alpha D_i>."""
    alpha = Y.yc(i) * -2
    return DiagQuadForm(Y.torus.base, (alpha, -alpha * Y.radicand(i)))


def _line(Y: YParam) -> DiagQuadForm:
    sign = -1 if Y.torus.n % 2 else 1
    return DiagQuadForm(Y.torus.base, (Y.det() * sign,))


def mm_space(param: TorusParam, Y: YParam) -> DiagQuadForm:
    """q<Y> + <(-1)^n det Y>, of rank 2n + 1 and trivial signed discriminant."""
    if Y.torus is not param:
        Y = Y.with_torus(param)
    form = DiagQuadForm(param.base, ())
    for i in range(param.n):
        form = form.oplus(q0_block(Y, i))
    form = form.oplus(_line(Y))
    if disc_pm(form) != SquareClass.ONE:
        raise DegenerateInput(f"moment-map space {form} has nontrivial discriminant")
    return form


# ============ Root orbits ============

class OrbitKind(str, Enum):
    SP_LONG = "SpLong"
    SP_SHORT_PAIR = "SpShortPair"
    SO_SHORT = "SoShort"
    SO_LONG_PAIR = "SoLongPair"

    @property
    def is_pair(self) -> bool:
        return self in (OrbitKind.SP_SHORT_PAIR, OrbitKind.SO_LONG_PAIR)


class Side(str, Enum):
    SP = "Sp"
    SO = "SO"


@dataclass(frozen=True)
class RootOrbit:
    """A class of roots up to Galois and sign; pairs may split into two classes."""

    kind: OrbitKind
    i: int
    j: Optional[int] = None
    sign: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind.is_pair and (self.j is None or self.j == self.i):
            raise DegenerateInput("pair orbits need two distinct blocks")

    def is_symmetric(self, param: TorusParam) -> bool:
        if self.kind.is_pair:
            return param.blocks[self.i].is_field and param.blocks[self.j].is_field
        return param.blocks[self.i].is_field

    def is_nontrivial_at(self, gamma0: Sequence[int]) -> bool:
        """Whether the root takes the value -1 at the torsion point gamma0."""
        if self.kind == OrbitKind.SP_LONG:
            return False
        if self.kind == OrbitKind.SO_SHORT:
            return gamma0[self.i] == -1
        return gamma0[self.i] != gamma0[self.j]


def _pair_orbits(param: TorusParam, kind: OrbitKind) -> list[RootOrbit]:
    """e_i - e_j and e_i + e_j stay apart when K_i = K_j (tau negates both e_i and e_j), else they merge."""
    orbits = []
    for i in range(param.n):
        for j in range(i + 1, param.n):
            a, b = param.blocks[i].algebra, param.blocks[j].algebra
            if a == b:
                orbits += [RootOrbit(kind, i, j, 1), RootOrbit(kind, i, j, -1)]
            else:
                orbits.append(RootOrbit(kind, i, j))
    return orbits


def root_orbits(side: Side, param: TorusParam) -> list[RootOrbit]:
    """Galois-and-sign classes of roots of Sp(2n) or SO(2n+1) for the torus."""
    side = Side(side)
    single = OrbitKind.SP_LONG if side == Side.SP else OrbitKind.SO_SHORT
    pair = OrbitKind.SP_SHORT_PAIR if side == Side.SP else OrbitKind.SO_LONG_PAIR
    return [RootOrbit(single, i) for i in range(param.n)] + _pair_orbits(param, pair)


def short_root_space(Y: YParam, i: int) -> DiagQuadForm:
    """The ternary space with weights {e_i, 0, -e_i}: q0_{i,Y} + <(-1)^n det Y>."""
    return q0_block(Y, i).oplus(_line(Y))


def so_split_sign(U: DiagQuadForm) -> int:
    """+1 if SO(U) is split, -1 for the anisotropic inner form: eps(U)(-1, d(U))."""
    if U.rank != 3:
        raise DegenerateInput(f"expected a ternary space, got rank {U.rank}")
    d = U.field.class_rep(disc_pm(U))
    return hasse(U) * hilbert2(U.field, -1, d)


def toral_invariant(orbit: RootOrbit, param: TorusParam, Y: Optional[YParam] = None) -> int:
    """f(alpha) for a symmetric orbit.

    Raises:
        AsymmetricOrbit: the orbit is not symmetric
        UnsupportedParameter: a short SO root without Y
    """
    if not orbit.is_symmetric(param):
        raise AsymmetricOrbit(f"{orbit} is not symmetric")
    F = param.base
    if orbit.kind == OrbitKind.SP_LONG:
        return 1
    if orbit.kind == OrbitKind.SO_SHORT:
        if Y is None:
            raise UnsupportedParameter("short SO roots need the Lie algebra parameter")
        return so_split_sign(short_root_space(Y.with_torus(param), orbit.i))
    Ki, Kj = param.blocks[orbit.i].algebra, param.blocks[orbit.j].algebra
    Di = Ki.radicand()
    if Ki.d_class == Kj.d_class:
        return hilbert2(F, -1, Di)
    E = make_etale(F, Ki.d_class * Kj.d_class).field
    return hilbert2(E, -1, Di)


def epsilon_char(side: Side, param: TorusParam, Y: Optional[YParam], gamma0: Sequence[int]) -> int:
    """Product of toral invariants over symmetric classes where gamma0 acts by -1.

    Raises:
        UnsupportedParameter: the SO side on a torus with split blocks
    """
    side = Side(side)
    gamma0 = check_torsion(param, gamma0)
    if side == Side.SO and not param.is_anisotropic:
        raise UnsupportedParameter("the SO side needs an anisotropic torus")
    result = 1
    for orbit in root_orbits(side, param):
        if orbit.is_symmetric(param) and orbit.is_nontrivial_at(gamma0):
            result *= toral_invariant(orbit, param, Y)
    return result


def check_torsion(param: TorusParam, gamma0: Sequence[int]) -> tuple[int, ...]:
    gamma0 = tuple(gamma0)
    if len(gamma0) != param.n or any(g not in (1, -1) for g in gamma0):
        raise DegenerateInput(f"torsion point must be a sign per block, got {gamma0}")
    return gamma0


# ============ Dagger character ============

class DaggerMethod(str, Enum):
    HASSE = "hasse"
    WEIL = "weil"


def dagger_block(Y: YParam, i: int, method: DaggerMethod = DaggerMethod.HASSE,
                 psi: Optional[AdditiveCharacter] = None) -> int:
    """Value of the dagger character on -1 in block i.

    The hasse method evaluates eps(V)(-1, D a) on V = q0 + <a>. The weil
    method computes eps(V) as gamma(q0) gamma(a) gamma(1)^-2 gamma(-D a)^-1
    and multiplies by the same (-1, D a). The last factor is gamma(D a),
    since gamma(-t) = gamma(t)^-1 for this normalization. D a is the
    signed discriminant of V, so this is the rank-three relation
    eps(V) = gamma(V) gamma(1)^-2 gamma(d(V)). Using gamma(D a)^-1 instead
    would give a different sign whenever gamma(D a) is not +-1.
    """
    F = Y.torus.base
    a = _line(Y).entries[0]
    Da = Y.radicand(i) * a
    sign = hilbert2(F, -1, Da)
    if DaggerMethod(method) == DaggerMethod.HASSE:
        return hasse(short_root_space(Y, i)) * sign
    if psi is None:
        raise UnsupportedParameter("the weil method needs an additive character")
    value = (
        weil_index(psi, q0_block(Y, i))
        * weil_index_scalar(psi, a)
        / weil_index_scalar(psi, 1) ** 2
        / weil_index_scalar(psi, -Da)
    )
    return value.sign * sign


def dagger_char(
    m: int,
    param: TorusParam,
    Y: YParam,
    gamma0: Sequence[int],
    method: DaggerMethod = DaggerMethod.HASSE,
    psi: Optional[AdditiveCharacter] = None,
) -> int:
    """theta-dagger at the torsion point gamma0.

    Raises:
        UnsupportedParameter: m not 2 mod 4, or gamma0 is -1 on a split block
    """
    if m % 4 != 2:
        raise UnsupportedParameter(f"the dagger character needs m = 2 mod 4, got {m}")
    gamma0 = check_torsion(param, gamma0)
    Y = Y.with_torus(param)
    result = 1
    for i, g in enumerate(gamma0):
        if g == 1:
            continue
        if not param.blocks[i].is_field:
            raise UnsupportedParameter(f"block {i} is split but gamma0 is -1 there")
        result *= dagger_block(Y, i, method, psi)
    return result


@dataclass
class InterplayReport:
    gamma0: tuple[int, ...]
    eps_sp: int
    eps_so: int
    dagger: int

    @property
    def holds(self) -> bool:
        return self.eps_so * self.eps_sp == self.dagger


def interplay_check(m: int, param: TorusParam, Y: YParam, gamma0: Sequence[int]) -> InterplayReport:
    """eps_SO / eps_Sp against the dagger character at gamma0."""
    gamma0 = check_torsion(param, gamma0)
    report = InterplayReport(
        gamma0,
        epsilon_char(Side.SP, param, Y, gamma0),
        epsilon_char(Side.SO, param, Y, gamma0),
        dagger_char(m, param, Y, gamma0),
    )
    if not report.holds:
        logger.error(f"interplay fails at {gamma0}: {report}")
    return report


# ============ Moment map ============

def charpoly(A: np.ndarray) -> list[FieldElement]:
    """Characteristic polynomial det(lambda - A), highest degree first (Berkowitz)."""
    n = A.shape[0]
    F = A[0, 0].field
    one, zero = F.one(), F.zero()
    coeffs = [one]
    for k in range(n):
        R, C, M = A[k, :k], A[:k, k], A[:k, :k]
        t = [one, -A[k, k]]
        v = C
        for _ in range(k):
            t.append(-sum((x * y for x, y in zip(R, v)), zero))
            v = M @ v
        coeffs = [
            sum((t[i - j] * coeffs[j] for j in range(max(0, i - k - 1), min(i, k) + 1)), zero)
            for i in range(k + 2)
        ]
    return coeffs


def _poly_mul(p: list[FieldElement], q: list[FieldElement]) -> list[FieldElement]:
    zero = p[0].field.zero()
    out = [zero] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] = out[i + j] + x * y
    return out


def _blocks_to_matrix(F, blocks: list[list[list[FieldElement]]]) -> np.ndarray:
    n = 2 * len(blocks)
    A = np.empty((n, n), dtype=object)
    A[:, :] = [[F.zero() for _ in range(n)] for _ in range(n)]
    for k, blk in enumerate(blocks):
        for r in range(2):
            for c in range(2):
                A[2 * k + r, 2 * k + c] = blk[r][c]
    return A


def _all_equal(A: np.ndarray, B: np.ndarray) -> bool:
    return all(x == y for x, y in zip(A.flat, B.flat))


@dataclass
class MomentMapReport:
    """Outcome of the moment-map checks."""

    char_y: list[str]
    char_y_prime: list[str]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def mm_matrices(param: TorusParam, Y: YParam) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Y acting on the sum of the K_i, the symplectic Gram matrix J, and Y' = iota Y pr."""
    F = param.base
    ys, js = [], []
    for i, blk in enumerate(param.blocks):
        y, c = Y.y_primes[i], blk.c_prime
        zero = F.zero()
        if blk.is_field:
            D = Y.radicand(i)
            ys.append([[zero, y * D], [y, zero]])
            js.append([[zero, c * D * 2], [-(c * D * 2), zero]])
        else:
            ys.append([[y, zero], [zero, -y]])
            js.append([[zero, -c], [c, zero]])
    Ymat = _blocks_to_matrix(F, ys)
    J = _blocks_to_matrix(F, js)
    size = Ymat.shape[0] + 1
    Yprime = np.empty((size, size), dtype=object)
    Yprime[:, :] = [[F.zero() for _ in range(size)] for _ in range(size)]
    Yprime[:-1, :-1] = Ymat
    return Ymat, J, Yprime


def mm_eigen_check(param: TorusParam, Y: YParam) -> MomentMapReport:
    """Compare characteristic polynomials of Y and Y' and test torus invariance of q<Y>."""
    F = param.base
    Y = Y.with_torus(param)
    Ymat, J, Yprime = mm_matrices(param, Y)
    char_y = charpoly(Ymat)
    char_yp = charpoly(Yprime)
    report = MomentMapReport([str(x) for x in char_y], [str(x) for x in char_yp])
    report.checks["char_y_prime"] = all(x == y for x, y in zip(char_yp, char_y + [F.zero()]))

    expected = [F.one()]
    for i in range(param.n):
        expected = _poly_mul(expected, [F.one(), F.zero(), -Y.y_square(i)])
    report.checks["eigenvalues"] = all(x == y for x, y in zip(char_y, expected))

    zero = np.empty_like(J)
    zero[:, :] = [[F.zero() for _ in range(J.shape[1])] for _ in range(J.shape[0])]
    report.checks["symplectic"] = _all_equal(Ymat.T @ J + J @ Ymat, zero)

    G = Ymat.T @ J
    report.checks["gram_symmetric"] = _all_equal(G, G.T)
    space = mm_space(param, Y)
    diag_ok = True
    for i, blk in enumerate(param.blocks):
        g = G[2 * i:2 * i + 2, 2 * i:2 * i + 2]
        if not blk.is_field:
            P = np.array([[F.one(), F.one()], [F.one(), -F.one()]], dtype=object)
            g = P.T @ g @ P
        diag_ok &= g[0, 0] == space.entries[2 * i] and g[1, 1] == space.entries[2 * i + 1]
        diag_ok &= g[0, 1].is_zero and g[1, 0].is_zero
    report.checks["diagonalization"] = bool(diag_ok)

    invariant = True
    for i, blk in enumerate(param.blocks):
        K = blk.algebra
        omega = K.element(2, 1) if K.is_split else K.element(1, 1)
        for t in (NormOneElement.from_ratio(omega), NormOneElement(-K.one())):
            a, b = t.value.coords()
            if K.is_split:
                block = [[a, F.zero()], [F.zero(), b]]
            else:
                block = [[a, b * Y.radicand(i)], [b, a]]
            blocks = [[[F.one(), F.zero()], [F.zero(), F.one()]] for _ in range(param.n)]
            blocks[i] = block
            M = _blocks_to_matrix(F, blocks)
            invariant &= _all_equal(M.T @ G @ M, G)
    report.checks["torus_invariance"] = bool(invariant)
    if not report.passed:
        logger.error(f"moment-map checks failed: {report.checks}")
    return report
