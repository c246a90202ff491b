"""Brute-force oracles used to cross-check closed formulas.

Each oracle decides the same question as a formula elsewhere in the
package, but by searching residues and lifting with Hensel's lemma.
"""

from itertools import product

from bd_cover.core.errors import UnsupportedParameter
from bd_cover.core.etale import NormOneElement
from bd_cover.core.localfield import FieldElement, LocalField, teichmuller
from bd_cover.core.symbols import Operand, hilbert_m


def _reduce_parity(x: FieldElement) -> tuple[int, int]:
    """(v mod 2, unit residue) of a nonzero base element."""
    v, unit = x.valuation_unit()
    return v % 2, unit.residue()[0]


def _has_smooth_point(p: int, a: int, b: int) -> bool:
    """Whether z^2 = a x^2 + b y^2 has a nonzero point mod p with nonzero gradient."""
    for x, y, z in product(range(p), repeat=3):
        if (x, y, z) == (0, 0, 0):
            continue
        if (z * z - a * x * x - b * y * y) % p:
            continue
        if (2 * z) % p or (2 * a * x) % p or (2 * b * y) % p:
            return True
    return False


def hilbert2_bruteforce(F: LocalField, a: Operand, b: Operand) -> int:
    """+1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over F.

    Square factors are stripped first; when both entries have odd
    valuation the pair is replaced by (a, -ab/p^2), which has the same
    symbol. The reduced equation has a solution over F iff it has a
    smooth point modulo p (nonzero gradient), which lifts by Hensel's
    lemma. The search runs over F_p^3 only; primitive solutions modulo
    higher powers of p are not enumerated.
    """
    if not F.is_base:
        raise UnsupportedParameter("the brute-force symbol runs over Q_p only")
    a, b = F.element(a), F.element(b)
    p = F.p
    va, ua = _reduce_parity(a)
    vb, ub = _reduce_parity(b)
    if va and vb:
        vb, ub = 0, (-ua * ub) % p
    ra = 0 if va else ua
    rb = 0 if vb else ub
    return 1 if _has_smooth_point(p, ra, rb) else -1


def square_bruteforce(F: LocalField, x: Operand) -> bool:
    """Whether x is a square in Q_p: even valuation and a residue that is a square mod p."""
    x = F.element(x)
    v, r = _reduce_parity(x)
    return v == 0 and any((t * t - r) % F.p == 0 for t in range(1, F.p))


def isotropic_bruteforce(F: LocalField, entries: list[Operand]) -> bool:
    """Isotropy of a diagonal form of rank at most three."""
    xs = [F.element(e) for e in entries]
    if len(xs) <= 1:
        return False
    if len(xs) == 2:
        return square_bruteforce(F, -xs[0] * xs[1])
    if len(xs) == 3:
        a, b, c = xs
        return hilbert2_bruteforce(F, -b / a, -c / a) == 1
    raise UnsupportedParameter("the brute-force isotropy test handles rank <= 3")


def _unit_group_generators(K: LocalField) -> list[FieldElement]:
    res = K.residue_field
    return [K.uniformizer(), teichmuller(K, res.generator_of_order(res.q - 1))]


def good_by_symbols(x: NormOneElement, m: int) -> bool:
    """x is good iff (x^2, v)_{K,m} is trivial for v running over generators of K^x."""
    K = x.algebra
    sq = x.value * x.value
    if K.is_split:
        F = K.base
        return all(
            hilbert_m(F, m, part, v).is_one
            for part in sq.parts
            for v in _unit_group_generators(F)
        )
    L = K.field
    return all(hilbert_m(L, m, sq.parts[0], v).is_one for v in _unit_group_generators(L))
