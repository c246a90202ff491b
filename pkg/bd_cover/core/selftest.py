"""Randomized property suites with a deterministic per-suite generator.

Each suite draws its own stream from ``suite_rng(seed, name)``, so suites
are independent of each other and of the order they run in.
"""

from typing import Callable, Optional, Sequence

import numpy as np
from loguru import logger
from sympy import divisors

from bd_cover.core.config import ComputeConfig
from bd_cover.core.cover import (
    CoverElement,
    GL2Element,
    commutator,
    flicker_symbol,
    is_good,
    minus_one_square_kernel,
    minus_one_tilde,
    norm_symbol,
    random_gl2,
    random_sl2,
    random_torus_unit,
    torus_matrix,
)
from bd_cover.core.errors import ComputationError, NotRegular
from bd_cover.core.etale import (
    NormOneElement,
    hilbert90_solve,
    iota,
    iota_kernel,
    make_etale,
    random_regular_norm_one,
)
from bd_cover.core.localfield import (
    AdditiveCharacter,
    LocalField,
    MuM,
    RootOfUnity,
    make_field,
    smallest_nonresidue,
)
from bd_cover.core.oracles import good_by_symbols, hilbert2_bruteforce
from bd_cover.core.packetdata import (
    DaggerMethod,
    Side,
    YParam,
    dagger_char,
    epsilon_char,
    interplay_check,
    mm_eigen_check,
    mm_space,
)
from bd_cover.core.quadforms import DiagQuadForm, hasse, weil_index, weil_index_scalar
from bd_cover.core.sampling import (
    random_ext_nonzero,
    random_integral,
    random_nonzero,
    random_rational,
    random_sign,
    suite_rng,
)
from bd_cover.core.stabconj import (
    CalibratedElement,
    RegClassParam,
    TorusParam,
    cad_sigma,
    cali_factor,
    calibrated,
    equiv_params,
    inv_of,
    make_torus_param,
    minus_one_shift,
    torus_element_matrix,
    transport_param,
)
from bd_cover.core.symbols import hilbert2, hilbert_m, product_formula_check, sgn_quadratic
from bd_cover.core.transfer import delta_minus, delta_plus, m2_compare, nabla_rank1
from bd_cover.models.schemas import SelftestReport, SuiteReport

PRIMES = (3, 5, 7, 11, 13)
DAGGER_PRIMES = (3, 5, 7, 11)
DEGREES = (1, 2, 3, 4, 6)
CONFIGS = tuple((p, m) for p in PRIMES for m in DEGREES if (p - 1) % m == 0)
EVEN_CONFIGS = tuple((p, m) for p, m in CONFIGS if m % 2 == 0)
ALGEBRAS = ("split", "u", "p", "up")
FIELD_ALGEBRAS = ("u", "p", "up")

# A trial returns None on success and a description of the counterexample otherwise.
Trial = Callable[[np.random.Generator, ComputeConfig], Optional[str]]


def _pick(rng: np.random.Generator, options: Sequence):
    return options[int(rng.integers(len(options)))]


def _field(p: int, cfg: ComputeConfig) -> LocalField:
    return make_field(p, precision=cfg.precision)


def _first_failure(checks: Sequence[tuple[bool, str]]) -> Optional[str]:
    for ok, label in checks:
        if not ok:
            return label
    return None


# ============ Trials ============

def _trial_localfield(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    F = _field(_pick(rng, PRIMES), cfg)
    K = make_etale(F, _pick(rng, FIELD_ALGEBRAS)).field
    for L, draw in ((F, lambda: random_nonzero(F, rng)), (K, lambda: random_ext_nonzero(K, rng))):
        x, y, z = draw(), draw(), draw()
        problem = _first_failure([
            ((x + y) * z == x * z + y * z, f"distributivity in {L}: {x}, {y}, {z}"),
            (x * x.inverse() == 1, f"inverse in {L}: {x}"),
            ((x * y).valuation() == x.valuation() + y.valuation(), f"valuation in {L}: {x}, {y}"),
            ((x * y).conjugate() == x.conjugate() * y.conjugate(), f"conjugation in {L}: {x}, {y}"),
        ])
        if problem:
            return problem
    return None


def _trial_symbols(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    p, m = _pick(rng, CONFIGS)
    F = _field(p, cfg)
    a, b, c = (random_nonzero(F, rng) for _ in range(3))

    def h(x, y) -> MuM:
        return hilbert_m(F, m, x, y)

    K = make_etale(F, _pick(rng, FIELD_ALGEBRAS))
    v = random_ext_nonzero(K.field, rng)
    w = K.from_field(v)
    one_minus = 1 - a
    steinberg = one_minus.is_zero or h(a, one_minus).is_one
    pushed = all((h(a, b) ** (m // d)).to_root() == hilbert_m(F, d, a, b).to_root() for d in divisors(m))
    return _first_failure([
        (h(a * b, c) == h(a, c) * h(b, c), f"bimultiplicativity p={p} m={m}: {a}, {b}, {c}"),
        ((h(a, b) * h(b, a)).is_one, f"antisymmetry p={p} m={m}: {a}, {b}"),
        (h(a, -a).is_one, f"(x, -x) p={p} m={m}: {a}"),
        (steinberg, f"Steinberg p={p} m={m}: {a}"),
        (pushed, f"norm residue symbol of lower degree p={p} m={m}: {a}, {b}"),
        (hilbert2(F, a, b) == hilbert2_bruteforce(F, a, b), f"solvability oracle p={p}: {a}, {b}"),
        (sgn_quadratic(K, w.norm()) == 1, f"norms are trivial under sgn in {K}: {w}"),
        (hilbert_m(K.field, m, a, v) == h(a, v.norm()), f"projection formula in {K}, m={m}: {a}, {v}"),
    ])


def _trial_weil(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    p = _pick(rng, PRIMES)
    F = _field(p, cfg)
    psi = AdditiveCharacter(F, _pick(rng, (-1, 0, 1)), _pick(rng, (1, smallest_nonresidue(p))))
    a, b, c = (random_nonzero(F, rng) for _ in range(3))

    def g(t) -> RootOfUnity:
        return weil_index_scalar(psi, t)

    ga = g(a)
    total = a + b
    rotated = total.is_zero or weil_index(psi, DiagQuadForm.of(F, [total, a * b * total])) == ga * g(b)
    ternary = DiagQuadForm.of(F, [a, b, c])
    via_weil = weil_index(psi, ternary) / g(1) ** 2 * g(-a * b * c)
    square = int(rng.integers(1, 4 * p))
    return _first_failure([
        (g(a * b) * g(1) == ga * g(b) * RootOfUnity.from_sign(hilbert2(F, a, b)),
         f"Weil-Hilbert identity p={p} level={psi.level}: {a}, {b}"),
        (8 % ga.order == 0, f"gamma({a}) = {ga} is not an eighth root of unity"),
        (weil_index(psi, DiagQuadForm.of(F, [a, -a])).is_one, f"hyperbolic plane <{a}, {-a}>"),
        (rotated, f"isometric forms <{a}, {b}> and <a + b, ab(a + b)>"),
        (via_weil == RootOfUnity.from_sign(hasse(ternary)), f"Hasse invariant from Weil indices of {ternary}"),
        (weil_index_scalar(psi.twisted(square * square), a) == ga, f"gamma under psi -> psi_(c^2), c={square}: {a}"),
    ])


def _trial_cover(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    p, m = _pick(rng, CONFIGS)
    F = _field(p, cfg)
    g1, g2, g3 = (random_gl2(F, rng) for _ in range(3))

    def s(g: GL2Element) -> CoverElement:
        return CoverElement.section(g, m)

    K = make_etale(F, _pick(rng, ALGEBRAS))
    x = random_regular_norm_one(K, rng)
    u = random_torus_unit(K, rng)
    x0 = random_regular_norm_one(K, rng)
    over_iota = s(torus_matrix(iota(m, x0).value))
    omega = hilbert90_solve(x0) * random_nonzero(F, rng)
    minus = s(GL2Element.scalar(F, -1)).twist(MuM(m, int(rng.integers(m))))
    checks = [
        ((s(g1) * s(g2)) * s(g3) == s(g1) * (s(g2) * s(g3)), f"cocycle p={p} m={m}: {g1}, {g2}, {g3}"),
        (commutator(torus_matrix(u), s(torus_matrix(x.value))) == flicker_symbol(x, u, m),
         f"torus commutator in {K}, m={m}: x={x}, u={u}"),
        (commutator(torus_matrix(u), over_iota) == norm_symbol(x0, u.norm(), m, omega),
         f"commutator over iota in {K}, m={m}: x0={x0}, u={u}, omega={omega}"),
        (commutator(g1, minus) == hilbert_m(F, m, -1, g1.det), f"conjugating a lift of -1, p={p} m={m}: {g1}"),
    ]
    if m % 2 == 0:
        psi = AdditiveCharacter(F)
        n = int(rng.integers(1, 4))
        lift = minus_one_tilde(m, psi, n, F)
        c = random_rational(rng, 50)
        twisted = minus_one_tilde(m, psi.twisted(c), n, F)
        expected = lift.root * RootOfUnity.from_sign(hilbert2(F, -1, c) ** n)
        checks += [
            (minus_one_square_kernel(F, m, lift).is_one, f"lift of -1 squares to 1, p={p} m={m} n={n}"),
            (twisted.root == expected, f"lift of -1 under psi -> psi_{c}, p={p} m={m} n={n}"),
        ]
    return _first_failure(checks)


def _trial_good(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    p, m = _pick(rng, CONFIGS)
    F = _field(p, cfg)
    K = make_etale(F, _pick(rng, ALGEBRAS))
    x = random_regular_norm_one(K, rng)
    kernel = iota_kernel(m, K)
    return _first_failure([
        (is_good(K, x, m) == good_by_symbols(x, m), f"good classification in {K}, m={m}: {x}"),
        (all((g ** kernel.order).is_one for g in kernel.generators), f"kernel generator order in {K}, m={m}"),
        (all(kernel.contains(g) for g in kernel.generators), f"kernel generators in {K}, m={m}"),
    ])


def _random_rank_one(F: LocalField, rng: np.random.Generator, algebras: Sequence[str]) -> TorusParam:
    return make_torus_param(F, [(_pick(rng, algebras), random_nonzero(F, rng, -1, 1))])


def _trial_calibration(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    p, m = _pick(rng, CONFIGS)
    F = _field(p, cfg)
    param = _random_rank_one(F, rng, ALGEBRAS)
    K = param.blocks[0].algebra
    sigma = [random_sign(rng) if m % 4 == 0 else 1]
    delta0 = random_regular_norm_one(K, rng)
    elem = calibrated(param, m, [delta0], sigma)
    g1, g2 = random_gl2(F, rng), random_gl2(F, rng)

    def cad(gs: Sequence[GL2Element], e: CalibratedElement) -> CalibratedElement:
        return cad_sigma(m, gs, e.sigma, e)

    moved = cad([g1], elem)
    other = calibrated(param, m, [random_regular_norm_one(K, rng)], sigma)
    t = torus_element_matrix(elem, 0, random_torus_unit(K, rng))
    nu = random_nonzero(F, rng)
    unipotent = NormOneElement.from_ratio(K.one() + K.sqrt_D() * F.p)
    z = MuM(m, int(rng.integers(m)))
    shifted = minus_one_shift(elem, 0, z)
    shifted_image = minus_one_shift(moved, 0, z)
    if m % 4 == 2:
        shifted_image = shifted_image.twist(MuM.from_sign(m, sgn_quadratic(K, g1.det)))
    checks = [
        (moved.is_well_formed, f"CAd image off the moved torus, m={m}: {g1}"),
        (cad([GL2Element.identity(F)], elem).same_as(elem), f"CAd(1) is not the identity, m={m}"),
        (cad([g1], cad([g2], elem)).same_as(cad([g1 @ g2], elem)), f"CAd composition, m={m}: {g1}, {g2}"),
        (cad([t], elem).same_as(elem), f"CAd by a torus element, m={m}: {t}"),
        (cad([g1], elem * other).same_as(moved * cad([g1], other)), f"CAd multiplicativity, m={m}: {g1}"),
        (cali_factor(m, nu, unipotent) == 1, f"C_m on a topologically unipotent element, m={m}: nu={nu}"),
        (cad([g1], elem.twist(z)).same_as(moved.twist(z)), f"CAd against kernel translation by {z}: {g1}"),
        (cad([g1], shifted).same_as(shifted_image), f"CAd of a lift of -1 times the element, m={m}: {g1}"),
    ]
    if m % 2 == 0 and not K.is_split:
        minus = NormOneElement(-K.one())
        checks.append((
            cali_factor(m, nu, minus) == hilbert2(F, -1, nu) * sgn_quadratic(K, nu),
            f"C_m(nu, -1) in {K}: nu={nu}",
        ))
    if m % 4 == 0:
        flipped = cad([g1], calibrated(param, m, [-delta0], sigma))
        ratio = moved.zeta / flipped.zeta
        checks.append((
            ratio == MuM.from_sign(m, sgn_quadratic(K, g1.det)),
            f"dependence on delta_0 in {K}, m={m}: {g1}",
        ))
    gs = [random_gl2(F, rng)]
    xs = (random_regular_norm_one(K, rng),)
    same = equiv_params(RegClassParam(param, xs), RegClassParam(transport_param(param, gs), xs))
    checks.append((same == inv_of(param, gs).is_trivial, f"equivalence against inv in {K}: {gs[0]}"))
    return _first_failure(checks)


def _framed_element(
    F: LocalField, rng: np.random.Generator, param: TorusParam, m: int, sigma: int
) -> CalibratedElement:
    """Calibrated element in a random SL(2) frame with nonzero lower-left entry."""
    K = param.blocks[0].algebra
    delta0 = random_regular_norm_one(K, rng)
    while True:
        elem = calibrated(param, m, [delta0], [sigma], frames=[random_sl2(F, rng)])
        if not elem.cover.blocks[0].c.is_zero:
            return elem


def _trial_transfer(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    p, m = _pick(rng, EVEN_CONFIGS)
    F = _field(p, cfg)
    psi = AdditiveCharacter(F, _pick(rng, (0, 1)))
    param = _random_rank_one(F, rng, ALGEBRAS)
    K = param.blocks[0].algebra
    plus = _framed_element(F, rng, param, m, 1)
    minus = _framed_element(F, rng, param, m, -1) if m % 4 == 0 else plus
    s, g = random_sl2(F, rng), random_gl2(F, rng)
    nu = g.det

    def conj(gs: Sequence[GL2Element], e: CalibratedElement) -> CalibratedElement:
        return cad_sigma(m, gs, e.sigma, e)

    kappa_minus = sgn_quadratic(K, nu) if m % 4 == 2 else 1
    dp, dm = delta_plus(m, psi, plus), delta_minus(m, psi, minus)
    checks = [
        (delta_plus(m, psi, conj([s], plus)) == dp, f"Delta+ SL(2) invariance, m={m}: {s}"),
        (delta_minus(m, psi, conj([s], minus)) == dm, f"Delta- SL(2) invariance, m={m}: {s}"),
        (delta_plus(m, psi, conj([g], plus)) == dp, f"Delta+ under CAd, m={m}: {g}"),
        (delta_minus(m, psi, conj([g], minus)) == dm * RootOfUnity.from_sign(kappa_minus),
         f"Delta- under CAd, m={m}: {g}"),
    ]
    if m == 2:
        block = plus.cover.block(0)
        moved = block.conj(g)
        c2 = RootOfUnity.from_sign(cali_factor(2, nu, plus.delta0[0]))
        checks += [
            (m2_compare(psi, plus).agree, f"Delta+ against nabla p={p}: {plus.cover.blocks[0]}"),
            (nabla_rank1(psi, moved) == nabla_rank1(psi, block) * c2, f"nabla under PGL(2) p={p}: {g}"),
        ]
    return _first_failure(checks)


def _random_y(F: LocalField, rng: np.random.Generator, param: TorusParam) -> YParam:
    while True:
        try:
            return YParam(param, tuple(random_nonzero(F, rng, -1, 1) for _ in range(param.n)))
        except NotRegular:
            continue


def _unless_irregular(check: Callable[[], bool]) -> bool:
    """Run a check whose rescaled input may lose regularity; such inputs are vacuous."""
    try:
        return check()
    except NotRegular:
        return True


def _random_field_param(F: LocalField, rng: np.random.Generator, n: int) -> TorusParam:
    return make_torus_param(F, [(_pick(rng, FIELD_ALGEBRAS), random_nonzero(F, rng, -1, 1)) for _ in range(n)])


def _trial_dagger(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    p = _pick(rng, DAGGER_PRIMES)
    F = _field(p, cfg)
    n = int(rng.integers(1, 4))
    param = _random_field_param(F, rng, n)
    Y = _random_y(F, rng, param)
    gamma0 = tuple(random_sign(rng) for _ in range(n))
    minus_all = tuple(-1 for _ in range(n))
    m = 2
    psi = AdditiveCharacter(F, _pick(rng, (0, 1)))
    value = dagger_char(m, param, Y, gamma0)
    d = [random_nonzero(F, rng) for _ in range(n)]
    sgn = 1
    for blk, x in zip(param.blocks, d):
        sgn *= sgn_quadratic(blk.algebra, x)
    base = dagger_char(m, param, Y, minus_all)
    perturbed = [y * (1 + random_integral(F, rng) * p) for y in Y.y_primes]
    perm = [int(i) for i in rng.permutation(n)]
    checks = [
        (dagger_char(m, param, Y, gamma0, DaggerMethod.WEIL, psi) == value,
         f"hasse and weil methods disagree p={p}: gamma0={gamma0}"),
        (interplay_check(m, param, Y, gamma0).holds, f"interplay p={p}: gamma0={gamma0}"),
        (_unless_irregular(lambda: dagger_char(m, param, Y.scaled(d), minus_all) == base * sgn),
         f"dagger variance in y, p={p}: {d}"),
        (dagger_char(m, param.scale_c(d), Y.with_torus(param.scale_c(d)), minus_all) == base * sgn,
         f"dagger variance in c, p={p}: {d}"),
        (dagger_char(m, param.relabel(perm), YParam(param.relabel(perm), tuple(Y.y_primes[i] for i in perm)),
                     tuple(gamma0[i] for i in perm)) == value,
         f"dagger under relabeling p={p}: {perm}"),
        (epsilon_char(Side.SP, param, Y, tuple(1 for _ in range(n))) == 1, "epsilon at the identity"),
    ]
    checks.append((
        _unless_irregular(lambda: dagger_char(m, param, YParam(param, tuple(perturbed)), gamma0) == value),
        f"dagger on the 1 + p coset, p={p}",
    ))
    return _first_failure(checks)


def _trial_moment_map(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    F = _field(_pick(rng, PRIMES), cfg)
    n = int(rng.integers(1, 4))
    param = make_torus_param(F, [(_pick(rng, ALGEBRAS), random_nonzero(F, rng, -1, 1)) for _ in range(n)])
    Y = _random_y(F, rng, param)
    space = mm_space(param, Y)
    report = mm_eigen_check(param, Y)
    failed = [name for name, ok in report.checks.items() if not ok]
    return _first_failure([
        (space.rank == 2 * n + 1, f"moment-map space has rank {space.rank}"),
        (not failed, f"moment-map checks {failed} on {space}"),
    ])


def _trial_product_formula(rng: np.random.Generator, cfg: ComputeConfig) -> Optional[str]:
    a, b = random_rational(rng), random_rational(rng)
    report = product_formula_check(a, b)
    return None if report.holds else f"product formula for ({a}, {b}): {report.places}"


SUITES: dict[str, Trial] = {
    "localfield": _trial_localfield,
    "symbols": _trial_symbols,
    "weil": _trial_weil,
    "cover": _trial_cover,
    "good": _trial_good,
    "calibration": _trial_calibration,
    "transfer": _trial_transfer,
    "dagger": _trial_dagger,
    "moment_map": _trial_moment_map,
    "product_formula": _trial_product_formula,
}


# ============ Runner ============

def run_suite(name: str, seed: int, iters: int, config: Optional[ComputeConfig] = None) -> SuiteReport:
    """Run ``iters`` trials of one suite; errors raised inside a trial count as failures."""
    config = config or ComputeConfig()
    trial = SUITES[name]
    rng = suite_rng(seed, name)
    report = SuiteReport(name=name)
    for _ in range(iters):
        try:
            problem = trial(rng, config)
        except ComputationError as exc:
            problem = f"{type(exc).__name__}: {exc}"
        if problem is None:
            report.passed += 1
            continue
        report.failed += 1
        if report.first_counterexample is None:
            report.first_counterexample = problem
            logger.warning(f"suite {name}: {problem}")
    logger.info(f"suite {name}: {report.passed} passed, {report.failed} failed")
    return report


def selftest(seed: int, iters: int, config: Optional[ComputeConfig] = None,
             suites: Optional[Sequence[str]] = None) -> SelftestReport:
    """Run the property suites and collect a machine-readable report.

    Args:
        seed: Seed shared by all suites
        iters: Trials per suite, at least 1
        config: Precision and other computation settings
        suites: Subset of suite names (default all, in a fixed order)

    Raises:
        ValueError: iters < 1 or an unknown suite name
    """
    if iters < 1:
        raise ValueError(f"iters must be at least 1, got {iters}")
    names = list(suites) if suites else list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites: {unknown}")
    report = SelftestReport(seed=seed, iters=iters)
    for name in names:
        report.suites.append(run_suite(name, seed, iters, config))
    report.failures = sum(s.failed for s in report.suites)
    return report
