"""Command-line entry point: one subcommand per computation, JSON on stdout."""

import argparse
import itertools
import sys
from fractions import Fraction
from typing import Callable, Optional

from loguru import logger

from bd_cover.core.config import DEFAULT_PRECISION, PRECISION_ENV_VAR, ComputeConfig
from bd_cover.core.cover import CoverElement, GL2Element, is_good
from bd_cover.core.errors import ComputationError
from bd_cover.core.etale import EtaleElement, NormOneElement, QuadEtale, make_etale
from bd_cover.core.localfield import (
    AdditiveCharacter,
    FieldElement,
    LocalField,
    MuM,
    make_field,
)
from bd_cover.core.packetdata import (
    DaggerMethod,
    YParam,
    dagger_char,
    interplay_check,
    mm_eigen_check,
    mm_space,
)
from bd_cover.core.quadforms import DiagQuadForm, disc_pm, hasse, weil_index
from bd_cover.core.selftest import SUITES, selftest
from bd_cover.core.stabconj import (
    TorusParam,
    cad_sigma,
    cali_factor,
    calibrated,
    inv_of,
    kappa_eval,
    make_torus_param,
)
from bd_cover.core.symbols import hilbert_m, product_formula_check
from bd_cover.core.transfer import delta_minus, delta_plus, m2_compare, nabla_rank1
from bd_cover.models.schemas import (
    CadResult,
    CaliResult,
    DaggerResult,
    DeltaResult,
    ErrorResult,
    GammaResult,
    GoodResult,
    InterplayEntry,
    InterplayResult,
    InvResult,
    MomentMapResult,
    MuMModel,
    NablaResult,
    Output,
    ProductFormulaResult,
    RootOfUnityModel,
    SymbolResult,
)

LOG_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)


class UsageError(ValueError):
    """Malformed command-line literal."""


# ============ Literal parsing ============

def _element(F: LocalField, text: str) -> FieldElement:
    try:
        return F.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc


def _elements(F: LocalField, text: str) -> list[FieldElement]:
    return [_element(F, part) for part in text.split(",")]


def _algebra(F: LocalField, text: str) -> QuadEtale:
    label = text.strip()
    if label in ("split", "1", "u", "p", "up"):
        return make_etale(F, label)
    try:
        return make_etale(F, Fraction(label))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse algebra {text!r}") from exc


def _etale_element(K: QuadEtale, text: str) -> EtaleElement:
    """``a,b`` for a + b sqrt D (the two components when split), or a field literal."""
    parts = text.split(",")
    if len(parts) == 2:
        a, b = (_element(K.base, part) for part in parts)
        return K.element(a, b)
    if len(parts) == 1 and not K.is_split:
        return K.from_field(_element(K.field, parts[0]))
    raise UsageError(f"cannot parse an element of {K} from {text!r}")


def _matrix(F: LocalField, text: str) -> GL2Element:
    entries = _elements(F, text)
    if len(entries) != 4:
        raise UsageError(f"a matrix needs four entries a,b,c,d, got {text!r}")
    return GL2Element.of(F, *entries)


def _matrices(F: LocalField, text: Optional[str], n: int) -> list[GL2Element]:
    if not text:
        return [GL2Element.identity(F) for _ in range(n)]
    gs = [_matrix(F, part) for part in text.split(";")]
    if len(gs) != n:
        raise UsageError(f"expected {n} matrices, got {len(gs)}")
    return gs


def _param(F: LocalField, text: str) -> TorusParam:
    """``D:c',D:c'`` with D in {split, u, p, up} or a rational radicand."""
    blocks = []
    for part in text.split(","):
        label, _, c = part.partition(":")
        blocks.append((_algebra(F, label).D, _element(F, c or "1")))
    return make_torus_param(F, blocks)


def _signs(text: Optional[str], n: int) -> list[int]:
    if not text:
        return [1] * n
    table = {"+": 1, "1": 1, "+1": 1, "-": -1, "-1": -1}
    try:
        signs = [table[s.strip()] for s in text.split(",")]
    except KeyError as exc:
        raise UsageError(f"cannot parse signs {text!r}") from exc
    if len(signs) != n:
        raise UsageError(f"expected {n} signs, got {len(signs)}")
    return signs


def _norm_ones(param: TorusParam, text: str) -> list[NormOneElement]:
    parts = text.split(";")
    if len(parts) != param.n:
        raise UsageError(f"expected {param.n} torus elements, got {len(parts)}")
    return [NormOneElement(_etale_element(b.algebra, t)) for b, t in zip(param.blocks, parts)]


def _y_param(F: LocalField, param: TorusParam, text: str) -> YParam:
    ys = _elements(F, text)
    if len(ys) != param.n:
        raise UsageError(f"expected {param.n} values of y', got {len(ys)}")
    return YParam(param, tuple(ys))


# ============ Commands ============

class Context:
    """Field, character and settings shared by all commands."""

    def __init__(self, config: ComputeConfig):
        self.config = config
        self.F = make_field(config.p, precision=config.precision)
        self.psi = AdditiveCharacter(self.F, config.psi_level, Fraction(config.psi_twist))

    @property
    def m(self) -> int:
        return self.config.m


def cmd_symbol(args: argparse.Namespace, ctx: Context) -> Output:
    return SymbolResult(mu_m=MuMModel.of(hilbert_m(ctx.F, ctx.m, _element(ctx.F, args.a), _element(ctx.F, args.b))))


def cmd_gamma(args: argparse.Namespace, ctx: Context) -> Output:
    form = DiagQuadForm.of(ctx.F, _elements(ctx.F, args.form))
    return GammaResult(gamma=RootOfUnityModel.of(weil_index(ctx.psi, form)))


def cmd_good(args: argparse.Namespace, ctx: Context) -> Output:
    K = _algebra(ctx.F, args.torus)
    x = NormOneElement(_etale_element(K, args.x))
    return GoodResult(good=is_good(K, x, ctx.m))


def cmd_inv(args: argparse.Namespace, ctx: Context) -> Output:
    param = _param(ctx.F, args.blocks)
    inv = inv_of(param, _matrices(ctx.F, args.g, param.n))
    return InvResult(
        inv=inv.labels(),
        kappa_plus=kappa_eval("+", param, inv),
        kappa_minus=kappa_eval("-", param, inv),
    )


def cmd_cali(args: argparse.Namespace, ctx: Context) -> Output:
    K = _algebra(ctx.F, args.torus)
    gamma0 = NormOneElement(_etale_element(K, args.gamma0))
    return CaliResult(cali=cali_factor(ctx.m, _element(ctx.F, args.nu), gamma0))


def _calibrated(args: argparse.Namespace, ctx: Context):
    param = _param(ctx.F, args.blocks)
    delta0 = _norm_ones(param, args.delta0)
    sigma = _signs(args.sigma, param.n)
    frames = _matrices(ctx.F, args.frame, param.n)
    zeta = MuM(ctx.m, args.zeta)
    return calibrated(param, ctx.m, delta0, sigma, zeta, frames)


def cmd_cad(args: argparse.Namespace, ctx: Context) -> Output:
    elem = _calibrated(args, ctx)
    moved = cad_sigma(ctx.m, _matrices(ctx.F, args.g, elem.param.n), elem.sigma, elem)
    return CadResult(
        zeta=MuMModel.of(moved.zeta),
        blocks=[[str(e) for e in g.entries()] for g in moved.cover.blocks],
        well_formed=moved.is_well_formed,
    )


def cmd_delta(args: argparse.Namespace, ctx: Context) -> Output:
    elem = _calibrated(args, ctx)
    result = DeltaResult()
    if elem.sigma[0] == 1:
        result.delta_plus = RootOfUnityModel.of(delta_plus(ctx.m, ctx.psi, elem))
    if ctx.m % 4 == 2 or elem.sigma[0] == -1:
        result.delta_minus = RootOfUnityModel.of(delta_minus(ctx.m, ctx.psi, elem))
    if ctx.m == 2 and elem.param.n == 1:
        comparison = m2_compare(ctx.psi, elem)
        result.nabla = RootOfUnityModel.of(comparison.nabla)
        result.agree = comparison.agree
    return result


def cmd_nabla(args: argparse.Namespace, ctx: Context) -> Output:
    gamma = CoverElement(_matrix(ctx.F, args.g), MuM(2, args.zeta))
    return NablaResult(nabla=RootOfUnityModel.of(nabla_rank1(ctx.psi, gamma)))


def cmd_dagger(args: argparse.Namespace, ctx: Context) -> Output:
    param = _param(ctx.F, args.blocks)
    Y = _y_param(ctx.F, param, args.y)
    method = DaggerMethod(args.method)
    value = dagger_char(ctx.m, param, Y, _signs(args.gamma0, param.n), method, ctx.psi)
    return DaggerResult(dagger=value, method=method.value)


def cmd_interplay(args: argparse.Namespace, ctx: Context) -> Output:
    param = _param(ctx.F, args.blocks)
    Y = _y_param(ctx.F, param, args.y)
    points = []
    for gamma0 in itertools.product((1, -1), repeat=param.n):
        report = interplay_check(ctx.m, param, Y, gamma0)
        points.append(InterplayEntry(
            gamma0=list(gamma0), eps_sp=report.eps_sp, eps_so=report.eps_so,
            dagger=report.dagger, holds=report.holds,
        ))
    return InterplayResult(points=points, holds=all(p.holds for p in points))


def cmd_mm(args: argparse.Namespace, ctx: Context) -> Output:
    param = _param(ctx.F, args.blocks)
    Y = _y_param(ctx.F, param, args.y)
    space = mm_space(param, Y)
    report = mm_eigen_check(param, Y)
    return MomentMapResult(
        space=[str(e) for e in space.entries],
        classes=space.classes(),
        disc=disc_pm(space),
        hasse=hasse(space),
        char_y=report.char_y,
        char_y_prime=report.char_y_prime,
        checks=report.checks,
        passed=report.passed,
    )


def cmd_product_formula(args: argparse.Namespace, ctx: Context) -> Output:
    try:
        a, b = Fraction(args.a), Fraction(args.b)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    report = product_formula_check(a, b, precision=ctx.config.precision)
    return ProductFormulaResult(places=report.places, product=report.product, holds=report.holds)


def cmd_selftest(args: argparse.Namespace, ctx: Context) -> Output:
    suites = args.suites.split(",") if args.suites else None
    return selftest(ctx.config.seed, args.iters, ctx.config, suites)


COMMANDS: dict[str, Callable[[argparse.Namespace, Context], Output]] = {
    "symbol": cmd_symbol,
    "gamma": cmd_gamma,
    "good": cmd_good,
    "inv": cmd_inv,
    "cali": cmd_cali,
    "cad": cmd_cad,
    "delta": cmd_delta,
    "nabla": cmd_nabla,
    "dagger": cmd_dagger,
    "interplay": cmd_interplay,
    "mm": cmd_mm,
    "product-formula": cmd_product_formula,
    "selftest": cmd_selftest,
}


# ============ Parser ============

def _global_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5, help="Residue characteristic, an odd prime (default: 5)")
    common.add_argument("--m", type=int, default=2, help="Degree of the cover (default: 2)")
    common.add_argument(
        "--precision",
        type=int,
        default=None,
        help=f"Digits of p-adic precision (default: ${PRECISION_ENV_VAR} or {DEFAULT_PRECISION})",
    )
    common.add_argument("--psi-level", type=int, default=0, help="Conductor level of psi (default: 0)")
    common.add_argument("--psi-twist", default="1", help="Rational twist c of psi_c (default: 1)")
    common.add_argument("--seed", type=int, default=0, help="Seed for randomized commands (default: 0)")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"],
        help="Log level on stderr (default: WARNING)",
    )
    return common


def _calibrated_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--blocks", required=True, help="Torus blocks D:c', comma separated")
    sub.add_argument("--delta0", required=True, help="delta_0 per block as a,b; blocks separated by ';'")
    sub.add_argument("--sigma", default=None, help="Signs per block, e.g. '+,-' (default: all +)")
    sub.add_argument("--frame", default=None, help="Frame matrices a,b,c,d per block (default: identity)")
    sub.add_argument("--zeta", type=int, default=0, help="Kernel coordinate exponent (default: 0)")


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(
        prog="bd-cover",
        description="Exact computations on covers of Sp(2n) over p-adic fields",
        parents=[common],
    )
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return subs.add_parser(name, help=help_text, parents=[common])

    sub = add("symbol", "Hilbert symbol (a, b)_{F,m}")
    sub.add_argument("--a", required=True)
    sub.add_argument("--b", required=True)

    sub = add("gamma", "Weil index of a diagonal form")
    sub.add_argument("--form", required=True, help="Diagonal entries, comma separated")

    sub = add("good", "Whether a torus element lifts to a good element")
    sub.add_argument("--torus", required=True, help="split, u, p, up or a radicand")
    sub.add_argument("--x", required=True, help="Norm-one element as a,b")

    sub = add("inv", "inv class and kappa values of a stable conjugation")
    sub.add_argument("--blocks", required=True, help="Torus blocks D:c', comma separated")
    sub.add_argument("--g", default=None, help="Matrices a,b,c,d per block, separated by ';'")

    sub = add("cali", "Calibration factor C_m(nu, gamma_0)")
    sub.add_argument("--torus", required=True, help="split, u, p, up or a radicand")
    sub.add_argument("--gamma0", required=True, help="Norm-one element as a,b")
    sub.add_argument("--nu", required=True)

    sub = add("cad", "Calibrated stable conjugation")
    _calibrated_options(sub)
    sub.add_argument("--g", default=None, help="Matrices a,b,c,d per block, separated by ';'")

    sub = add("delta", "Transfer factors Delta+ and Delta- of a rank-one element")
    _calibrated_options(sub)

    sub = add("nabla", "nabla on the twofold cover of SL(2)")
    sub.add_argument("--g", required=True, help="Matrix a,b,c,d of determinant 1")
    sub.add_argument("--zeta", type=int, default=0, help="Kernel coordinate exponent (default: 0)")

    for name, help_text in (
        ("dagger", "Dagger character at a torsion point"),
        ("interplay", "epsilon_SO / epsilon_Sp against the dagger character"),
        ("mm", "Moment-map quadratic space and eigenvalue checks"),
    ):
        sub = add(name, help_text)
        sub.add_argument("--blocks", required=True, help="Torus blocks D:c', comma separated")
        sub.add_argument("--y", required=True, help="y' per block, comma separated")
        if name == "dagger":
            sub.add_argument("--gamma0", default=None, help="Signs per block (default: all +)")
            sub.add_argument("--method", default="hasse", choices=[m.value for m in DaggerMethod])

    sub = add("product-formula", "Hilbert symbols of two rationals at every place")
    sub.add_argument("--a", required=True)
    sub.add_argument("--b", required=True)

    sub = add("selftest", "Run the randomized property suites")
    sub.add_argument("--iters", type=int, default=200, help="Trials per suite (default: 200)")
    sub.add_argument("--suites", default=None, help=f"Subset of {','.join(SUITES)}")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest" and args.iters < 1:
        parser.error("--iters must be at least 1")

    logger.remove()
    logger.add(sys.stderr, level=args.log_level, format=LOG_FORMAT)

    config = ComputeConfig.from_env(
        p=args.p,
        m=args.m,
        precision=args.precision,
        psi_level=args.psi_level,
        psi_twist=args.psi_twist,
        seed=args.seed,
    )
    logger.debug(f"{args.command} with {config.to_dict()}")
    try:
        result = COMMANDS[args.command](args, Context(config))
    except UsageError as exc:
        parser.error(str(exc))
    except ComputationError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        print(ErrorResult(error=type(exc).__name__, message=str(exc)).to_json())
        return 1
    except ValueError as exc:
        parser.error(str(exc))
    print(result.to_json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
