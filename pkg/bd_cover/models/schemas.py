"""Pydantic schemas for the JSON documents printed by the command line.

Roots of unity serialize as {"num", "den"}, elements of mu_m as {"m", "exp"}
and square classes as one of "1", "u", "p", "up".
"""

from typing import Optional

from pydantic import BaseModel, Field

from bd_cover.core.localfield import MuM, RootOfUnity, SquareClass


class MuMModel(BaseModel):
    """zeta_m^exp for the canonical generator zeta_m."""
    m: int = Field(ge=1)
    exp: int = Field(ge=0)

    @classmethod
    def of(cls, z: MuM) -> "MuMModel":
        return cls(m=z.m, exp=z.exp)


class RootOfUnityModel(BaseModel):
    """exp(2 pi i num / den)."""
    num: int = Field(ge=0)
    den: int = Field(ge=1)

    @classmethod
    def of(cls, z: RootOfUnity) -> "RootOfUnityModel":
        return cls(num=z.num, den=z.den)


class Output(BaseModel):
    """Base for every command result."""

    def to_json(self) -> str:
        """Convert to JSON string."""
        return self.model_dump_json()


# ============ Command results ============

class SymbolResult(Output):
    mu_m: MuMModel


class GammaResult(Output):
    gamma: RootOfUnityModel


class GoodResult(Output):
    good: bool


class InvResult(Output):
    inv: list[str]
    kappa_plus: int
    kappa_minus: int


class CaliResult(Output):
    cali: int


class CadResult(Output):
    zeta: MuMModel
    blocks: list[list[str]]
    well_formed: bool


class DeltaResult(Output):
    delta_plus: Optional[RootOfUnityModel] = None
    delta_minus: Optional[RootOfUnityModel] = None
    nabla: Optional[RootOfUnityModel] = None  # m = 2 only
    agree: Optional[bool] = None


class NablaResult(Output):
    nabla: RootOfUnityModel


class DaggerResult(Output):
    dagger: int
    method: str


class InterplayEntry(BaseModel):
    gamma0: list[int]
    eps_sp: int
    eps_so: int
    dagger: int
    holds: bool


class InterplayResult(Output):
    points: list[InterplayEntry]
    holds: bool


class MomentMapResult(Output):
    space: list[str]
    classes: list[SquareClass]
    disc: SquareClass
    hasse: int
    char_y: list[str]
    char_y_prime: list[str]
    checks: dict[str, bool]
    passed: bool


class ProductFormulaResult(Output):
    places: dict[str, int]
    product: int
    holds: bool


# ============ Self-test ============

class SuiteReport(BaseModel):
    """Pass/fail counts of one property suite."""
    name: str
    passed: int = 0
    failed: int = 0
    first_counterexample: Optional[str] = None


class SelftestReport(Output):
    seed: int
    iters: int
    suites: list[SuiteReport] = Field(default_factory=list)
    failures: int = 0


class ErrorResult(Output):
    """Printed on exit code 1."""
    error: str
    message: str
