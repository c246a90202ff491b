"""Computation settings shared by the library and the command line."""

import os
from dataclasses import asdict, dataclass
from typing import Optional

from loguru import logger

DEFAULT_PRECISION = 32
PRECISION_ENV_VAR = "BD_COVER_PRECISION"


def default_precision() -> int:
    """Default number of uniformizer digits, honouring the environment override."""
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {PRECISION_ENV_VAR}={raw!r}")
        return DEFAULT_PRECISION
    if value < 4:
        logger.warning(f"{PRECISION_ENV_VAR}={value} too small, using 4")
        return 4
    return value


@dataclass
class ComputeConfig:
    """Global knobs for a run.

    Attributes:
        p: Residue characteristic of the base field
        m: Degree of the cover
        precision: Relative precision in uniformizer digits
        psi_level: Level of the additive character (trivial on p^(level+1))
        psi_twist: Twist c of the additive character, as a rational literal
        seed: Seed for randomized suites
        snap_tolerance: Tolerance for snapping Gauss sums to eighth roots
    """

    p: int = 5
    m: int = 2
    precision: int = DEFAULT_PRECISION
    psi_level: int = 0
    psi_twist: str = "1"
    seed: int = 0
    snap_tolerance: float = 1e-6

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ComputeConfig":
        """Create from dictionary, ignoring unknown keys."""
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    @classmethod
    def from_env(cls, **overrides: Optional[object]) -> "ComputeConfig":
        """Build a config whose precision defaults to the environment override."""
        values = {k: v for k, v in overrides.items() if v is not None}
        values.setdefault("precision", default_precision())
        return cls.from_dict(values)
