"""Exception hierarchy for cover computations.

Every failure raised by the library derives from ``ComputationError`` so the
command line can map it to exit status 1 in one place.
"""


class ComputationError(Exception):
    """Base class for all errors raised while computing."""


class BadPrime(ComputationError):
    """The residue characteristic is even or not prime."""


class NotNonSquare(ComputationError):
    """A radicand that must be a non-square is a square."""


class PrecisionExhausted(ComputationError):
    """Every tracked digit is zero, so the value cannot be determined."""


class ZeroResidue(ComputationError):
    """A residue-field element that must be nonzero is zero."""


class BadModulus(ComputationError):
    """The cover degree m does not divide q - 1, or p divides m."""


class SnapFailure(ComputationError):
    """A normalized Gauss sum is not close to an eighth root of unity."""


class DegenerateInput(ComputationError):
    """An input violates a structural requirement (norm one, nonzero, ...)."""


class NotRegular(ComputationError):
    """A torus or Lie algebra element that must be regular is not."""


class BadSign(ComputationError):
    """A sign vector carries a minus sign while 4 does not divide m."""


class UnsupportedParameter(ComputationError):
    """The requested configuration is outside the supported model."""


class AsymmetricOrbit(ComputationError):
    """A toral invariant was requested on a non-symmetric root orbit."""


class LowerLeftZero(ComputationError):
    """The lower-left entry vanishes and conjugation was not allowed."""
