"""Exception types raised by the validated-numerics pipeline."""


class BryantError(Exception):
    """Base class for all package errors."""


class DivisionByZeroInterval(BryantError, ZeroDivisionError):
    """The denominator enclosure contains zero."""


class BranchAmbiguity(BryantError):
    """Neither square root is unambiguously nearest the branch hint."""


class BranchPointHit(BryantError):
    """A path point lies on (or numerically at) a branch point of the surface."""


class SubdivisionLimitExceeded(BryantError):
    """Adaptive bound refinement did not converge within the piece budget."""


class PreconditionViolation(BryantError, ValueError):
    """An a-priori error bound was requested outside its domain of validity."""


class DegenerateDenominator(BryantError):
    """A period function denominator enclosure contains zero."""


class OutOfRange(BryantError, ValueError):
    """Argument lies outside the domain of a scalar solver."""


class InvalidRange(BryantError, ValueError):
    """Parameter range for certification is malformed."""


class NonUnimodular(BryantError, ValueError):
    """Matrix determinant is not 1 within tolerance."""


class GridSingularity(BryantError, ValueError):
    """A mesh grid node coincides with a puncture of the Weierstrass data."""
