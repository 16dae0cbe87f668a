"""Exception types raised across the package.

Every error derives from :class:`HbarCheckError`, and most also derive from
``ValueError`` so callers that only care about bad input can catch that.
"""


class HbarCheckError(Exception):
    """Base class for all package errors."""


class NotSquare(HbarCheckError, ValueError):
    pass


class NotSymmetric(HbarCheckError, ValueError):
    pass


class NotHermitian(HbarCheckError, ValueError):
    pass


class NotPositiveDefinite(HbarCheckError, ValueError):
    pass


class NoConvergence(HbarCheckError, ArithmeticError):
    pass


class ZeroModes(HbarCheckError, ValueError):
    pass


class OddDimension(HbarCheckError, ValueError):
    pass


class NotSPD(NotPositiveDefinite):
    """Covariance matrix is singular, indefinite or too close to degenerate."""


class CrossCheckMismatch(HbarCheckError, ArithmeticError):
    """Two independent algorithms disagreed beyond tolerance."""


class DimensionMismatch(HbarCheckError, ValueError):
    pass


class NonPositiveWidth(HbarCheckError, ValueError):
    pass


class NotAQuantumState(HbarCheckError, ValueError):
    pass


class EdgeLeakage(HbarCheckError, ValueError):
    """Wavefunction does not decay at the grid edges.

    ``magnitude`` carries the largest boundary sample modulus.
    """

    def __init__(self, message, magnitude=None):
        super().__init__(message)
        self.magnitude = magnitude


class NotNormalized(HbarCheckError, ValueError):
    pass


class GridMismatch(HbarCheckError, ValueError):
    pass


class MassDeficit(HbarCheckError, ValueError):
    pass


class HermiticityViolation(HbarCheckError, ValueError):
    pass


class PurityCrossCheckMismatch(CrossCheckMismatch):
    pass


class PointOutOfBox(HbarCheckError, ValueError):
    pass


class ParseError(HbarCheckError, ValueError):
    """Input file could not be parsed; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
