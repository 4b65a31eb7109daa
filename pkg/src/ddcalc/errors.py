"""Exception hierarchy.

The CLI maps these onto exit codes: usage problems exit 1, anything derived
from :class:`DomainError` exits 2 and :class:`ToleranceNotMet` exits 3.
"""


class DDCalcError(Exception):
    """Base class for all library errors."""


class DomainError(DDCalcError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class CapabilityError(DomainError):
    """A function descriptor cannot supply the derivative order required."""


class GeometryError(DomainError):
    """A contour touches a node or encloses a singularity."""


class KernelSingularityError(DomainError):
    """A contraction kernel is not finite at a needed eigenvalue tuple."""

    def __init__(self, message, tup=None):
        super().__init__(message)
        self.tuple = tup


class PreconditionError(DomainError):
    """Inputs violate a structural precondition (e.g. non-commuting family)."""


class ToleranceNotMet(DDCalcError, ArithmeticError):
    """An iterative numerical method stopped before reaching its tolerance.

    The best available estimate and its error are attached so that callers
    can decide whether to accept them.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
