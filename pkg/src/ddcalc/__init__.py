"""Divided differences, the functions they generate, and a multi-slot
functional calculus for Hermitian matrices."""

from .catalog import ScalarFunction, by_name
from .ddcore import (
    NodeSystem,
    dd_confluent,
    dd_contour,
    dd_explicit,
    dd_hermite_genocchi,
    dd_recursive,
    dd_substitute,
    leibniz_rhs,
)
from .errors import (
    CapabilityError,
    DDCalcError,
    DomainError,
    GeometryError,
    KernelSingularityError,
    PreconditionError,
    ToleranceNotMet,
)
from .funcs import h_func, hcm, m_func, mod_log

__version__ = "0.1.0"

__all__ = [
    "ScalarFunction",
    "by_name",
    "NodeSystem",
    "dd_confluent",
    "dd_contour",
    "dd_explicit",
    "dd_hermite_genocchi",
    "dd_recursive",
    "dd_substitute",
    "leibniz_rhs",
    "CapabilityError",
    "DDCalcError",
    "DomainError",
    "GeometryError",
    "KernelSingularityError",
    "PreconditionError",
    "ToleranceNotMet",
    "h_func",
    "hcm",
    "m_func",
    "mod_log",
]
