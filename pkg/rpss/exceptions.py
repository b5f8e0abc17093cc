"""
Exception hierarchy for the RPSS toolkit.

Every error derives from RpssError and from the builtin it refines, so
callers can catch either. Management commands map ConfigurationError and
JitterModelError raised while reading options to exit code 1 and every
other RpssError to exit code 2.
"""


class RpssError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(RpssError, ValueError):
    """Invalid system parameters, command options or planner bounds."""


class JitterModelError(RpssError, ValueError):
    """Invalid jitter support, unknown preset or unreadable jitter file."""


class DomainError(RpssError, ValueError):
    """Argument outside the domain of a distribution function."""


class SingularityError(RpssError, ArithmeticError):
    """Composition-law denominator vanished."""


class NumericalError(RpssError, ArithmeticError):
    """Lattice inversion produced a probability that is not roundoff."""


class TruncationError(RpssError, RuntimeError):
    """Negative binomial truncation point exceeds the configured cap."""


class EngineGuardError(RpssError, RuntimeError):
    """Sorting engine tripped its trial guard or saw time run backwards."""


class TraceError(RpssError, ValueError):
    """Permutation trace cannot be composed."""


class EmptyStreamError(RpssError, ValueError):
    """Statistics requested for a stream with no symbols."""
