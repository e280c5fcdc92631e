"""Exception hierarchy shared by all modules."""


class QKlauderError(Exception):
    """Base class for package errors."""


class SeriesError(QKlauderError, ArithmeticError):
    """A q-series could not be evaluated to the requested tolerance."""


class DivergenceError(SeriesError):
    """Argument at or beyond the (guarded) convergence radius."""


class NonConvergenceError(SeriesError):
    """Term cap reached before the tail bound met the tolerance."""


class DegenerateDeformationError(QKlauderError, ValueError):
    """Operation undefined at q = 1 (no q-structure left)."""


class IncompatibleStatesError(QKlauderError, ValueError):
    """States built on different deformations."""


class InsufficientTruncationError(QKlauderError, ValueError):
    """Truncated Fock space too small for the state's coefficient tail."""


class ConsistencyError(QKlauderError, AssertionError):
    """Two independent evaluation routes disagree beyond tolerance."""
