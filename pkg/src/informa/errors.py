"""Exception types raised by informa.

Solver failures are not exceptions: they travel in ``SolveOutcome.status``.
"""


class InformaError(Exception):
    """Root of all informa errors."""


class DataFormatError(InformaError, ValueError):
    """Malformed trajectory, instrument or model file."""


class NonContiguousError(DataFormatError):
    """Time column has a gap or is not strictly increasing."""


class DimensionError(InformaError, ValueError):
    """Matrix dimensions do not agree."""


class NotPositiveSemidefiniteError(InformaError, ValueError):
    """A matrix required to be PSD (or negative definite) is not."""


class UnstableSystemError(InformaError, ValueError):
    """Operation requires a Schur-stable matrix."""


class ObservabilityError(InformaError, ValueError):
    """State-space to ARX conversion needs an observable pair."""


class ExtractionError(InformaError):
    """Controller cannot be recovered from the solver output."""


class BisectionNotFoundError(InformaError):
    """Upper end of a bisection bracket is infeasible."""

    def __init__(self, message: str, outcome=None):
        super().__init__(message)
        self.outcome = outcome


class PreconditionError(InformaError, ValueError):
    """Operation called on an input that violates its contract."""
