"""Exception hierarchy shared by every module of the package."""


class GaussianStateError(ValueError):
    """Base class for all errors raised by gaussent."""


class MalformedMatrixError(GaussianStateError):
    """Input is not a square, even-dimensional, symmetric real matrix."""


class UnphysicalStateError(GaussianStateError):
    """Covariance matrix violates the uncertainty principle."""


class DomainError(GaussianStateError):
    """A scalar parameter lies outside its admissible range."""


class NumericalDegeneracyError(GaussianStateError):
    """An eigen-decomposition could not be paired or ordered reliably."""


class InvariantInconsistencyError(GaussianStateError):
    """Symplectic invariants of a (measured) matrix are mutually inconsistent."""


class NotSymmetricStateError(GaussianStateError):
    """Operation requires a symmetric two-mode state (a == b)."""


class CmFormatError(GaussianStateError):
    """Parse error in a cmv1 or smv1 text file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
