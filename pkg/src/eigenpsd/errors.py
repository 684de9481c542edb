"""Exception types shared across the package."""


class EigenpsdError(Exception):
    """Base class for all errors raised by this package."""


class NotPositiveDefinite(EigenpsdError):
    """Cholesky factorization hit a nonpositive pivot; matrix needs loading."""


class NoConvergence(EigenpsdError):
    """Iterative eigendecomposition exceeded its sweep cap."""


class SingularMatrix(EigenpsdError):
    """Triangular or Hermitian solve encountered a zero pivot."""


class DimensionMismatch(EigenpsdError):
    """Operands have incompatible shapes."""


class InvalidConfig(EigenpsdError):
    """Configuration violates a structural requirement (window, geometry, paths)."""


class InvalidTau(EigenpsdError):
    """Averaging time constant must be strictly positive."""


class InvalidOrder(EigenpsdError):
    """Eigenvalue vector expected in descending order."""


class LengthMismatch(EigenpsdError):
    """Reference and test signals differ in length."""


class DegenerateInput(EigenpsdError):
    """An input signal has zero energy where power scaling is required."""


class FormatError(EigenpsdError):
    """Audio file has an unsupported encoding or layout."""
