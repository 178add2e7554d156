"""Exception types shared across the package."""


class QcrError(Exception):
    """Base class for all package errors."""


class ValidationError(QcrError, ValueError):
    """Input fails a structural precondition (shape, symmetry, range)."""


class SingularModelError(ValidationError):
    """Density operator has an eigenvalue below the strict-positivity floor."""


class NotPsdError(ValidationError):
    """Matrix expected to be positive semidefinite is not."""


class UnbiasednessError(QcrError):
    """Operation requires a locally unbiased measurement and got a biased one."""


class NumericError(QcrError):
    """A numerical routine failed to converge or hit its iteration limit."""
