"""Exception hierarchy shared across the library."""


class SafeflowError(Exception):
    """Base class for all library-specific errors."""


class InvalidInputError(SafeflowError, ValueError):
    """Raised when arguments violate a documented precondition."""


class SingularMatrixError(SafeflowError):
    """Raised when a closed-form solve hits a singular normal matrix."""


class SamplingError(SafeflowError):
    """Raised when rejection sampling cannot reach the requested set."""


class TrainingError(SafeflowError):
    """Raised when the training QP is infeasible or otherwise fails."""


class DivergenceError(SafeflowError):
    """Raised when numerical integration produces non-finite states.

    Carries the portion of the trajectory computed before divergence.
    """

    def __init__(self, message, partial_trajectory=None):
        super().__init__(message)
        self.partial_trajectory = partial_trajectory


class BudgetError(SafeflowError):
    """Raised when a requested computation exceeds its size budget."""
