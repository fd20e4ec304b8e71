"""Shared exception and warning types."""


class CapacityError(RuntimeError):
    """Requested materialized storage exceeds the configured dense limit."""


class ConvergenceError(RuntimeError):
    """An iterative solve stopped before reaching the requested tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class WindowConvergenceError(ConvergenceError):
    """Adaptive charge window hit its cap before the observable settled."""


class TermBudgetError(RuntimeError):
    """Ladder-operator expansion exceeded the configured term cap."""


class RegimeWarning(UserWarning):
    """Closed-form expression evaluated outside its trusted parameter regime."""


class NearDegenerateWarning(UserWarning):
    """Neighboring level lies within 10x the tolerance; eigenvector may be ill-conditioned."""


class StepInstabilityWarning(UserWarning):
    """Finite-difference step check disagrees; the derivative estimate is suspect."""
