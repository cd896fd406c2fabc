"""Exception types shared across the engine."""


class DomainError(ValueError):
    """Input outside the physical or mathematical domain of an operation."""


class SizeError(DomainError):
    """Probe size exceeds what a dense computation can handle."""


class SingularRateError(RuntimeError):
    """Time-local decay rates diverge (relaxation factor crossed zero).

    Carries the offending time in ``.t``.
    """

    def __init__(self, t: float, message: str | None = None):
        self.t = t
        super().__init__(message or f"time-local rates singular at t = {t!r}")


class InternalConsistencyError(RuntimeError):
    """A quantity violated an internal bound by more than rounding allows."""


class UndefinedEfficiencyError(RuntimeError):
    """Efficiency requested in a zero-cost / zero-information limit."""


class InsufficientBudgetError(ValueError):
    """Energy budget does not cover a single protocol round."""


class ConvergenceError(RuntimeError):
    """Iterative refinement failed to converge.

    Carries the last search bracket in ``.bracket``.
    """

    def __init__(self, bracket: tuple, message: str | None = None):
        self.bracket = bracket
        super().__init__(message or f"no convergence, bracket {bracket!r}")


class PositivityWarning(UserWarning):
    """A map outside the completely-positive region was applied anyway."""
