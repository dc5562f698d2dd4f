"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegreeOverflowError(OverflowError):
    """A polynomial degree exceeded the supported cap."""


class NonConvergenceError(RuntimeError):
    """An iterative solver stopped at its cap without meeting tolerance.

    The best iterate found so far is kept on ``best`` so callers can
    still inspect or report it.
    """

    def __init__(self, message: str, best=None, iterations: int = 0):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


class MomentError(ValueError):
    """A function failed the vanishing-moment test against low-degree powers."""

    def __init__(self, message: str, index: int, value: float):
        super().__init__(message)
        self.index = index
        self.value = value
