"""Exceptions shared across the package."""


class ConvergenceError(RuntimeError):
    """An iterative procedure failed to converge.

    Carries the index or truncation size reached so callers can report
    where the computation stopped.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class QuadratureError(ConvergenceError):
    """Numerical quadrature did not reach the requested accuracy."""
