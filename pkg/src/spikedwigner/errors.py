"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point lies where the requested transform or map is undefined."""


class RangeError(ValueError):
    """A probability level lies outside [0, 1]."""


class ResolutionError(RuntimeError):
    """The boundary scan grid is too coarse to separate two boundaries."""


class ConvergenceError(ArithmeticError):
    """An iterative method hit its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SizeError(ValueError):
    """Matrix size too small for the requested number of spikes."""


class RankError(IndexError):
    """A descending rank exceeds the matrix size."""
