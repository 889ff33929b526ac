"""Exception hierarchy shared by all modules."""


class WeakPCAError(Exception):
    """Base class for errors raised by weakpca."""


class DomainError(WeakPCAError, ValueError):
    """An argument lies outside the domain of the operation."""


class DimensionError(DomainError):
    """Array shapes are inconsistent with each other."""


class NumericFailure(WeakPCAError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class RankDeficiencyError(WeakPCAError, ArithmeticError):
    """Gram-Schmidt met a (numerically) dependent input vector."""


class InsufficientDataError(DomainError):
    """Too few observations for the requested estimator."""


class ConvergenceError(NumericFailure):
    """Tyler's fixed-point iteration hit its iteration cap."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
