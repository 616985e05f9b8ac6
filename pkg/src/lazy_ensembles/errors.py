"""Exception hierarchy shared by all modules."""


class LazyEnsembleError(Exception):
    """Base class for domain errors raised by this package."""


class ValidationError(LazyEnsembleError, ValueError):
    """An input matrix or state violates a structural invariant."""


class NotHermitian(ValidationError):
    pass


class TraceNotOne(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotFullRange(ValidationError):
    """The density matrix has a (numerically) vanishing eigenvalue."""


class TooManyNodes(ValidationError):
    pass


class NonFiniteNode(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class ContourTooTight(LazyEnsembleError):
    pass


class NoConvergence(LazyEnsembleError):
    """An iterative solver ran out of budget.

    ``residual`` holds the last max-norm residual so callers can tell a
    nearly singular input from a genuine failure.
    """

    def __init__(self, msg, residual=float("nan"), iterations=0):
        super().__init__(msg)
        self.residual = residual
        self.iterations = iterations


class SpreadTooLarge(LazyEnsembleError):
    pass


class EmptyBatch(LazyEnsembleError):
    pass


class SourceMismatch(LazyEnsembleError):
    pass


class TargetUnattainable(LazyEnsembleError):
    pass


class ScalarObservable(LazyEnsembleError):
    pass


class ParseError(LazyEnsembleError):
    pass
