"""Exception hierarchy used across the package."""


class FracSteadyError(Exception):
    """Base class for all package errors."""


class InvalidDomainError(FracSteadyError, ValueError):
    pass


class InvalidProfileError(FracSteadyError, ValueError):
    pass


class InvalidArgumentError(FracSteadyError, ValueError):
    pass


class UnsupportedDimensionError(FracSteadyError, ValueError):
    pass


class SingularOperatorError(FracSteadyError, ArithmeticError):
    pass


class EigensolverError(FracSteadyError, ArithmeticError):
    pass


class TheoremHypothesisError(FracSteadyError, ValueError):
    """Raised when lambda <= lambda1, so no positive steady state exists."""


class DegenerateGapError(FracSteadyError, ArithmeticError):
    pass


class InvalidPairError(FracSteadyError, ValueError):
    """Lower/upper pair is not ordered or fails its residual check."""


class NonConvergenceError(FracSteadyError, ArithmeticError):
    """Iteration cap reached; ``report`` carries the partial diagnostics."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
