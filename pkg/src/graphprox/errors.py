"""Exception types shared across the package."""


class ParseError(ValueError):
    """An input file could not be parsed.  Carries the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConvergenceError(RuntimeError):
    """An iterative method failed to converge.  ``best_estimate`` holds the
    last iterate (or eigenvalue estimate) so callers can inspect it."""

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class IndefiniteSystemError(RuntimeError):
    """A solver that requires a positive definite operator detected a
    non-positive pivot or curvature."""


class DegenerateStepError(RuntimeError):
    """A constant-time bound update hit a near-zero pivot or denominator.
    Callers fall back to the dense Gauss-Radau evaluation for the step."""
