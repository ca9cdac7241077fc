"""Exception types shared across the package."""


class StabilityError(RuntimeError):
    """Raised when dynamics admit no steady state (drift matrix not Hurwitz)."""

    def __init__(self, message, max_real_part=None):
        super().__init__(message)
        self.max_real_part = max_real_part


class ConvergenceError(RuntimeError):
    """Raised when fixed-point integration fails to converge within its time cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InconclusiveSearchError(RuntimeError):
    """Raised when a randomized campaign yields no stable samples to certify."""
