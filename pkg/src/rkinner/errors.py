"""Exception hierarchy.  Each class carries the CLI exit code it maps to."""


class RkInnerError(Exception):
    exit_code = 1


class DomainError(RkInnerError, ValueError):
    """Precondition rejection: bad point, bad parameter, bad space spec."""

    exit_code = 2


class DivergenceError(RkInnerError):
    """A kernel series has no computable tail bound."""

    exit_code = 4


class GramDegeneracyError(RkInnerError):
    """The Gram matrix is numerically singular even in extended precision."""

    exit_code = 4

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class CertificationError(RkInnerError):
    """A computed object failed one of its residual certificates."""

    exit_code = 3

    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst


class ConvergenceError(RkInnerError):
    """An iterative solver hit its cap without meeting its tolerance."""

    exit_code = 4

    def __init__(self, message, last=None, residuals=None):
        super().__init__(message)
        self.last = last
        self.residuals = residuals


class InconclusiveError(RkInnerError):
    """A quantity could not be resolved from the available data."""

    exit_code = 4
