"""Exception types raised by the core modules.

Tools catch these and convert them to ToolResult blockers; the CLI maps them
to exit codes (2 config, 3 certificate, 4 numerical).
"""

from typing import Optional


class ConfigError(ValueError):
    """Experiment configuration could not be parsed or validated."""


class NumericalFailure(ArithmeticError):
    """A computation produced a nonfinite value or failed to converge."""


class InnerSolverError(NumericalFailure):
    """The embedded scalar minimization did not converge to tolerance."""

    def __init__(self, message: str, theta: Optional[float] = None):
        if theta is not None:
            message = f"{message} (theta={theta!r})"
        super().__init__(message)
        self.theta = theta


class SingularCurvatureError(NumericalFailure):
    """Second partial of the inner objective is (numerically) zero."""


class UnachievableTargetError(ValueError):
    """No finite dataset size reaches the requested bound."""


class CertificateFailure(AssertionError):
    """A numerical certificate reported violations."""
