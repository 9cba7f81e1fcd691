"""Exception types shared across the package."""

from __future__ import annotations


class InvalidArgumentError(ValueError):
    """A parameter lies outside the documented range."""


class DomainError(ValueError):
    """A point lies outside the open ball on which a map is defined."""


class PrecisionLossError(DomainError):
    """A finite-difference stencil would leave the ball or underflow."""


class EvaluationError(ArithmeticError):
    """An integrand produced a non-finite value.

    The offending quadrature node is kept on ``node`` so callers can
    report where the integrand broke down.
    """

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class ConvergenceError(RuntimeError):
    """Two successive quadrature levels failed to agree within tolerance."""

    def __init__(self, message: str, value: float | None = None, err: float | None = None):
        super().__init__(message)
        self.value = value
        self.err = err


class SingularDerivativeError(ArithmeticError):
    """The holomorphic derivative matrix Df is not invertible."""
