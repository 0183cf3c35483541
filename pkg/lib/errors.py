#!/usr/bin/env python3
"""
Exception hierarchy for mmfbm-toolkit.
Every error carries a human-readable message naming the offending
parameter and the assumption or formula it violates.
"""

from typing import Optional


class MixtureError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ParameterError(MixtureError):
    """A parameter violates a model assumption or an operation precondition."""

    exit_code = 1


class DomainError(ParameterError):
    """A function argument lies outside the function's domain."""


class ConvergenceError(MixtureError):
    """
    A numerical procedure did not meet its tolerance.

    Attributes:
        estimate: Best value obtained before giving up (None if unavailable)
        error_bound: Error estimate attached to that value
    """

    exit_code = 2

    def __init__(
        self,
        message: str,
        estimate: Optional[float] = None,
        error_bound: Optional[float] = None,
    ):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class EmbeddingError(ConvergenceError):
    """Circulant embedding produced eigenvalues too negative to clamp."""


class FactorizationError(ConvergenceError):
    """Cholesky factorization failed even after ridge regularization."""


def require(condition: bool, message: str, error: type = ParameterError) -> None:
    """
    Raise ``error(message)`` unless ``condition`` holds.

    Args:
        condition: Precondition that must be true
        message: Explanation naming the parameter and the violated assumption
        error: Exception class to raise
    """
    if not condition:
        raise error(message)
