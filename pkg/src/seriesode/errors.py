"""Typed errors shared across the package.

The CLI maps these to exit codes: validation rejections exit 2,
non-convergence (and unstable results) exit 3, configuration and
I/O problems exit 4.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "SeriesOdeError",
    "Rejection",
    "ValidationError",
    "NonConvergenceError",
    "NoSignChangeError",
    "BoundaryTooSmallError",
]


class SeriesOdeError(Exception):
    """Base class for all package errors."""


@dataclass(frozen=True)
class Rejection:
    """Typed reason why an evaluation request was refused.

    ``kind`` is one of ``ZeroPoint``, ``ZeroS``, ``DegenerateIndicial``,
    ``NotOrdinaryPoint``.
    """

    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class ValidationError(SeriesOdeError):
    """Request rejected before any computation."""

    def __init__(self, rejection: Rejection):
        super().__init__(str(rejection))
        self.rejection = rejection

    @property
    def kind(self) -> str:
        return self.rejection.kind


class NonConvergenceError(SeriesOdeError):
    """Stopping criterion not met within the term cap."""


class NoSignChangeError(SeriesOdeError):
    """Eigenvalue bracket does not bracket a sign change."""


class BoundaryTooSmallError(SeriesOdeError):
    """Eigenvalue shifts too much when the surrogate boundary is moved."""
