"""
Module: contains the exception family raised by the QUBO bounding code.
"""

from __future__ import annotations

import numpy


class QuboSolverError(Exception):
    """Base class for every error raised on purpose by this package."""


class InstanceFormatError(QuboSolverError, ValueError):
    """
    An instance file (or block of text) does not follow its grammar.
    """

    def __init__(self, message: str, line_number: int | None = None) -> None:
        self.line_number = line_number

        if line_number is not None:
            message = f"Line {line_number}: {message}"

        super().__init__(message)


class EmptyProblem(QuboSolverError, ValueError):
    """Fixing the last free variable would leave a problem with no variables."""


class NotPositiveDefinite(QuboSolverError, ArithmeticError):
    """
    Cholesky factorization met a pivot at or below the positive-definite tolerance.
    Callers use this as the interiority (feasibility) test.
    """

    def __init__(self, pivot: int, value: float) -> None:
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"Matrix is not positive definite: pivot {pivot} has value {value:.3e}."
        )


class NumericFailure(QuboSolverError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class NumericNoConvergence(NumericFailure):
    """
    Lanczos iteration ran out of steps. Carries the best Ritz pair found.
    """

    def __init__(
        self, message: str, estimate: float, vector: numpy.ndarray | None = None
    ) -> None:
        self.estimate = estimate
        self.vector = vector
        super().__init__(message)


class DegenerateDirection(NumericFailure):
    """The (1,1) cofactor vanished: diag(u) - Q is numerically singular."""


class StationaryPoint(NumericFailure):
    """The gradient direction is numerically zero."""


class UnboundedRay(NumericFailure):
    """A ray never leaves the feasible region (only possible through numerical failure)."""


class InfeasibleShift(NumericFailure):
    """The shift u does not make diag(u) - Q strictly positive definite."""
