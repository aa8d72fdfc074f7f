"""
Module: contains the QuboProblem class and the operations on it:
objective evaluation, the QCR-shifted objective, variable fixing
and the trivial convexification shift.

Maximization is the sense throughout. Variable indices are 0-based.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy

from qubodualbounds.linalg_kernels import SymmetricOperator, largest_eigenpair
from qubodualbounds.solver_errors import EmptyProblem, NumericFailure


class QuboProblem:
    """
    maximize xᵀQx + cᵀx + offset over x ∈ {0,1}ⁿ, with Q exactly symmetric.
    Immutable once built.
    """

    def __init__(
        self,
        quadratic: numpy.ndarray | list,
        linear: numpy.ndarray | list,
        offset: float = 0.0,
    ) -> None:
        quadratic_matrix = numpy.array(quadratic, dtype=float)

        if (
            quadratic_matrix.ndim != 2
            or quadratic_matrix.shape[0] != quadratic_matrix.shape[1]
            or quadratic_matrix.shape[0] < 1
        ):
            raise ValueError("Argument 'quadratic' is not the expected n×n matrix, n >= 1.")

        if not numpy.array_equal(quadratic_matrix, quadratic_matrix.T):
            raise ValueError("Argument 'quadratic' is not exactly symmetric.")

        linear_vector = numpy.array(linear, dtype=float).ravel()

        if linear_vector.shape[0] != quadratic_matrix.shape[0]:
            raise ValueError(
                f"Argument 'linear' has length {linear_vector.shape[0]}, "
                f"expected {quadratic_matrix.shape[0]}."
            )

        if not isinstance(offset, (int, float, numpy.floating, numpy.integer)):
            raise TypeError("Argument 'offset' is not the expected real number.")

        if not (
            numpy.all(numpy.isfinite(quadratic_matrix))
            and numpy.all(numpy.isfinite(linear_vector))
            and numpy.isfinite(offset)
        ):
            raise ValueError("Problem data must be finite.")

        quadratic_matrix.setflags(write=False)
        linear_vector.setflags(write=False)
        self.__quadratic: numpy.ndarray = quadratic_matrix
        self.__linear: numpy.ndarray = linear_vector
        self.__offset: float = float(offset)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuboProblem):
            return (
                numpy.array_equal(self.__quadratic, other.quadratic())
                and numpy.array_equal(self.__linear, other.linear())
                and self.__offset == other.offset()
            )

        return NotImplemented

    def __repr__(self) -> str:
        return f"QuboProblem(n={self.dimension()}, offset={self.__offset})"

    def dimension(self) -> int:
        return int(self.__quadratic.shape[0])

    def integer_valued(self) -> bool:
        """Does every binary assignment score an integer?

        True when the offset, every Q_ii + c_i and every 2·Q_ij (i ≠ j) are integers.

        Returns
        -------
        integer_valued : bool
        """
        diagonal = numpy.diag(self.__quadratic) + self.__linear
        doubled = 2.0 * self.__quadratic
        return bool(
            float(self.__offset).is_integer()
            and numpy.all(numpy.mod(diagonal, 1.0) == 0.0)
            and numpy.all(numpy.mod(doubled, 1.0) == 0.0)
        )

    def linear(self) -> numpy.ndarray:
        return self.__linear

    def offset(self) -> float:
        return self.__offset

    def quadratic(self) -> numpy.ndarray:
        return self.__quadratic


class QcrShift(NamedTuple):
    """Diagonal perturbation u of the QCR reformulation."""

    u: numpy.ndarray
    convexifying: bool = False


def as_assignment(values: numpy.ndarray | list | tuple, dimension: int) -> numpy.ndarray:
    """Validate a binary assignment.

    Parameters
    ----------
    values : array-like of 0/1 entries
    dimension : int     Expected length.

    Returns
    -------
    assignment : numpy.ndarray of int8
    """
    candidate = numpy.asarray(values)

    if candidate.ndim != 1 or candidate.shape[0] != dimension:
        raise ValueError(
            f"Assignment has shape {candidate.shape}, expected ({dimension},)."
        )

    if not numpy.all((candidate == 0) | (candidate == 1)):
        raise ValueError("Assignment entries must be exactly 0 or 1.")

    return candidate.astype(numpy.int8)


def evaluate_qubo(problem: QuboProblem, assignment: numpy.ndarray | list) -> float:
    """Objective value xᵀQx + cᵀx + offset of a binary assignment.

    Parameters
    ----------
    problem : QuboProblem
    assignment : array-like of 0/1 entries

    Returns
    -------
    value : float
    """
    if not isinstance(problem, QuboProblem):
        raise TypeError("Argument 'problem' is not the expected QuboProblem.")

    x = as_assignment(assignment, problem.dimension()).astype(float)
    return float(x @ problem.quadratic() @ x + problem.linear() @ x + problem.offset())


def qcr_objective(
    problem: QuboProblem,
    shift: QcrShift | numpy.ndarray,
    point: numpy.ndarray | list,
) -> float:
    """Shifted objective xᵀ(Q − diag(u))x + (c + u)ᵀx + offset.

    Agrees with evaluate_qubo on every binary x, whatever u is.
    `point` may be fractional.

    Parameters
    ----------
    problem : QuboProblem
    shift : QcrShift or numpy.ndarray
    point : array-like of reals

    Returns
    -------
    value : float
    """
    if not isinstance(problem, QuboProblem):
        raise TypeError("Argument 'problem' is not the expected QuboProblem.")

    u = numpy.asarray(shift.u if isinstance(shift, QcrShift) else shift, dtype=float)
    x = numpy.asarray(point, dtype=float)
    dimension = problem.dimension()

    if u.shape != (dimension,) or x.shape != (dimension,):
        raise ValueError(f"Shift and point must both have shape ({dimension},).")

    shifted = problem.quadratic() - numpy.diag(u)
    return float(x @ shifted @ x + (problem.linear() + u) @ x + problem.offset())


def fix_variable(problem: QuboProblem, index: int, value: int) -> QuboProblem:
    """Substitute x_index = value and drop the variable.

    Parameters
    ----------
    problem : QuboProblem
    index : int     0-based variable index.
    value : int     0 or 1.

    Returns
    -------
    child : QuboProblem of dimension n − 1

    Raises
    ------
    EmptyProblem    When n == 1; the caller evaluates the two leaves itself.
    """
    if not isinstance(problem, QuboProblem):
        raise TypeError("Argument 'problem' is not the expected QuboProblem.")

    dimension = problem.dimension()

    if not isinstance(index, (int, numpy.integer)) or not 0 <= index < dimension:
        raise ValueError(f"Argument 'index' must lie in [0, {dimension - 1}].")

    if value not in (0, 1):
        raise ValueError("Argument 'value' must be 0 or 1.")

    if dimension == 1:
        raise EmptyProblem("Fixing the only variable would produce an empty problem.")

    quadratic = problem.quadratic()
    linear = problem.linear()
    keep = numpy.delete(numpy.arange(dimension), index)
    child_quadratic = quadratic[numpy.ix_(keep, keep)]
    child_linear = linear[keep] + 2.0 * quadratic[keep, index] * value
    child_offset = problem.offset() + (quadratic[index, index] + linear[index]) * value
    return QuboProblem(child_quadratic, child_linear, child_offset)


def largest_quadratic_eigenvalue(problem: QuboProblem, seed: int = 0) -> float:
    """λ_max(Q).

    Parameters
    ----------
    problem : QuboProblem
    seed : int      Seeds the Lanczos start vector.

    Returns
    -------
    eigenvalue : float
    """
    try:
        eigenvalue, _ = largest_eigenpair(
            SymmetricOperator.from_matrix(problem.quadratic()), seed=seed
        )
    except NumericFailure as failure:
        raise NumericFailure(
            f"Unable to compute the largest eigenvalue of Q (n={problem.dimension()}): "
            f"{failure}"
        ) from failure

    return eigenvalue


def strictness_margin(eigenvalue: float) -> float:
    """Margin added on top of λ_max so diag(u) − Q is strictly positive definite."""
    return max(1.0, 0.01 * abs(eigenvalue))


def trivial_shift(problem: QuboProblem, seed: int = 0) -> QcrShift:
    """ū = (λ_max(Q) + max(1, 0.01·|λ_max(Q)|))·1.

    Parameters
    ----------
    problem : QuboProblem
    seed : int

    Returns
    -------
    shift : QcrShift, marked convexifying
    """
    if not isinstance(problem, QuboProblem):
        raise TypeError("Argument 'problem' is not the expected QuboProblem.")

    eigenvalue = largest_quadratic_eigenvalue(problem, seed=seed)
    level = eigenvalue + strictness_margin(eigenvalue)
    return QcrShift(u=numpy.full(problem.dimension(), level), convexifying=True)
