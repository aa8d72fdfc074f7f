"""
Module: contains the dense symmetric kernels (Cholesky factorization,
triangular solves and a largest-eigenvalue Lanczos iteration)
that every LMI oracle is built on.

Convention: a factor stores M = L·Lᵀ with L lower-triangular.
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy
import scipy.linalg  # type: ignore[import]
from scipy.linalg import lapack  # type: ignore[import]
from scipy.sparse.linalg import LinearOperator  # type: ignore[import]

from qubodualbounds.solver_errors import (
    NotPositiveDefinite,
    NumericFailure,
    NumericNoConvergence,
)

#   Relative pivot tolerance: pivot <= PD_TOLERANCE * max(max diag, 1) is "on the boundary".
PD_TOLERANCE: float = 1e-12
DENSE_FALLBACK_DIM: int = 64
LANCZOS_TOLERANCE: float = 1e-10

_log = logging.getLogger(__name__)


class CholeskyFactor:
    """
    Immutable lower-triangular factor L of a symmetric positive definite matrix M = L·Lᵀ.
    """

    def __init__(self, lower: numpy.ndarray) -> None:
        if not isinstance(lower, numpy.ndarray) or lower.ndim != 2:
            _log.error("Argument 'lower' is not the expected 2-D numpy.ndarray.")
            raise TypeError("Argument 'lower' is not the expected 2-D numpy.ndarray.")

        self.__lower: numpy.ndarray = numpy.array(lower, dtype=float)
        self.__lower.setflags(write=False)

    def dimension(self) -> int:
        return int(self.__lower.shape[0])

    def lower(self) -> numpy.ndarray:
        """Read-only view of L.

        Returns
        -------
        lower : numpy.ndarray
        """
        return self.__lower

    def reconstruct(self) -> numpy.ndarray:
        """Multiply the factor back out, L·Lᵀ.

        Returns
        -------
        matrix : numpy.ndarray
        """
        return self.__lower @ self.__lower.T

    def solve(self, rhs: numpy.ndarray) -> numpy.ndarray:
        """Solve M·z = rhs using both triangular sweeps.

        Parameters
        ----------
        rhs : numpy.ndarray     Vector (or stack of column vectors) of length m.

        Returns
        -------
        z : numpy.ndarray
        """
        return scipy.linalg.cho_solve((self.__lower, True), rhs, check_finite=False)

    def solve_lower(self, rhs: numpy.ndarray) -> numpy.ndarray:
        """Compute L⁻¹·rhs."""
        return scipy.linalg.solve_triangular(
            self.__lower, rhs, lower=True, check_finite=False
        )

    def solve_lower_transpose(self, rhs: numpy.ndarray) -> numpy.ndarray:
        """Compute L⁻ᵀ·rhs."""
        return scipy.linalg.solve_triangular(
            self.__lower, rhs, lower=True, trans="T", check_finite=False
        )


class SymmetricOperator(LinearOperator):
    """
    A symmetric m×m linear map known only through its action on vectors.
    """

    def __init__(
        self, dimension: int, matvec: Callable[[numpy.ndarray], numpy.ndarray]
    ) -> None:
        if not isinstance(dimension, int) or dimension < 1:
            _log.error("Argument 'dimension' is not the expected positive int.")
            raise ValueError("Argument 'dimension' is not the expected positive int.")

        if not callable(matvec):
            _log.error("Argument 'matvec' is not the expected callable.")
            raise TypeError("Argument 'matvec' is not the expected callable.")

        super().__init__(dtype=numpy.float64, shape=(dimension, dimension))
        self.__apply = matvec

    @classmethod
    def from_matrix(cls, matrix: numpy.ndarray) -> SymmetricOperator:
        """Wrap an explicit symmetric matrix.

        Parameters
        ----------
        matrix : numpy.ndarray

        Returns
        -------
        operator : SymmetricOperator
        """
        dense = numpy.asarray(matrix, dtype=float)

        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            _log.error("Argument 'matrix' is not the expected square matrix.")
            raise ValueError("Argument 'matrix' is not the expected square matrix.")

        return cls(int(dense.shape[0]), lambda vector: dense @ vector)

    def dimension(self) -> int:
        return int(self.shape[0])

    def to_dense(self) -> numpy.ndarray:
        """Materialize the operator column by column (symmetrized).

        Returns
        -------
        matrix : numpy.ndarray
        """
        dense = self.matmat(numpy.eye(self.dimension()))
        return 0.5 * (dense + dense.T)

    def _matvec(self, vector: numpy.ndarray) -> numpy.ndarray:
        return numpy.asarray(self.__apply(numpy.ravel(vector)), dtype=float)

    def _adjoint(self) -> SymmetricOperator:
        return self


def cholesky(matrix: numpy.ndarray) -> CholeskyFactor:
    """Factor a symmetric matrix as L·Lᵀ, treating tiny pivots as failure.

    Parameters
    ----------
    matrix : numpy.ndarray  Symmetric m×m matrix; only its lower triangle is read.

    Returns
    -------
    factor : CholeskyFactor

    Raises
    ------
    NotPositiveDefinite     Carries the 1-based index of the first bad pivot.
    """
    dense = numpy.asarray(matrix, dtype=float)

    if dense.ndim != 2 or dense.shape[0] != dense.shape[1] or dense.shape[0] == 0:
        _log.error("Argument 'matrix' is not the expected non-empty square matrix.")
        raise ValueError("Argument 'matrix' is not the expected non-empty square matrix.")

    if not numpy.all(numpy.isfinite(dense)):
        raise NumericFailure("Matrix handed to cholesky contains non-finite entries.")

    threshold: float = PD_TOLERANCE * max(float(numpy.max(numpy.diag(dense))), 1.0)
    lower, info = lapack.dpotrf(dense, lower=1, clean=1)

    if info < 0:  # pragma: no cover
        raise NumericFailure(f"LAPACK dpotrf rejected argument {-info}.")

    if info > 0:
        raise NotPositiveDefinite(pivot=int(info), value=float(lower[info - 1, info - 1]))

    pivots = numpy.diag(lower) ** 2
    too_small = numpy.flatnonzero(pivots <= threshold)

    if too_small.size > 0:
        index = int(too_small[0])
        raise NotPositiveDefinite(pivot=index + 1, value=float(pivots[index]))

    return CholeskyFactor(lower)


def solve_with_factor(factor: CholeskyFactor, rhs: numpy.ndarray) -> numpy.ndarray:
    """Solve M·z = rhs given the factor of M.

    Parameters
    ----------
    factor : CholeskyFactor
    rhs : numpy.ndarray

    Returns
    -------
    z : numpy.ndarray
    """
    if not isinstance(factor, CholeskyFactor):
        _log.error("Argument 'factor' is not the expected CholeskyFactor.")
        raise TypeError("Argument 'factor' is not the expected CholeskyFactor.")

    rhs = numpy.asarray(rhs, dtype=float)

    if rhs.shape[0] != factor.dimension():
        raise ValueError(
            f"Right-hand side has length {rhs.shape[0]}, expected {factor.dimension()}."
        )

    return factor.solve(rhs)


def _top_of_tridiagonal(
    alphas: numpy.ndarray, betas: numpy.ndarray
) -> tuple[float, numpy.ndarray]:
    """Largest eigenpair of the Lanczos tridiagonal matrix."""
    if alphas.size == 1:
        return float(alphas[0]), numpy.ones(1)

    top = alphas.size - 1
    values, vectors = scipy.linalg.eigh_tridiagonal(
        alphas, betas, select="i", select_range=(top, top)
    )
    return float(values[0]), vectors[:, 0]


def lanczos_max_eig(
    operator: SymmetricOperator,
    tol: float = LANCZOS_TOLERANCE,
    max_iter: int | None = None,
    seed: int = 0,
) -> tuple[float, numpy.ndarray]:
    """Largest algebraic eigenvalue by Lanczos with full reorthogonalization.

    The start vector is drawn from a generator seeded with `seed`, so results
    repeat run to run.

    Parameters
    ----------
    operator : SymmetricOperator
    tol : float         Stop once the Ritz residual is <= tol * max(1, |λ|).
    max_iter : int      Krylov steps allowed (default: the dimension).
    seed : int

    Returns
    -------
    (eigenvalue, unit eigenvector) : tuple

    Raises
    ------
    NumericNoConvergence    Carries the best Ritz pair.
    """
    if not isinstance(operator, LinearOperator):
        _log.error("Argument 'operator' is not the expected SymmetricOperator.")
        raise TypeError("Argument 'operator' is not the expected SymmetricOperator.")

    if tol <= 0:
        _log.error("Argument 'tol' must be positive.")
        raise ValueError("Argument 'tol' must be positive.")

    dimension = int(operator.shape[0])
    steps = dimension if max_iter is None else min(int(max_iter), dimension)

    if steps < 1:
        _log.error("Argument 'max_iter' must be at least 1.")
        raise ValueError("Argument 'max_iter' must be at least 1.")

    rng = numpy.random.default_rng(seed)
    vector = rng.standard_normal(dimension)
    vector /= numpy.linalg.norm(vector)

    basis = numpy.zeros((dimension, steps))
    alphas = numpy.zeros(steps)
    betas = numpy.zeros(steps)
    eps = numpy.finfo(float).eps
    ritz_value = numpy.nan
    ritz_coefficients = numpy.ones(1)

    for step in range(steps):
        basis[:, step] = vector
        residual_vector = numpy.asarray(operator.matvec(vector), dtype=float).ravel()
        alphas[step] = vector @ residual_vector
        residual_vector = residual_vector - alphas[step] * vector

        if step > 0:
            residual_vector -= betas[step - 1] * basis[:, step - 1]

        #   Twice is enough.
        for _ in range(2):
            active = basis[:, : step + 1]
            residual_vector -= active @ (active.T @ residual_vector)

        betas[step] = numpy.linalg.norm(residual_vector)
        ritz_value, ritz_coefficients = _top_of_tridiagonal(
            alphas[: step + 1], betas[:step]
        )
        scale = max(1.0, abs(ritz_value))
        residual = betas[step] * abs(ritz_coefficients[-1])

        if (
            residual <= tol * scale
            or step + 1 == dimension
            or betas[step] <= eps * scale
        ):
            ritz_vector = basis[:, : step + 1] @ ritz_coefficients
            return ritz_value, ritz_vector / numpy.linalg.norm(ritz_vector)

        vector = residual_vector / betas[step]

    best_vector = basis @ ritz_coefficients
    raise NumericNoConvergence(
        f"Lanczos did not converge within {steps} steps.",
        estimate=ritz_value,
        vector=best_vector / numpy.linalg.norm(best_vector),
    )


def largest_eigenpair(
    operator: SymmetricOperator,
    tol: float = LANCZOS_TOLERANCE,
    max_iter: int | None = None,
    seed: int = 0,
) -> tuple[float, numpy.ndarray]:
    """Lanczos, falling back to a dense eigendecomposition for small operators.

    Parameters
    ----------
    operator : SymmetricOperator
    tol : float
    max_iter : int
    seed : int

    Returns
    -------
    (eigenvalue, unit eigenvector) : tuple
    """
    try:
        return lanczos_max_eig(operator, tol=tol, max_iter=max_iter, seed=seed)
    except NumericNoConvergence as no_convergence:
        if operator.shape[0] > DENSE_FALLBACK_DIM:
            raise

        _log.debug(
            "Lanczos stalled at {estimate}; using dense eigendecomposition.",
            extra={"estimate": no_convergence.estimate},
        )

    values, vectors = scipy.linalg.eigh(operator.to_dense())
    return float(values[-1]), vectors[:, -1]
