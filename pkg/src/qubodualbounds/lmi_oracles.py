"""
Module: contains the LMI system F(y) of the QCR bounding SDP and the
oracles that work on one slice r = r̂ of its feasible region:

    F([u, r]) = [[ r,           −(c+u)ᵀ/2   ],
                 [ −(c+u)/2,    diag(u) − Q ]]

f_r̂(u) is the signed distance, along e_{n+1}, from [u, r̂] down to the
boundary of the PSD region, so r̂ + f_r̂(u) is a valid QUBO dual bound.
One Cholesky factor of F([u, r̂]) serves the value, gradient and ray oracles.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy

from qubodualbounds.linalg_kernels import (
    LANCZOS_TOLERANCE,
    CholeskyFactor,
    SymmetricOperator,
    cholesky,
    largest_eigenpair,
)
from qubodualbounds.qubo_problem import QcrShift, QuboProblem
from qubodualbounds.solver_errors import (
    DegenerateDirection,
    InfeasibleShift,
    NotPositiveDefinite,
    NumericFailure,
    StationaryPoint,
    UnboundedRay,
)

KERNEL_TOLERANCE: float = 1e-10
GRADIENT_TOLERANCE: float = 1e-10
RAY_EIGENVALUE_TOLERANCE: float = 1e-12
PUSH_RELATIVE: float = 0.1
PUSH_ABSOLUTE: float = 1.0

_log = logging.getLogger(__name__)


class LmiSystem:
    """
    The linear matrix inequality F(y) ⪰ 0 built from one QuboProblem; m = n + 1.
    """

    def __init__(self, problem: QuboProblem) -> None:
        if not isinstance(problem, QuboProblem):
            _log.error("Argument 'problem' is not the expected QuboProblem.")
            raise TypeError("Argument 'problem' is not the expected QuboProblem.")

        self.__problem: QuboProblem = problem

    def matrix_dimension(self) -> int:
        return self.__problem.dimension() + 1

    def problem(self) -> QuboProblem:
        return self.__problem

    def variables(self) -> int:
        return self.__problem.dimension()


class PlanePoint(NamedTuple):
    """A point [u, r̂] on the cutting hyperplane r = r̂."""

    u: numpy.ndarray
    r_hat: float


def assemble_F(system: LmiSystem, y: numpy.ndarray) -> numpy.ndarray:  # noqa: N802
    """Build F(y) for y = [u, r].

    Parameters
    ----------
    system : LmiSystem
    y : numpy.ndarray of length n + 1

    Returns
    -------
    matrix : numpy.ndarray, symmetric (n+1)×(n+1)
    """
    if not isinstance(system, LmiSystem):
        _log.error("Argument 'system' is not the expected LmiSystem.")
        raise TypeError("Argument 'system' is not the expected LmiSystem.")

    y = numpy.asarray(y, dtype=float)
    n = system.variables()

    if y.shape != (n + 1,):
        _log.error(
            "Argument 'y' has shape {shape}, expected ({rows},).",
            extra={"shape": str(y.shape), "rows": n + 1},
        )
        raise ValueError(f"Argument 'y' has shape {y.shape}, expected ({n + 1},).")

    problem = system.problem()
    u = y[:n]
    half_linear = -0.5 * (problem.linear() + u)
    matrix = numpy.empty((n + 1, n + 1))
    matrix[0, 0] = y[n]
    matrix[0, 1:] = half_linear
    matrix[1:, 0] = half_linear
    matrix[1:, 1:] = -problem.quadratic()
    matrix[1:, 1:][numpy.diag_indices(n)] += u
    return matrix


class OracleCache:
    """
    Factor of F([u, r̂]) and the solution z of F([u, r̂])·z = e₁ at one plane point.
    Construction fails with NotPositiveDefinite when the point is not interior.
    Owned by a single descent at a time.
    """

    def __init__(self, system: LmiSystem, point: PlanePoint) -> None:
        if not isinstance(system, LmiSystem):
            _log.error("Argument 'system' is not the expected LmiSystem.")
            raise TypeError("Argument 'system' is not the expected LmiSystem.")

        u = numpy.array(point.u, dtype=float)
        u.setflags(write=False)
        self.__system: LmiSystem = system
        self.__point: PlanePoint = PlanePoint(u=u, r_hat=float(point.r_hat))
        self.__factor: CholeskyFactor = cholesky(
            assemble_F(system, numpy.append(u, point.r_hat))
        )
        unit = numpy.zeros(system.matrix_dimension())
        unit[0] = 1.0
        self.__z: numpy.ndarray = self.__factor.solve(unit)
        self.__z.setflags(write=False)

    def bound(self) -> float:
        """r̂ + f_r̂(u): the SDP objective at the boundary point below [u, r̂]."""
        return self.__point.r_hat + self.value()

    def direction(self, tolerance: float = GRADIENT_TOLERANCE) -> numpy.ndarray:
        """A positive multiple of ∇f_r̂(u): g_i = z₁·z_{i+1} − z_{i+1}².

        Parameters
        ----------
        tolerance : float   Relative to 1 + ‖z‖².

        Returns
        -------
        g : numpy.ndarray of length n

        Raises
        ------
        StationaryPoint
        """
        z = self.__z
        tail = z[1:]
        g = z[0] * tail - tail * tail

        if numpy.linalg.norm(g) <= tolerance * (1.0 + z @ z):
            raise StationaryPoint("Gradient direction vanished.")

        return g

    def factor(self) -> CholeskyFactor:
        return self.__factor

    def gradient(self) -> numpy.ndarray:
        """The exact gradient ∇f_r̂(u) = g / z₁²."""
        z = self.__z
        tail = z[1:]
        return (z[0] * tail - tail * tail) / (z[0] * z[0])

    def kernel_vector(self) -> numpy.ndarray:
        """z, which spans the kernel of F([u, r̂ + f_r̂(u)])."""
        return self.__z

    def point(self) -> PlanePoint:
        return self.__point

    def system(self) -> LmiSystem:
        return self.__system

    def value(self) -> float:
        """f_r̂(u) = −1/z₁ (never positive).

        Returns
        -------
        f : float

        Raises
        ------
        DegenerateDirection
        """
        z = self.__z

        if abs(z[0]) <= KERNEL_TOLERANCE * (1.0 + z @ z):
            raise DegenerateDirection(
                "First coordinate of the kernel vector vanished; diag(u) - Q is "
                "numerically singular."
            )

        return -1.0 / z[0]


def eval_f(cache: OracleCache) -> float:
    """Evaluation oracle f_r̂(u)."""
    if not isinstance(cache, OracleCache):
        _log.error("Argument 'cache' is not the expected OracleCache.")
        raise TypeError("Argument 'cache' is not the expected OracleCache.")

    return cache.value()


def grad_dir(cache: OracleCache, tolerance: float = GRADIENT_TOLERANCE) -> numpy.ndarray:
    """Gradient oracle: a positive multiple of ∇f_r̂(u)."""
    if not isinstance(cache, OracleCache):
        _log.error("Argument 'cache' is not the expected OracleCache.")
        raise TypeError("Argument 'cache' is not the expected OracleCache.")

    return cache.direction(tolerance)


def ray_operator(factor: CholeskyFactor, direction: numpy.ndarray) -> SymmetricOperator:
    """B = −L⁻¹·C₂·L⁻ᵀ, where C₁ = L·Lᵀ and C₂ = [[0, −dᵀ/2], [−d/2, diag(d)]].

    Each application costs two triangular solves around an O(n) arrow matvec.

    Parameters
    ----------
    factor : CholeskyFactor     Factor of F at the ray origin.
    direction : numpy.ndarray   d, of length n.

    Returns
    -------
    operator : SymmetricOperator
    """
    d = numpy.asarray(direction, dtype=float)
    dimension = factor.dimension()

    def apply(vector: numpy.ndarray) -> numpy.ndarray:
        w = factor.solve_lower_transpose(vector)
        arrow = numpy.empty(dimension)
        arrow[0] = -0.5 * (d @ w[1:])
        arrow[1:] = -0.5 * d * w[0] + d * w[1:]
        return -factor.solve_lower(arrow)

    return SymmetricOperator(dimension, apply)


def boundary_ray(
    system: LmiSystem,
    point: PlanePoint,
    direction: numpy.ndarray,
    cache: OracleCache | None = None,
    tol: float = LANCZOS_TOLERANCE,
    max_iter: int | None = None,
    seed: int = 0,
) -> float:
    """Distance t* > 0 along [d, 0] from [u, r̂] to the boundary of the PSD region.

    t* = 1 / λ_max(B), the smallest positive root of det(C₁ + t·C₂).

    Parameters
    ----------
    system : LmiSystem
    point : PlanePoint      Interior ray origin.
    direction : numpy.ndarray   Unit vector d of length n.
    cache : OracleCache     Reuse its factor when it belongs to `point`.
    tol, max_iter, seed     Lanczos settings.

    Returns
    -------
    t_star : float

    Raises
    ------
    UnboundedRay
    """
    d = numpy.asarray(direction, dtype=float)

    if d.shape != (system.variables(),):
        raise ValueError(
            f"Argument 'direction' has shape {d.shape}, expected ({system.variables()},)."
        )

    if abs(numpy.linalg.norm(d) - 1.0) > 1e-8:
        _log.error("Argument 'direction' is not a unit vector.")
        raise ValueError("Argument 'direction' is not a unit vector.")

    if cache is None:
        cache = OracleCache(system, point)

    eigenvalue, _ = largest_eigenpair(
        ray_operator(cache.factor(), d), tol=tol, max_iter=max_iter, seed=seed
    )

    if eigenvalue <= RAY_EIGENVALUE_TOLERANCE:
        raise UnboundedRay(
            f"Ray never leaves the feasible region (λ_max(B) = {eigenvalue:.3e})."
        )

    return 1.0 / eigenvalue


def boundary_height(system: LmiSystem, u: numpy.ndarray) -> float:
    """r_b(u) = bᵀ(diag(u) − Q)⁻¹b with b = (c + u)/2.

    The ray [u, r_d] − t·e_{n+1} reaches the boundary at r_b for every start
    height r_d (r_b = r_d − 1/z₁, since det F is affine in r with leading
    cofactor det(diag(u) − Q)). r̂ + f_r̂(u) = r_b(u) at every interior point.

    Parameters
    ----------
    system : LmiSystem
    u : numpy.ndarray

    Returns
    -------
    r_b : float

    Raises
    ------
    InfeasibleShift     diag(u) − Q is not strictly positive definite.
    """
    problem = system.problem()
    u = numpy.asarray(u, dtype=float)

    if u.shape != (problem.dimension(),):
        raise ValueError(
            f"Argument 'u' has shape {u.shape}, expected ({problem.dimension()},)."
        )

    try:
        factor = cholesky(numpy.diag(u) - problem.quadratic())
    except NotPositiveDefinite as not_pd:
        raise InfeasibleShift(
            f"diag(u) - Q is not positive definite (pivot {not_pd.pivot})."
        ) from not_pd

    half_linear = 0.5 * (problem.linear() + u)
    return float(half_linear @ factor.solve(half_linear))


def initial_feasible_point(
    system: LmiSystem,
    shift: QcrShift | numpy.ndarray,
    push_relative: float = PUSH_RELATIVE,
    push_absolute: float = PUSH_ABSOLUTE,
) -> PlanePoint:
    """Interior plane point above a convexifying shift.

    r̂ = r_b + max(push_relative·|r_b|, push_absolute); one retry with the
    absolute push doubled.

    Parameters
    ----------
    system : LmiSystem
    shift : QcrShift or numpy.ndarray   diag(u) − Q must be positive definite.
    push_relative : float
    push_absolute : float

    Returns
    -------
    point : PlanePoint (interior)

    Raises
    ------
    InfeasibleShift, NumericFailure
    """
    u = numpy.array(shift.u if isinstance(shift, QcrShift) else shift, dtype=float)
    height = boundary_height(system, u)

    for attempt in range(2):
        push = max(push_relative * abs(height), push_absolute * 2**attempt)
        point = PlanePoint(u=u, r_hat=height + push)

        try:
            OracleCache(system, point)
        except NotPositiveDefinite:
            _log.debug(
                "Pushed point at r = {r_hat} is not interior; retrying.",
                extra={"r_hat": point.r_hat},
            )
            continue

        return point

    raise NumericFailure(
        f"Unable to find an interior point above boundary height {height:.6e}."
    )
