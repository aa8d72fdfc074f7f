"""
Module: contains the plane-projection descent (gradient ray shooting,
bisection line search on the segment, boundary-stall detection)
and its parameter and result types.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy
import pandas  # type: ignore[import]

from qubodualbounds.lmi_oracles import (
    LmiSystem,
    OracleCache,
    PlanePoint,
    boundary_ray,
)
from qubodualbounds.solver_errors import (
    DegenerateDirection,
    NotPositiveDefinite,
    NumericFailure,
    StationaryPoint,
)
from qubodualbounds.solver_status import Termination

RETRACT_FRACTION: float = 1e-6
MAX_BISECTION_STEPS: int = 200

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DescentParams:
    """
    iteration_limit is N (outer iterations), bisection_steps is k1,
    boundary_limit is k2 (consecutive boundary-bound iterations before stopping).
    """

    iteration_limit: int = 50000
    bisection_steps: int = 5
    boundary_limit: int = 2
    g_tol: float = 1e-10
    step_tol: float = 1e-12
    rel_tol: float = 1e-12
    lanczos_tol: float = 1e-10
    lanczos_max_iter: int | None = None
    seed: int = 0
    record_trace: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.iteration_limit, int) or self.iteration_limit < 0:
            raise ValueError("Argument 'iteration_limit' must be an int >= 0.")

        if not isinstance(self.bisection_steps, int) or self.bisection_steps < 1:
            raise ValueError("Argument 'bisection_steps' must be an int >= 1.")

        if not isinstance(self.boundary_limit, int) or self.boundary_limit < 1:
            raise ValueError("Argument 'boundary_limit' must be an int >= 1.")

        for name in ("g_tol", "step_tol", "lanczos_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"Argument '{name}' must be positive.")

        if self.rel_tol < 0:
            raise ValueError("Argument 'rel_tol' must be nonnegative.")

    @classmethod
    def standalone(cls, **overrides: object) -> DescentParams:
        """N=50000, k1=5, k2=2: a single bounding solve."""
        return cls(**overrides)  # type: ignore[arg-type]

    @classmethod
    def in_tree(cls, **overrides: object) -> DescentParams:
        """N=5, k1=5, k2=2: warmstarted node solves inside branch-and-bound."""
        settings: dict = {"iteration_limit": 5}
        settings.update(overrides)
        return cls(**settings)

    @classmethod
    def root(cls, **overrides: object) -> DescentParams:
        """N=2000, k1=10, k2=2: the coldstarted root solve."""
        settings: dict = {"iteration_limit": 2000, "bisection_steps": 10}
        settings.update(overrides)
        return cls(**settings)

    @classmethod
    def reference(cls, **overrides: object) -> DescentParams:
        """N=50000, k1=20, k2=2 with tight tolerances: runs to the boundary stall.

        Supplies the near-optimal shift and bound that start gaps are measured from.
        """
        settings: dict = {
            "bisection_steps": 20,
            "g_tol": 1e-12,
            "step_tol": 1e-14,
            "rel_tol": 1e-14,
        }
        settings.update(overrides)
        return cls(**settings)


class TraceRecord(NamedTuple):
    iteration: int
    bound: float
    step: float
    boundary: bool


@dataclass(frozen=True)
class DescentResult:
    """
    bound = r̂ + f_r̂(û): valid for the problem the system was built from
    (its offset not included).
    """

    u_hat: numpy.ndarray
    r_hat: float
    bound: float
    start_bound: float
    outer_iters: int
    termination: Termination
    trace: list[TraceRecord] | None = field(default=None)

    def trace_frame(self) -> pandas.DataFrame:
        """Per-iteration trace as a DataFrame (empty when tracing was off).

        Returns
        -------
        trace : pandas.DataFrame with columns iteration, bound, step, boundary
        """
        columns = list(TraceRecord._fields)

        if not self.trace:
            return pandas.DataFrame(columns=columns)

        return pandas.DataFrame(self.trace, columns=columns)


def _interior_cache(
    system: LmiSystem,
    candidate: numpy.ndarray,
    previous: numpy.ndarray,
    r_hat: float,
) -> OracleCache | None:
    """Cache at the accepted point, retracting once toward the previous iterate."""
    for _ in range(2):
        try:
            cache = OracleCache(system, PlanePoint(candidate, r_hat))
            cache.value()
            return cache
        except (NotPositiveDefinite, DegenerateDirection):
            candidate = candidate + RETRACT_FRACTION * (previous - candidate)

    return None


class Bisection(NamedTuple):
    """
    point is the last lower end u₋; lower_values holds f at every accepted u₋
    in order (the start excluded); on_boundary is True when the upper end
    never moved.
    """

    point: numpy.ndarray
    on_boundary: bool
    lower_values: list[float]
    steps: int


def bisect_segment(
    system: LmiSystem,
    lower: numpy.ndarray,
    upper: numpy.ndarray,
    r_hat: float,
    params: DescentParams,
) -> Bisection:
    """Locate the minimizer of f on [lower, upper] by the sign of the directional derivative.

    Runs k1 halvings. While u₋ has not left the start, further rounds of k1
    halvings refine the already shrunk segment, until u₋ moves, the segment
    is shorter than step_tol·(1 + ‖u₋‖), or MAX_BISECTION_STEPS is reached.
    """
    lower = numpy.asarray(lower, dtype=float)
    upper = numpy.asarray(upper, dtype=float)
    on_boundary = True
    lower_values: list[float] = []
    steps = 0

    while steps < MAX_BISECTION_STEPS:
        for _ in range(params.bisection_steps):
            steps += 1
            middle = 0.5 * (lower + upper)

            try:
                cache = OracleCache(system, PlanePoint(middle, r_hat))
                value = cache.value()
                slope = float(cache.direction(params.g_tol) @ (upper - lower))
            except StationaryPoint:
                slope = 0.0
            except (NotPositiveDefinite, DegenerateDirection):
                #   The ray estimate overshot the boundary; pull the far end in.
                upper = middle
                continue

            if slope > 0:
                upper = middle
                on_boundary = False
            else:
                lower = middle
                lower_values.append(value)

        if lower_values:
            break

        if numpy.linalg.norm(upper - lower) <= params.step_tol * (
            1.0 + numpy.linalg.norm(lower)
        ):
            break

    return Bisection(lower, on_boundary, lower_values, steps)


def descend(
    system: LmiSystem,
    start: PlanePoint,
    params: DescentParams | None = None,
) -> DescentResult:
    """Minimize f_r̂ over the slice, starting from an interior plane point.

    Every iterate yields a valid dual bound; the last one is returned.

    Termination tags:

    * IterLimit: N outer iterations ran.
    * BoundaryStall: for k2 consecutive iterations the line search never left
      the boundary end of its segment, or the accepted point stayed singular
      after one retraction.
    * Degenerate: the ray oracle failed.
    * StationaryPoint covers two cases. Either grad_dir fell below g_tol (a true
      stationary point), or the iterate made no progress: the refined line search
      could not move u₋ off u within step_tol, or the bound fell by at most
      rel_tol·(1 + |bound|). The second case only says the descent has
      stalled; the gradient there need not be small.

    Parameters
    ----------
    system : LmiSystem
    start : PlanePoint      Must be interior.
    params : DescentParams

    Returns
    -------
    result : DescentResult
    """
    if not isinstance(system, LmiSystem):
        _log.error("Argument 'system' is not the expected LmiSystem.")
        raise TypeError("Argument 'system' is not the expected LmiSystem.")

    if params is None:
        params = DescentParams()

    r_hat = float(start.r_hat)
    cache = OracleCache(system, start)
    u = numpy.array(cache.point().u)
    bound = cache.bound()
    start_bound = bound
    trace: list[TraceRecord] | None = [] if params.record_trace else None
    boundary_streak = 0
    iteration = 0
    termination = Termination.ITER_LIMIT

    while iteration < params.iteration_limit:
        iteration += 1

        try:
            gradient = cache.direction(params.g_tol)
        except StationaryPoint:
            termination = Termination.STATIONARY_POINT
            break

        direction = gradient / numpy.linalg.norm(gradient)

        try:
            step = boundary_ray(
                system,
                cache.point(),
                -direction,
                cache=cache,
                tol=params.lanczos_tol,
                max_iter=params.lanczos_max_iter,
                seed=params.seed,
            )
        except NumericFailure as failure:
            _log.debug("Ray oracle failed: {failure}.", extra={"failure": str(failure)})
            termination = Termination.DEGENERATE
            break

        if step <= params.step_tol * (1.0 + numpy.linalg.norm(u)):
            boundary_streak += 1

            if trace is not None:
                trace.append(TraceRecord(iteration, bound, step, True))

            if boundary_streak >= params.boundary_limit:
                termination = Termination.BOUNDARY_STALL
                break

            continue

        candidate, on_boundary, _, _ = bisect_segment(
            system, u, u - step * direction, r_hat, params
        )

        if numpy.array_equal(candidate, u):
            termination = Termination.STATIONARY_POINT
            break

        next_cache = _interior_cache(system, candidate, u, r_hat)

        if next_cache is None:
            termination = Termination.BOUNDARY_STALL
            break

        previous_bound = bound
        cache = next_cache
        u = numpy.array(cache.point().u)
        bound = cache.bound()
        boundary_streak = boundary_streak + 1 if on_boundary else 0

        if trace is not None:
            trace.append(TraceRecord(iteration, bound, step, on_boundary))

        _log.debug(
            "Iteration {iteration}: bound {bound}, step {step}, boundary {boundary}.",
            extra={
                "iteration": iteration,
                "bound": bound,
                "step": step,
                "boundary": on_boundary,
            },
        )

        if boundary_streak >= params.boundary_limit:
            termination = Termination.BOUNDARY_STALL
            break

        if previous_bound - bound <= params.rel_tol * (1.0 + abs(bound)):
            termination = Termination.STATIONARY_POINT
            break

    return DescentResult(
        u_hat=u,
        r_hat=r_hat,
        bound=bound,
        start_bound=start_bound,
        outer_iters=iteration,
        termination=termination,
        trace=trace,
    )
