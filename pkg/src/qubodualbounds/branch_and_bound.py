"""
Module: contains class QuboBranchAndBound, a best-bound branch-and-bound
that proves global optimality of a QUBO using plane-projection dual bounds,
with each child warmstarted from its parent's shift.

Rules: always branch on the free variable of minimum original index,
always process the open node with the largest (weakest) dual bound,
no presolve and no primal heuristics (an incumbent value may be injected).
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy

from qubodualbounds.descent_solver import DescentParams, descend
from qubodualbounds.lmi_oracles import (
    PUSH_ABSOLUTE,
    PUSH_RELATIVE,
    LmiSystem,
    OracleCache,
    PlanePoint,
    initial_feasible_point,
)
from qubodualbounds.qubo_problem import (
    QcrShift,
    QuboProblem,
    evaluate_qubo,
    fix_variable,
    largest_quadratic_eigenvalue,
    strictness_margin,
    trivial_shift,
)
from qubodualbounds.solver_errors import NumericFailure
from qubodualbounds.solver_status import BnbStatus

GAP_DISPLAY_CAP: float = 1e6
PRUNE_TOLERANCE: float = 1e-9
INTEGER_SLACK: float = 1e-6

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BnbNode:
    """
    One subproblem: the original variables in `fixed` are set, the rest
    (listed in `free`, increasing) form the reduced problem `sub`.
    `parent_shift` is the start the node's descent used; `u_hat` is where it ended.
    """

    fixed: dict[int, int]
    sub: QuboProblem
    parent_shift: QcrShift
    u_hat: numpy.ndarray
    bound: float
    depth: int
    free: tuple[int, ...]


@dataclass(frozen=True)
class BnbConfig:
    descent: DescentParams = field(default_factory=DescentParams.in_tree)
    root_params: DescentParams = field(default_factory=DescentParams.root)
    time_limit: float = 3600.0
    node_limit: int | None = None
    max_open_nodes: int = 5_000_000
    injected_primal: float | None = None
    warmstart: bool = True
    integer_floor: bool | None = None
    push_relative: float = PUSH_RELATIVE
    push_absolute: float = PUSH_ABSOLUTE
    log_every: int = 100

    def __post_init__(self) -> None:
        if not isinstance(self.descent, DescentParams):
            _log.error("Argument 'descent' is not the expected DescentParams.")
            raise TypeError("Argument 'descent' is not the expected DescentParams.")

        if not isinstance(self.root_params, DescentParams):
            _log.error("Argument 'root_params' is not the expected DescentParams.")
            raise TypeError("Argument 'root_params' is not the expected DescentParams.")

        if self.time_limit <= 0:
            raise ValueError("Argument 'time_limit' must be positive.")

        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError("Argument 'node_limit' must be positive.")

        if self.max_open_nodes < 1:
            raise ValueError("Argument 'max_open_nodes' must be positive.")

        if self.log_every < 1:
            raise ValueError("Argument 'log_every' must be positive.")


@dataclass(frozen=True)
class BnbResult:
    status: BnbStatus
    incumbent_value: float
    incumbent_x: numpy.ndarray | None
    global_bound: float
    rel_gap_percent: float
    nodes: int
    wall_time: float
    descent_iterations: int = 0
    pruned: int = 0
    root_bound: float = math.nan


def relative_gap(upper: float, lower: float) -> float:
    """100·(upper − lower)/max(|lower|, 1e-10), in percent, capped at 1e6 for display.

    Parameters
    ----------
    upper : float   Dual bound.
    lower : float   Primal (incumbent) value.

    Returns
    -------
    gap : float
    """
    if not (math.isfinite(upper) and math.isfinite(lower)):
        return GAP_DISPLAY_CAP

    gap = 100.0 * (upper - lower) / max(abs(lower), 1e-10)
    return min(max(gap, 0.0), GAP_DISPLAY_CAP)


def _coldstart(system: LmiSystem, seed: int, push_relative: float, push_absolute: float) -> PlanePoint:
    shift = trivial_shift(system.problem(), seed=seed)
    return initial_feasible_point(system, shift, push_relative, push_absolute)


def _child_start(
    system: LmiSystem,
    u: numpy.ndarray,
    seed: int = 0,
    push_relative: float = PUSH_RELATIVE,
    push_absolute: float = PUSH_ABSOLUTE,
) -> PlanePoint:
    """Interior start for a child from the projected parent shift; never fails."""
    try:
        return initial_feasible_point(system, u, push_relative, push_absolute)
    except NumericFailure:
        pass

    eigenvalue = largest_quadratic_eigenvalue(system.problem(), seed=seed)

    try:
        return initial_feasible_point(
            system, u + strictness_margin(eigenvalue), push_relative, push_absolute
        )
    except NumericFailure:
        return _coldstart(system, seed, push_relative, push_absolute)


def warmstart_child(
    parent: BnbNode,
    index: int,
    value: int,
    seed: int = 0,
    push_relative: float = PUSH_RELATIVE,
    push_absolute: float = PUSH_ABSOLUTE,
) -> PlanePoint:
    """Project the parent's shift onto the child that fixes sub-variable `index`.

    The child shift is û with coordinate `index` deleted (a principal submatrix of
    a PSD diag(û) − Q stays PSD); r̂ is recomputed above it. A strictness failure
    bumps the shift by the strictness margin once, then falls back to a coldstart.

    Parameters
    ----------
    parent : BnbNode
    index : int     0-based index into parent.sub.
    value : int     0 or 1.

    Returns
    -------
    start : PlanePoint for the child's reduced problem
    """
    if not isinstance(parent, BnbNode):
        _log.error("Argument 'parent' is not the expected BnbNode.")
        raise TypeError("Argument 'parent' is not the expected BnbNode.")

    child = fix_variable(parent.sub, index, value)
    projected = numpy.delete(numpy.asarray(parent.u_hat, dtype=float), index)
    return _child_start(LmiSystem(child), projected, seed, push_relative, push_absolute)


class QuboBranchAndBound:
    """
    Best-bound branch-and-bound over binary fixings, processed sequentially.
    """

    def __init__(self, config: BnbConfig | None = None) -> None:
        self.__log = logging.getLogger(__name__)

        if config is None:
            config = BnbConfig()

        if not isinstance(config, BnbConfig):
            self.__log.error("Argument 'config' is not the expected BnbConfig.")
            raise TypeError("Argument 'config' is not the expected BnbConfig.")

        self.__config: BnbConfig = config

    def __bound_node(
        self, system: LmiSystem, start: PlanePoint, params: DescentParams
    ) -> tuple[float, numpy.ndarray, int]:
        """Run the descent; on a numeric abort keep the start point's (valid) bound."""
        try:
            result = descend(system, start, params)
        except NumericFailure as failure:
            self.__log.warning(
                "Descent aborted ({failure}); keeping the start bound.",
                extra={"failure": str(failure)},
            )
            return OracleCache(system, start).bound(), numpy.asarray(start.u), 0

        return result.bound, result.u_hat, result.outer_iters

    def __child_start(self, system: LmiSystem, parent: BnbNode) -> PlanePoint:
        config = self.__config

        if config.warmstart:
            return _child_start(
                system,
                numpy.delete(parent.u_hat, 0),
                config.descent.seed,
                config.push_relative,
                config.push_absolute,
            )

        return _coldstart(
            system, config.descent.seed, config.push_relative, config.push_absolute
        )

    @staticmethod
    def __prunable(
        bound: float, incumbent: float, integer_floor: bool, strict: bool = False
    ) -> bool:
        """Whether a node with this bound cannot beat the incumbent.

        With `strict` (an injected value whose assignment is still unknown) a
        node that could only tie the incumbent is kept, so the assignment is found.
        """
        if not math.isfinite(incumbent):
            return False

        tolerance = PRUNE_TOLERANCE * (1.0 + abs(incumbent))

        if integer_floor:
            ceiling = math.floor(bound + INTEGER_SLACK * (1.0 + abs(bound)))
            return ceiling < incumbent - tolerance if strict else ceiling <= incumbent

        if strict:
            return bound < incumbent - tolerance

        return bound <= incumbent + tolerance

    def __report(
        self, nodes: int, open_nodes: int, incumbent: float, bound: float, elapsed: float
    ) -> None:
        self.__log.info(
            "Nodes {nodes}, open {open_nodes}, incumbent {incumbent}, bound {bound}, "
            "gap {gap_percent}%.",
            extra={
                "nodes": nodes,
                "open_nodes": open_nodes,
                "incumbent": incumbent if math.isfinite(incumbent) else None,
                "bound": bound if math.isfinite(bound) else None,
                "gap_percent": relative_gap(bound, incumbent),
                "elapsed_s": round(elapsed, 3),
            },
        )

    def solve(self, problem: QuboProblem) -> BnbResult:
        """Maximize the QUBO to proven optimality (or until a limit).

        Parameters
        ----------
        problem : QuboProblem

        Returns
        -------
        result : BnbResult
        """
        if not isinstance(problem, QuboProblem):
            self.__log.error("Argument 'problem' is not the expected QuboProblem.")
            raise TypeError("Argument 'problem' is not the expected QuboProblem.")

        config = self.__config
        started = time.perf_counter()
        dimension = problem.dimension()
        integer_floor = (
            problem.integer_valued()
            if config.integer_floor is None
            else config.integer_floor
        )
        incumbent = (
            -math.inf if config.injected_primal is None else float(config.injected_primal)
        )
        incumbent_x: numpy.ndarray | None = None
        order = itertools.count()
        heap: list = []
        nodes = 0
        pruned = 0
        descent_iterations = 0
        next_report = config.log_every
        in_flight: BnbNode | None = None

        root_system = LmiSystem(problem)
        root_shift = trivial_shift(problem, seed=config.root_params.seed)
        root_start = initial_feasible_point(
            root_system, root_shift, config.push_relative, config.push_absolute
        )
        root_bound, root_u, iterations = self.__bound_node(
            root_system, root_start, config.root_params
        )
        root_bound += problem.offset()
        descent_iterations += iterations
        nodes += 1
        root = BnbNode(
            fixed={},
            sub=problem,
            parent_shift=root_shift,
            u_hat=root_u,
            bound=root_bound,
            depth=0,
            free=tuple(range(dimension)),
        )
        heapq.heappush(heap, (-root.bound, -root.depth, next(order), root))
        status = BnbStatus.OPTIMAL

        try:
            while heap:
                if time.perf_counter() - started >= config.time_limit:
                    status = BnbStatus.TIME_LIMIT
                    break

                if config.node_limit is not None and nodes >= config.node_limit:
                    status = BnbStatus.NODE_LIMIT
                    break

                if len(heap) > config.max_open_nodes:
                    status = BnbStatus.MEMORY_ABORT
                    break

                node: BnbNode = heapq.heappop(heap)[3]
                in_flight = node

                if self.__prunable(
                    node.bound, incumbent, integer_floor, strict=incumbent_x is None
                ):
                    in_flight = None
                    pruned += 1
                    continue

                variable = node.free[0]

                for value in (0, 1):
                    fixed = dict(node.fixed)
                    fixed[variable] = value
                    nodes += 1

                    if node.sub.dimension() == 1:
                        assignment = numpy.array(
                            [fixed[index] for index in range(dimension)], dtype=numpy.int8
                        )
                        leaf_value = evaluate_qubo(problem, assignment)

                        if leaf_value > incumbent or (
                            incumbent_x is None
                            and leaf_value
                            >= incumbent - PRUNE_TOLERANCE * (1.0 + abs(incumbent))
                        ):
                            incumbent, incumbent_x = leaf_value, assignment

                        continue

                    child = fix_variable(node.sub, 0, value)
                    child_system = LmiSystem(child)
                    start = self.__child_start(child_system, node)
                    child_bound, child_u, iterations = self.__bound_node(
                        child_system, start, config.descent
                    )
                    descent_iterations += iterations
                    child_bound = min(node.bound, child.offset() + child_bound)

                    if self.__prunable(
                        child_bound, incumbent, integer_floor, strict=incumbent_x is None
                    ):
                        pruned += 1
                        continue

                    child_node = BnbNode(
                        fixed=fixed,
                        sub=child,
                        parent_shift=QcrShift(u=numpy.asarray(start.u)),
                        u_hat=child_u,
                        bound=child_bound,
                        depth=node.depth + 1,
                        free=node.free[1:],
                    )
                    heapq.heappush(
                        heap,
                        (-child_node.bound, -child_node.depth, next(order), child_node),
                    )

                in_flight = None

                if nodes >= next_report:
                    next_report += config.log_every
                    self.__report(
                        nodes,
                        len(heap),
                        incumbent,
                        max(incumbent, -heap[0][0]) if heap else incumbent,
                        time.perf_counter() - started,
                    )
        except MemoryError:
            status = BnbStatus.MEMORY_ABORT

        global_bound = max(incumbent, -heap[0][0]) if heap else incumbent

        if in_flight is not None:
            #   Popped but its children never reached the heap.
            global_bound = max(global_bound, in_flight.bound)

        if status == BnbStatus.OPTIMAL:
            global_bound = incumbent

        wall_time = time.perf_counter() - started
        self.__report(nodes, len(heap), incumbent, global_bound, wall_time)
        return BnbResult(
            status=status,
            incumbent_value=incumbent,
            incumbent_x=incumbent_x,
            global_bound=global_bound,
            rel_gap_percent=relative_gap(global_bound, incumbent),
            nodes=nodes,
            wall_time=wall_time,
            descent_iterations=descent_iterations,
            pruned=pruned,
            root_bound=root_bound,
        )


def solve(problem: QuboProblem, config: BnbConfig | None = None) -> BnbResult:
    """Convenience wrapper around QuboBranchAndBound(config).solve(problem)."""
    return QuboBranchAndBound(config).solve(problem)
