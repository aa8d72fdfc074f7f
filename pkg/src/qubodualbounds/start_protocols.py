"""
Module: contains the coldstart and warmstart start-point protocols and
class WarmstartStudy, which compares descents from both kinds of start.

A start's gap is measured against a reference bound (the best bound known
for the instance, e.g. from a long descent): 100·(start − reference)/|reference|.
"""

from __future__ import annotations

import logging
import math
import time

import numpy
import pandas  # type: ignore[import]
from tabulate import tabulate

from qubodualbounds.branch_and_bound import relative_gap
from qubodualbounds.descent_solver import DescentParams, DescentResult, descend
from qubodualbounds.lmi_oracles import (
    LmiSystem,
    boundary_height,
    initial_feasible_point,
)
from qubodualbounds.qubo_problem import (
    QcrShift,
    QuboProblem,
    largest_quadratic_eigenvalue,
    trivial_shift,
)

MIN_COLDSTART_FACTOR: float = 1.05
SEARCH_STEPS: int = 60
STUDY_COLUMNS: list = [
    "instance",
    "start",
    "start_gap_percent",
    "iterations",
    "runtime_s",
    "bound",
    "termination",
]

_log = logging.getLogger(__name__)


def start_gap(problem: QuboProblem, u: numpy.ndarray, reference: float) -> float:
    """Gap (percent) of the bound r_b(u) + offset that a start at u begins with."""
    height = boundary_height(LmiSystem(problem), u) + problem.offset()
    return relative_gap(height, reference)


def coldstart_shift(problem: QuboProblem, factor: float, seed: int = 0) -> QcrShift:
    """u = (λ_max + (factor − 1)·max(|λ_max|, 1))·1.

    Parameters
    ----------
    problem : QuboProblem
    factor : float      At least 1.05.
    seed : int

    Returns
    -------
    shift : QcrShift, marked convexifying
    """
    if factor < MIN_COLDSTART_FACTOR:
        raise ValueError(f"Argument 'factor' must be at least {MIN_COLDSTART_FACTOR}.")

    eigenvalue = largest_quadratic_eigenvalue(problem, seed=seed)
    level = eigenvalue + (factor - 1.0) * max(abs(eigenvalue), 1.0)
    return QcrShift(u=numpy.full(problem.dimension(), level), convexifying=True)


def calibrated_coldstart(
    problem: QuboProblem,
    reference: float,
    low: float = 85.0,
    high: float = 95.0,
    seed: int = 0,
) -> QcrShift:
    """Coldstart shift whose start gap lies in [low, high] percent.

    The factor grows by doubling until the gap reaches `low`, then is bisected.
    When the gap at factor 1.05 is already at least `low` that shift is kept.

    Returns
    -------
    shift : QcrShift
    """
    if not 0 <= low <= high:
        raise ValueError("Arguments must satisfy 0 <= low <= high.")

    lower = MIN_COLDSTART_FACTOR
    shift = coldstart_shift(problem, lower, seed)

    if start_gap(problem, shift.u, reference) >= low:
        return shift

    upper = 2.0 * lower

    for _ in range(SEARCH_STEPS):
        if start_gap(problem, coldstart_shift(problem, upper, seed).u, reference) >= low:
            break

        lower, upper = upper, 2.0 * upper

    factor = upper

    for _ in range(SEARCH_STEPS):
        shift = coldstart_shift(problem, factor, seed)
        gap = start_gap(problem, shift.u, reference)

        if gap < low:
            lower = factor
        elif gap > high:
            upper = factor
        else:
            break

        factor = 0.5 * (lower + upper)

    return shift


def perturbation_profile(
    u_star: numpy.ndarray, rng: numpy.random.Generator
) -> numpy.ndarray:
    """ρ_i uniform in [10^(Y_i − 1), 10^Y_i], where 10^Y_i <= |u*_i| < 10^(Y_i + 1).

    Y_i is 0 for a zero entry.
    """
    magnitude = numpy.abs(numpy.asarray(u_star, dtype=float))
    orders = numpy.zeros_like(magnitude)
    nonzero = magnitude > 0
    orders[nonzero] = numpy.floor(numpy.log10(magnitude[nonzero]))
    return rng.uniform(10.0 ** (orders - 1.0), 10.0**orders)


def perturbed_warmstart(
    u_star: numpy.ndarray, scale: float, rng: numpy.random.Generator
) -> QcrShift:
    """u = u* + scale·ρ with ρ from perturbation_profile; ρ > 0 keeps diag(u) − Q PD.

    Parameters
    ----------
    u_star : numpy.ndarray      A (near-)optimal shift.
    scale : float               Nonnegative.
    rng : numpy.random.Generator

    Returns
    -------
    shift : QcrShift
    """
    if scale < 0:
        raise ValueError("Argument 'scale' must be nonnegative.")

    u_star = numpy.asarray(u_star, dtype=float)
    return QcrShift(u=u_star + scale * perturbation_profile(u_star, rng))


def calibrated_warmstart(
    problem: QuboProblem,
    u_star: numpy.ndarray,
    reference: float,
    low: float = 7.0,
    high: float = 8.0,
    rng: numpy.random.Generator | None = None,
) -> QcrShift:
    """Perturbed u* whose start gap lies in [low, high] percent.

    One profile ρ is drawn; only the scale is searched. If u* itself already
    starts at a gap of at least `low`, u* is returned unperturbed.

    Returns
    -------
    shift : QcrShift
    """
    if not 0 <= low <= high:
        raise ValueError("Arguments must satisfy 0 <= low <= high.")

    if rng is None:
        rng = numpy.random.default_rng(0)

    u_star = numpy.asarray(u_star, dtype=float)
    profile = perturbation_profile(u_star, rng)

    if start_gap(problem, u_star, reference) >= low:
        _log.warning(
            "Unperturbed shift already starts at a gap of at least {low}%.",
            extra={"low": low},
        )
        return QcrShift(u=u_star.copy())

    lower, upper = 0.0, 1.0

    for _ in range(SEARCH_STEPS):
        if start_gap(problem, u_star + upper * profile, reference) >= low:
            break

        lower, upper = upper, 2.0 * upper

    scale = upper

    for _ in range(SEARCH_STEPS):
        gap = start_gap(problem, u_star + scale * profile, reference)

        if gap < low:
            lower = scale
        elif gap > high:
            upper = scale
        else:
            break

        scale = 0.5 * (lower + upper)

    return QcrShift(u=u_star + scale * profile)


def shifted_geometric_mean(values: list | numpy.ndarray, shift: float = 10.0) -> float:
    """(Π (v_i + shift))^(1/k) − shift, computed through logarithms."""
    data = numpy.asarray(values, dtype=float)

    if data.size == 0:
        return math.nan

    if numpy.any(data + shift <= 0):
        raise ValueError("Every value plus the shift must be positive.")

    return float(numpy.exp(numpy.mean(numpy.log(data + shift))) - shift)


class WarmstartStudy:
    """
    Runs cold and warm descents on each problem and tabulates the effort.

    For each problem a reference descent from the trivial shift supplies the
    reference bound and u*. By default it runs DescentParams.reference() until
    the boundary stall. The cold start is calibrated to cold_gap percent and
    the warm start, a perturbation of u*, to warm_gap percent.
    """

    def __init__(
        self,
        params: DescentParams | None = None,
        reference_params: DescentParams | None = None,
        cold_gap: tuple = (85.0, 95.0),
        warm_gap: tuple = (7.0, 8.0),
        seed: int = 0,
    ) -> None:
        self.__log = logging.getLogger(__name__)

        if params is None:
            params = DescentParams.standalone()

        if reference_params is None and isinstance(params, DescentParams):
            reference_params = DescentParams.reference(seed=params.seed)

        if not isinstance(params, DescentParams) or not isinstance(
            reference_params, DescentParams
        ):
            self.__log.error("Descent settings must be DescentParams objects.")
            raise TypeError("Descent settings must be DescentParams objects.")

        self.__params: DescentParams = params
        self.__reference_params: DescentParams = reference_params
        self.__cold_gap: tuple = cold_gap
        self.__warm_gap: tuple = warm_gap
        self.__seed: int = seed
        self.__results: pandas.DataFrame = pandas.DataFrame(columns=STUDY_COLUMNS)

    def __timed_descent(
        self, system: LmiSystem, shift: QcrShift
    ) -> tuple[DescentResult, float]:
        started = time.perf_counter()
        start = initial_feasible_point(system, shift)
        result = descend(system, start, self.__params)
        return result, time.perf_counter() - started

    def results(self) -> pandas.DataFrame:
        return self.__results

    def run(self, problems: list, names: list | None = None) -> pandas.DataFrame:
        """Descend from a cold and a warm start on every problem.

        Parameters
        ----------
        problems : list of QuboProblem
        names : list of str     Defaults to "instance_<k>".

        Returns
        -------
        results : pandas.DataFrame with STUDY_COLUMNS, two rows per problem
        """
        if names is None:
            names = [f"instance_{k}" for k in range(len(problems))]

        if len(names) != len(problems):
            self.__log.error("Arguments 'problems' and 'names' differ in length.")
            raise ValueError("Arguments 'problems' and 'names' differ in length.")

        rng = numpy.random.default_rng(self.__seed)
        rows: list = []

        for name, problem in zip(names, problems):
            if not isinstance(problem, QuboProblem):
                self.__log.error("Argument 'problems' must hold QuboProblem objects.")
                raise TypeError("Argument 'problems' must hold QuboProblem objects.")

            system = LmiSystem(problem)
            reference_result = descend(
                system,
                initial_feasible_point(system, trivial_shift(problem, seed=self.__seed)),
                self.__reference_params,
            )
            reference = reference_result.bound + problem.offset()
            starts = {
                "cold": calibrated_coldstart(
                    problem, reference, *self.__cold_gap, seed=self.__seed
                ),
                "warm": calibrated_warmstart(
                    problem, reference_result.u_hat, reference, *self.__warm_gap, rng=rng
                ),
            }

            for kind, shift in starts.items():
                result, runtime = self.__timed_descent(system, shift)
                rows.append(
                    (
                        name,
                        kind,
                        start_gap(problem, shift.u, reference),
                        result.outer_iters,
                        runtime,
                        result.bound + problem.offset(),
                        str(result.termination),
                    )
                )

            self.__log.info(
                "Studied {instance}: cold {cold_iterations}, warm {warm_iterations} "
                "iterations.",
                extra={
                    "instance": name,
                    "cold_iterations": rows[-2][3],
                    "warm_iterations": rows[-1][3],
                },
            )

        self.__results = pandas.DataFrame(rows, columns=STUDY_COLUMNS)
        return self.__results

    def summary(self) -> str:
        """Per start kind: mean gap, mean and shifted geometric mean iterations, mean runtime."""
        if self.__results.empty:
            return ""

        grouped = self.__results.groupby("start", sort=True)
        table = [
            (
                kind,
                len(frame),
                frame["start_gap_percent"].mean(),
                frame["iterations"].mean(),
                shifted_geometric_mean(frame["iterations"].to_numpy()),
                frame["runtime_s"].mean(),
            )
            for kind, frame in grouped
        ]
        return tabulate(
            table,
            headers=[
                "start",
                "instances",
                "mean gap %",
                "mean iterations",
                "sgm iterations",
                "mean runtime s",
            ],
            floatfmt=".2f",
        )
