"""
Module: command-line front end.

    qubodualbounds solve INSTANCE [--format maxcut] [--time-limit 60] [-v]
    qubodualbounds bound INSTANCE [-N 50000] [--k1 5] [--k2 2]
    qubodualbounds brute INSTANCE
    qubodualbounds convert INSTANCE --format maxcut [--output out.txt]
    qubodualbounds warmstart INSTANCE

Results go to stdout as JSON (and to --json-out). Exit status: 0 on success,
2 on input errors, 3 on numeric aborts.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

from tabulate import tabulate

from qubodualbounds.branch_and_bound import BnbConfig, QuboBranchAndBound
from qubodualbounds.brute_force import enumerate_maximum
from qubodualbounds.descent_solver import DescentParams, descend
from qubodualbounds.instance_reader import InstanceReader
from qubodualbounds.instance_writer import ResultWriter, result_json, serialize_triplet
from qubodualbounds.lmi_oracles import LmiSystem, initial_feasible_point
from qubodualbounds.qubo_problem import QuboProblem, trivial_shift
from qubodualbounds.solver_errors import InstanceFormatError, NumericFailure
from qubodualbounds.solver_logging import setup_logging
from qubodualbounds.solver_status import BnbStatus
from qubodualbounds.start_protocols import WarmstartStudy

EXIT_OK: int = 0
EXIT_INPUT_ERROR: int = 2
EXIT_NUMERIC_ERROR: int = 3

_log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubodualbounds",
        description="QUBO dual bounds by plane projection, and exact solves by "
        "warmstarted branch-and-bound.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="Path to the instance file.")
    common.add_argument(
        "--format",
        choices=["triplet", "maxcut"],
        default="triplet",
        help="Instance grammar (default: triplet).",
    )
    common.add_argument("--seed", type=int, default=0, help="Seed for every randomized step.")
    common.add_argument("--json-out", default=None, help="Also write the result JSON here.")
    common.add_argument(
        "--table", action="store_true", help="Print a summary table to stderr."
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v: progress records, -vv: per-iteration records (JSON lines on stderr).",
    )

    descent = argparse.ArgumentParser(add_help=False)
    descent.add_argument(
        "-N", "--iterations", type=int, default=None, help="Outer descent iterations."
    )
    descent.add_argument("--k1", type=int, default=5, help="Bisection steps per iteration.")
    descent.add_argument(
        "--k2", type=int, default=2, help="Consecutive boundary iterations before stopping."
    )

    solve = subparsers.add_parser(
        "solve", parents=[common, descent], help="Solve to proven optimality."
    )
    solve.add_argument("--time-limit", type=float, default=3600.0, help="Seconds.")
    solve.add_argument("--node-limit", type=int, default=None)
    solve.add_argument("--root-iterations", type=int, default=2000)
    solve.add_argument(
        "--primal", type=float, default=None, help="Inject a known objective value."
    )
    solve.add_argument(
        "--no-warmstart",
        action="store_true",
        help="Coldstart every node instead of projecting the parent's shift.",
    )

    subparsers.add_parser(
        "bound", parents=[common, descent], help="Single root dual bound."
    )
    subparsers.add_parser("brute", parents=[common], help="Exact maximum by enumeration.")

    convert = subparsers.add_parser(
        "convert", parents=[common], help="Re-serialize the instance as triplets."
    )
    convert.add_argument("--output", default=None, help="Target file (default: stdout).")

    subparsers.add_parser(
        "warmstart", parents=[common, descent], help="Compare cold and warm descents."
    )
    return parser


def _blank_document(args: argparse.Namespace, params: dict) -> dict:
    return {
        "status": None,
        "best_value": None,
        "best_x": None,
        "bound": None,
        "rel_gap_percent": None,
        "nodes": None,
        "wall_time_s": None,
        "seed": args.seed,
        "params": params,
    }


def _descent_settings(params: DescentParams) -> dict:
    return {
        "N": params.iteration_limit,
        "k1": params.bisection_steps,
        "k2": params.boundary_limit,
    }


def _run_solve(args: argparse.Namespace, problem: QuboProblem) -> dict:
    iterations = 5 if args.iterations is None else args.iterations
    config = BnbConfig(
        descent=DescentParams.in_tree(
            iteration_limit=iterations,
            bisection_steps=args.k1,
            boundary_limit=args.k2,
            seed=args.seed,
        ),
        root_params=DescentParams.root(
            iteration_limit=args.root_iterations, boundary_limit=args.k2, seed=args.seed
        ),
        time_limit=args.time_limit,
        node_limit=args.node_limit,
        injected_primal=args.primal,
        warmstart=not args.no_warmstart,
    )
    result = QuboBranchAndBound(config).solve(problem)
    params = _descent_settings(config.descent)
    params.update(
        {
            "root_iterations": config.root_params.iteration_limit,
            "time_limit": config.time_limit,
            "node_limit": config.node_limit,
            "primal": config.injected_primal,
            "warmstart": config.warmstart,
        }
    )
    document = _blank_document(args, params)
    document.update(
        {
            "status": str(result.status),
            "best_value": result.incumbent_value,
            "best_x": None if result.incumbent_x is None else result.incumbent_x,
            "bound": result.global_bound,
            "rel_gap_percent": result.rel_gap_percent,
            "nodes": result.nodes,
            "wall_time_s": result.wall_time,
            "descent_iterations": result.descent_iterations,
            "root_bound": result.root_bound,
        }
    )
    return document


def _run_bound(args: argparse.Namespace, problem: QuboProblem) -> dict:
    started = time.perf_counter()
    params = DescentParams.standalone(
        iteration_limit=50000 if args.iterations is None else args.iterations,
        bisection_steps=args.k1,
        boundary_limit=args.k2,
        seed=args.seed,
    )
    system = LmiSystem(problem)
    start = initial_feasible_point(system, trivial_shift(problem, seed=args.seed))
    result = descend(system, start, params)
    document = _blank_document(args, _descent_settings(params))
    document.update(
        {
            "bound": result.bound + problem.offset(),
            "wall_time_s": time.perf_counter() - started,
            "u_hat": result.u_hat,
            "iterations": result.outer_iters,
            "termination": str(result.termination),
        }
    )
    return document


def _run_brute(args: argparse.Namespace, problem: QuboProblem) -> dict:
    started = time.perf_counter()
    value, x = enumerate_maximum(problem)
    document = _blank_document(args, {})
    document.update(
        {
            "status": str(BnbStatus.OPTIMAL),
            "best_value": value,
            "best_x": x,
            "bound": value,
            "rel_gap_percent": 0.0,
            "nodes": 2 ** problem.dimension(),
            "wall_time_s": time.perf_counter() - started,
        }
    )
    return document


def _emit(args: argparse.Namespace, document: dict) -> None:
    print(result_json(document))

    if args.json_out:
        writer = ResultWriter()
        writer.add_result(document)
        writer.write(args.json_out)

    if args.table:
        rows = [
            (key, document[key])
            for key in ("status", "best_value", "bound", "rel_gap_percent", "nodes")
            if document.get(key) is not None
        ]
        print(tabulate(rows, headers=["field", "value"]), file=sys.stderr)


def run(args: argparse.Namespace) -> int:
    """Execute one parsed command line.

    Returns
    -------
    exit_status : int
    """
    setup_logging(args.verbose)

    try:
        problem = InstanceReader(args.format).read_file(args.instance)

        if args.command == "convert":
            text = serialize_triplet(problem)

            if args.output:
                with open(args.output, mode="w", encoding="utf-8") as file_obj:
                    file_obj.write(text)
            else:
                sys.stdout.write(text)

            return EXIT_OK

        if args.command == "warmstart":
            iterations = 50000 if args.iterations is None else args.iterations
            study = WarmstartStudy(
                params=DescentParams.standalone(
                    iteration_limit=iterations,
                    bisection_steps=args.k1,
                    boundary_limit=args.k2,
                    seed=args.seed,
                ),
                seed=args.seed,
            )
            frame = study.run([problem], [args.instance])
            print(study.summary())

            if args.json_out:
                writer = ResultWriter()

                for record in frame.to_dict(orient="records"):
                    writer.add_result(record)

                writer.write(args.json_out)

            return EXIT_OK

        if args.command == "solve":
            document = _run_solve(args, problem)
        elif args.command == "bound":
            document = _run_bound(args, problem)
        else:
            document = _run_brute(args, problem)

    except (InstanceFormatError, FileNotFoundError, ValueError, TypeError) as bad_input:
        _log.error("Input error: {error}", extra={"error": str(bad_input)})
        print(f"error: {bad_input}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except NumericFailure as failure:
        _log.error("Numeric abort: {error}", extra={"error": str(failure)})
        print(f"numeric error: {failure}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR

    _emit(args, document)
    return EXIT_OK


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
