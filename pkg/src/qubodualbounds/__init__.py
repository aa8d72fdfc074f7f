"""
QUBO Dual Bounds

Computes dual (upper) bounds for maximization QUBOs by minimizing, over a
hyperplane slice of the QCR semidefinite program's feasible region, the
distance down to its boundary. Each iterate yields a valid bound, and the
final shift warmstarts the children of a best-bound branch-and-bound.

Classes:
    BnbConfig
    DescentParams
    InstanceReader
    LmiSystem
    OracleCache
    QuboBranchAndBound
    QuboProblem
    ResultWriter
    WarmstartStudy
"""

from .branch_and_bound import BnbConfig, BnbResult, QuboBranchAndBound, solve
from .descent_solver import DescentParams, DescentResult, descend
from .instance_reader import InstanceReader, parse_maxcut, parse_triplet
from .instance_writer import ResultWriter, serialize_triplet
from .lmi_oracles import LmiSystem, OracleCache, PlanePoint, initial_feasible_point
from .qubo_problem import QcrShift, QuboProblem, evaluate_qubo, fix_variable
from .solver_status import BnbStatus, Termination
from .start_protocols import WarmstartStudy
