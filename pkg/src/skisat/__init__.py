"""Behavioral simulator of a clause-coupled analog SAT/MAX-SAT solver.

Node voltages integrate unit currents from clause coupling logic; a global
pulse stream silences satisfied clauses to escape local minima. Includes a
WalkSAT baseline, an exhaustive MAX-SAT oracle and time/energy-to-solution
metrics.
"""

from .cnf import Clause, Cnf, DimacsError, Literal, UnsatReport, evaluate, generate_random_ksat, parse_dimacs, read_dimacs, serialize_dimacs
from .dynamics import KERNEL, ClauseOutputs, DynamicsConfig, RunRecord, SolverState, clause_outputs, make_break, node_currents, run, step
from .metrics import BenchReport, aggregate, ets, n99, tts
from .perturb import PerturbationConfig, PerturbationSchedule, apply_gaussian_noise, build_schedule, make_schedule
from .reference import OracleResult, WalkSatParams, brute_force, walksat

__version__ = "0.1.0"
