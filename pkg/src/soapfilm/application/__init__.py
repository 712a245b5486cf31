"""Application layer: the soap-film heuristic, the exhaustive oracle and experiments."""

from soapfilm.application.heuristic import SolveOutcome, SolveReport, Trace, solve
from soapfilm.application.oracle import OracleResult, oracle_wsmt
from soapfilm.application.protocols import SolvedTree, SteinerSolverProtocol
from soapfilm.application.solvers import ExhaustiveSolver, SoapFilmSolver

__all__ = [
    "ExhaustiveSolver",
    "OracleResult",
    "SoapFilmSolver",
    "SolveOutcome",
    "SolveReport",
    "SolvedTree",
    "SteinerSolverProtocol",
    "Trace",
    "oracle_wsmt",
    "solve",
]
