"""Solver implementations conforming to SteinerSolverProtocol."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Optional

from soapfilm.application.heuristic import SolveOutcome, solve
from soapfilm.application.oracle import OracleResult, oracle_wsmt
from soapfilm.application.protocols import SolvedTree
from soapfilm.domain.config import SolveConfig
from soapfilm.domain.geometry import WeightedVertex
from soapfilm.domain.tree import TreeMetrics

__all__ = ["ExhaustiveSolver", "SoapFilmSolver"]

logger = logging.getLogger(__name__)


class SoapFilmSolver:
    """Soap-film heuristic behind the solver protocol.

    :meth:`run` returns the full outcome (report and trace) for callers
    that render or report it; the latest one also stays available as
    :attr:`last_outcome`.

    Example:
        >>> from soapfilm.domain.families import rectangle
        >>> solver = SoapFilmSolver()
        >>> solved = solver.solve(rectangle(1.0))
        >>> solver.last_outcome is not None
        True
    """

    def __init__(self, config: Optional[SolveConfig] = None) -> None:
        self.config = SolveConfig() if config is None else config
        self.last_outcome: Optional[SolveOutcome] = None

    def run(self, terminals: Sequence[WeightedVertex]) -> SolveOutcome:
        outcome = solve(terminals, self.config)
        self.last_outcome = outcome
        return outcome

    def solve(self, terminals: Sequence[WeightedVertex]) -> SolvedTree:
        outcome = self.run(terminals)
        return SolvedTree(
            tree=outcome.tree,
            metrics=outcome.report.final_metrics,
            converged=outcome.report.converged,
        )


class ExhaustiveSolver:
    """Exhaustive topology search; only for up to seven terminals."""

    def __init__(self) -> None:
        self.last_result: Optional[OracleResult] = None

    def run(self, terminals: Sequence[WeightedVertex]) -> OracleResult:
        result = oracle_wsmt(terminals)
        self.last_result = result
        logger.debug(
            "Exhaustive optimum %.9f over %d topologies",
            result.best_weighted_length,
            result.topologies_examined,
        )
        return result

    def solve(self, terminals: Sequence[WeightedVertex]) -> SolvedTree:
        result = self.run(terminals)
        return SolvedTree(
            tree=result.best_tree,
            metrics=TreeMetrics(result.best_weighted_length, result.best_euclidean_length),
            converged=result.converged,
        )
