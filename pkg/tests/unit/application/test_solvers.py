"""Tests for the solver adapters."""

import math

import pytest

from soapfilm.application.protocols import SolvedTree, SteinerSolverProtocol
from soapfilm.application.solvers import ExhaustiveSolver, SoapFilmSolver
from soapfilm.domain.config import SolveConfig
from soapfilm.domain.families import rectangle, triangle_corners
from soapfilm.domain.tree import tree_metrics

SQRT3 = math.sqrt(3.0)


@pytest.mark.unit
class TestSoapFilmSolver:
    """Tests for SoapFilmSolver."""

    def test_conforms_to_protocol(self) -> None:
        """SoapFilmSolver should be usable where the protocol is expected."""
        solver: SteinerSolverProtocol = SoapFilmSolver()

        assert isinstance(solver.solve(triangle_corners()), SolvedTree)

    def test_default_config(self) -> None:
        """Without a config the defaults should be used."""
        assert SoapFilmSolver().config == SolveConfig()

    def test_keeps_last_outcome(self) -> None:
        """The full outcome of the latest call should be kept."""
        # Given: a fresh solver
        solver = SoapFilmSolver()
        assert solver.last_outcome is None

        # When: solving
        solved = solver.solve(triangle_corners())

        # Then: the outcome holds the same tree and report
        assert solver.last_outcome is not None
        assert solver.last_outcome.tree is solved.tree
        assert solved.converged == solver.last_outcome.report.converged

    def test_run_returns_full_outcome(self) -> None:
        """run should return the outcome with its trace and remember it."""
        solver = SoapFilmSolver()

        outcome = solver.run(triangle_corners())

        assert solver.last_outcome is outcome
        assert outcome.trace.counts()["detach"] == 1
        assert outcome.report.event_counts == outcome.trace.counts()

    def test_metrics_match_tree(self) -> None:
        """Reported metrics should equal the metrics of the returned tree."""
        solved = SoapFilmSolver().solve(rectangle(2.0, 7.0))

        expected = tree_metrics(solved.tree)
        assert solved.metrics.weighted_length == pytest.approx(expected.weighted_length)
        assert solved.metrics.euclidean_length == pytest.approx(expected.euclidean_length)


@pytest.mark.unit
class TestExhaustiveSolver:
    """Tests for ExhaustiveSolver."""

    def test_conforms_to_protocol(self) -> None:
        """ExhaustiveSolver should be usable where the protocol is expected."""
        solver: SteinerSolverProtocol = ExhaustiveSolver()

        solved = solver.solve(triangle_corners())

        assert solved.metrics.weighted_length == pytest.approx(2 * SQRT3, abs=1e-8)
        assert solved.tree.is_spanning_tree()

    def test_keeps_last_result(self) -> None:
        """The oracle result of the latest call should be kept."""
        solver = ExhaustiveSolver()

        solver.solve(rectangle(1.0))

        assert solver.last_result is not None
        assert solver.last_result.topologies_examined == 19

    def test_never_worse_than_heuristic(self) -> None:
        """The exhaustive optimum should not exceed the heuristic length."""
        # Given: the weighted square
        terminals = rectangle(2.0, 7.0)

        # When: solving with both
        exact = ExhaustiveSolver().solve(terminals)
        heuristic = SoapFilmSolver().solve(terminals)

        # Then: the optimum is a lower bound up to numerical noise
        assert exact.metrics.weighted_length <= heuristic.metrics.weighted_length + 1e-6

    def test_run_returns_oracle_result(self) -> None:
        """run should return the full oracle result."""
        solver = ExhaustiveSolver()

        result = solver.run(triangle_corners())

        assert solver.last_result is result
        assert result.topologies_examined == 4
