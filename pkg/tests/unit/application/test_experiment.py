"""Tests for the randomised experiments."""

from collections.abc import Sequence

import pytest

from soapfilm.application.experiment import (
    assumption2_experiment,
    forbidden_pattern,
    sandwich_sweep,
)
from soapfilm.application.protocols import SolvedTree
from soapfilm.application.solvers import SoapFilmSolver
from soapfilm.domain.families import rectangle, triangle_corners
from soapfilm.domain.geometry import WeightedVertex
from soapfilm.domain.tree import PlaneTree, crossing_pairs, tree_metrics
from soapfilm.domain.wmst import weighted_mst
from soapfilm.infrastructure.generator import generate_random_instance
from soapfilm.infrastructure.instance_io import load_template


def _template_tree(edges: list[tuple[int, int]]) -> tuple[PlaneTree, dict[int, str]]:
    template = load_template()
    vertices = [WeightedVertex(i, p, 1.0) for i, p in enumerate(template.positions)]
    return PlaneTree(vertices, edges), dict(enumerate(template.groups))


class _WmstSolver:
    """Returns the plain WMST and counts its calls."""

    def __init__(self) -> None:
        self.calls = 0

    def solve(self, terminals: Sequence[WeightedVertex]) -> SolvedTree:
        self.calls += 1
        tree = weighted_mst(terminals)
        return SolvedTree(tree, tree_metrics(tree), True)


@pytest.mark.unit
class TestForbiddenPattern:
    """Tests for forbidden_pattern."""

    def test_crossing_bridges_detected(self) -> None:
        """Two crossing edges between the triangles should form the pattern."""
        # Given: big 0 to small 5 and big 1 to small 4, crossing at y = 50
        tree, groups = _template_tree([(0, 5), (1, 4)])

        # When/Then: the pattern is reported
        assert forbidden_pattern(tree, groups)

    def test_crossing_without_bridge_ignored(self) -> None:
        """A crossing involving the free vertex should not count."""
        # Given: big 0 to free 6 crosses big 1 to small 3
        tree, groups = _template_tree([(0, 6), (1, 3)])

        # Then: the edges cross but only one of them is a bridge
        assert len(crossing_pairs(tree)) == 1
        assert not forbidden_pattern(tree, groups)

    def test_plane_tree_has_no_pattern(self) -> None:
        """A tree without crossings should never show the pattern."""
        tree, groups = _template_tree([(0, 1), (1, 2), (2, 3), (3, 4), (3, 5), (1, 6)])

        assert not forbidden_pattern(tree, groups)


@pytest.mark.unit
class TestAssumption2Experiment:
    """Tests for assumption2_experiment."""

    def test_runs_requested_trials(self) -> None:
        """Each trial should record weights within the range."""
        # Given: the bundled template
        template = load_template()

        # When: running five WMST-only trials
        stats = assumption2_experiment(
            template.positions, template.groups, 5, seed=11, run_heuristic=False
        )

        # Then: five trials with integer weights from 1 to 9
        assert stats.trial_count == 5
        for trial in stats.trials:
            assert len(trial.weights) == 7
            assert all(1 <= w <= 9 for w in trial.weights)
            assert trial.heuristic_crossings is None
        assert stats.pattern_occurrences <= stats.wmst_crossings

    def test_same_seed_same_weights(self) -> None:
        """A fixed seed should reproduce the weight draws."""
        template = load_template()

        first = assumption2_experiment(
            template.positions, template.groups, 4, seed=3, run_heuristic=False
        )
        second = assumption2_experiment(
            template.positions, template.groups, 4, seed=3, run_heuristic=False
        )

        assert first.to_dict() == second.to_dict()

    def test_heuristic_outcome_recorded(self) -> None:
        """With the heuristic enabled every trial should be solved or counted infeasible."""
        template = load_template()

        stats = assumption2_experiment(template.positions, template.groups, 2, seed=5)

        solved = sum(1 for t in stats.trials if t.heuristic_crossings is not None)
        assert solved + stats.infeasible == 2
        assert stats.heuristic_violations <= solved

    def test_to_dict_keys(self) -> None:
        """to_dict should carry the counters and the drawn weights."""
        template = load_template()

        stats = assumption2_experiment(
            template.positions, template.groups, 1, seed=0, run_heuristic=False
        )

        assert set(stats.to_dict()) == {
            "trials",
            "wmst_crossings",
            "pattern_occurrences",
            "heuristic_violations",
            "infeasible",
            "weights",
        }

    @pytest.mark.parametrize(
        ("trials", "weight_range", "match"),
        [(0, (1, 9), "trial"), (1, (0, 9), "weight range"), (1, (5, 2), "weight range")],
    )
    def test_invalid_arguments(
        self, trials: int, weight_range: tuple[int, int], match: str
    ) -> None:
        """Bad trial counts and weight ranges should raise ValueError."""
        template = load_template()

        with pytest.raises(ValueError, match=match):
            assumption2_experiment(
                template.positions, template.groups, trials, 0, weight_range=weight_range
            )

    def test_group_length_mismatch(self) -> None:
        """Positions and group labels must pair up."""
        template = load_template()

        with pytest.raises(ValueError, match="group labels"):
            assumption2_experiment(template.positions, template.groups[:3], 1, 0)

    def test_custom_solver_is_used(self) -> None:
        """A supplied solver should be called once per trial."""
        # Given: a solver that answers with the plain WMST
        template = load_template()
        solver = _WmstSolver()

        # When: running three trials with it
        stats = assumption2_experiment(template.positions, template.groups, 3, 8, solver=solver)

        # Then: each trial's output crossings are the WMST's own
        assert solver.calls == 3
        for trial in stats.trials:
            assert trial.heuristic_crossings == len(crossing_pairs(trial.wmst))

    @pytest.mark.slow
    def test_thousand_trials_stay_plane(self) -> None:
        """A thousand trials should show no forbidden pattern and no crossing output."""
        # Given: the bundled template
        template = load_template()

        # When: running the full experiment
        stats = assumption2_experiment(template.positions, template.groups, 1000, seed=0)

        # Then: neither the WMSTs nor the heuristic outputs break planarity
        assert stats.trial_count == 1000
        assert stats.pattern_occurrences == 0
        assert stats.heuristic_violations == 0


@pytest.mark.unit
class TestSandwichSweep:
    """Tests for sandwich_sweep."""

    def test_reference_instances(self) -> None:
        """Optimum, heuristic and plane WMST should be ordered on the reference shapes."""
        # When: sweeping the triangle, a flat rectangle and the weighted square
        stats = sandwich_sweep([triangle_corners(), rectangle(1.0), rectangle(2.0, 7.0)])

        # Then: the ordering holds everywhere
        assert len(stats.records) == 3
        assert stats.lower_violations == 0
        assert stats.upper_violations == 0
        assert stats.mean_gap >= 1.0 - 1e-6

    def test_unit_weight_postconditions(self) -> None:
        """Unit-weight outputs should have degree-3 Steiner points with wide angles."""
        stats = sandwich_sweep([triangle_corners(), rectangle(1.0)])

        assert stats.postcondition_violations == 0

    def test_empty_sweep(self) -> None:
        """No instances should give empty statistics."""
        stats = sandwich_sweep([])

        assert stats.records == []
        assert stats.mean_gap == 1.0

    def test_custom_reference_solver(self) -> None:
        """The heuristic measured against itself should give a gap of exactly one."""
        # When: using the soap-film solver as the reference too
        instances = [triangle_corners(), rectangle(2.0, 7.0)]
        stats = sandwich_sweep(instances, reference=SoapFilmSolver())

        # Then: every record's optimum equals its heuristic length
        assert stats.lower_violations == 0
        for record in stats.records:
            assert record.oracle == pytest.approx(record.heuristic)
        assert stats.mean_gap == pytest.approx(1.0)

    @pytest.mark.slow
    def test_random_instances(self) -> None:
        """A hundred seeded instances of four to seven terminals should respect the ordering."""
        # Given: 25 seeds for each size
        instances = [
            generate_random_instance(n, (1, 9), seed=seed)
            for n in range(4, 8)
            for seed in range(25)
        ]

        # When: sweeping
        stats = sandwich_sweep(instances)

        # Then: no ordering or postcondition violation
        assert len(stats.records) == 100
        assert stats.lower_violations == 0
        assert stats.upper_violations == 0
        assert stats.postcondition_violations == 0
