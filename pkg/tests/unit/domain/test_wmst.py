"""Tests for weighted minimum spanning trees."""

import math
from unittest.mock import patch

import networkx as nx
import numpy as np
import pytest

from soapfilm.domain.errors import DuplicateTerminalError, InfeasiblePlaneTreeError
from soapfilm.domain.families import hexagon_orbit, hexagon_orbit_mst_length, rectangle
from soapfilm.domain.geometry import Point, WeightedVertex
from soapfilm.domain.tree import crossing_pairs, tree_metrics
from soapfilm.domain.wmst import cost_matrix, plane_weighted_mst, weighted_mst


def _crossing_instance() -> list[WeightedVertex]:
    """Two heavy points close together and two light points far apart on a crossing line."""
    return [
        WeightedVertex(0, Point(0.0, 1.0), 100.0),
        WeightedVertex(1, Point(0.0, -1.0), 100.0),
        WeightedVertex(2, Point(-5.0, 0.0), 1.0),
        WeightedVertex(3, Point(5.0, 0.0), 1.0),
    ]


@pytest.mark.unit
class TestCostMatrix:
    """Tests for cost_matrix."""

    def test_symmetric_with_zero_diagonal(self) -> None:
        """cost_matrix should be symmetric with zeros on the diagonal."""
        costs = cost_matrix(rectangle(1.5, 3.0))

        assert (costs == costs.T).all()
        assert (costs.diagonal() == 0).all()

    def test_mean_weight_times_distance(self) -> None:
        """Entries should equal the mean weight times the distance."""
        # Given: A=(0, 2) with weight 7 and B=(2, 2) with weight 1
        costs = cost_matrix(rectangle(2.0, 7.0))

        # Then: |AB| = 2 and the mean weight is 4
        assert costs[0, 1] == pytest.approx(8.0)


@pytest.mark.unit
class TestWeightedMst:
    """Tests for weighted_mst."""

    @pytest.mark.parametrize("s", [1 / 8, 0.2, 2 - math.sqrt(3.0), 1 / 3])
    def test_hexagon_orbit_length(self, s: float) -> None:
        """Unit weights on the hexagon orbit should give an MST of length 4 - 2s."""
        # When: building the MST of the orbit
        tree = weighted_mst(hexagon_orbit(s))

        # Then: its length matches the closed form
        assert tree_metrics(tree).euclidean_length == pytest.approx(
            hexagon_orbit_mst_length(s), rel=1e-9
        )

    def test_rectangle_drops_heavy_side_when_tall(self) -> None:
        """For ell = 1.2 the heavy side AD should not be used."""
        tree = weighted_mst(rectangle(1.2, 7.0))

        assert tree.edges() == [(0, 1), (1, 2), (2, 3)]

    def test_rectangle_keeps_heavy_side_when_short(self) -> None:
        """For ell = 1.1 the heavy side AD should be used."""
        tree = weighted_mst(rectangle(1.1, 7.0))

        assert (0, 3) in tree.edges()
        assert tree_metrics(tree).weighted_length == pytest.approx(16.8)

    def test_rectangle_switch_point(self) -> None:
        """At ell = 8/7 both structures cost 16 + 8/7."""
        tree = weighted_mst(rectangle(8.0 / 7.0, 7.0))

        assert tree_metrics(tree).weighted_length == pytest.approx(16.0 + 8.0 / 7.0, rel=1e-9)

    def test_ties_follow_insertion_order(self) -> None:
        """Equally cheap candidates should go to the earliest inserted vertex."""
        # Given: the unit square with unit weights, inserted in a custom order
        square = rectangle(2.0)

        # When: building with vertex 3 first, then 2, 1, 0
        tree = weighted_mst(square, insertion_order=[3, 2, 1, 0])

        # Then: D reaches C before A, then C reaches B
        assert tree.edges() == [(0, 3), (1, 2), (2, 3)]

    def test_may_cross(self) -> None:
        """The unrestricted WMST may contain crossing edges."""
        tree = weighted_mst(_crossing_instance())

        assert tree.edges() == [(0, 1), (0, 2), (2, 3)]
        assert len(crossing_pairs(tree)) == 1

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_agrees_with_kruskal(self, seed: int) -> None:
        """On generic random input the result should match Kruskal on the cost matrix."""
        # Given: a random weighted instance and Kruskal's tree over the same costs
        from soapfilm.infrastructure.generator import generate_random_instance

        terminals = generate_random_instance(15, (1, 9), seed=seed)
        reference = nx.minimum_spanning_tree(nx.from_numpy_array(cost_matrix(terminals)))

        # When: building the WMST
        tree = weighted_mst(terminals)

        # Then: both pick the same edges
        assert tree.edges() == sorted(tuple(sorted(e)) for e in reference.edges())
        assert tree_metrics(tree).weighted_length == pytest.approx(
            reference.size(weight="weight"), rel=1e-9
        )

    def test_single_terminal(self) -> None:
        """A single terminal should give a tree without edges."""
        tree = weighted_mst([WeightedVertex(0, Point(1.0, 1.0), 2.0)])

        assert tree.edges() == []
        assert tree.is_spanning_tree()

    def test_duplicate_position_raises(self) -> None:
        """Two terminals at one position should raise DuplicateTerminalError."""
        terminals = [
            WeightedVertex(0, Point(1.0, 1.0), 1.0),
            WeightedVertex(1, Point(1.0, 1.0), 2.0),
        ]

        with pytest.raises(DuplicateTerminalError) as exc_info:
            weighted_mst(terminals)

        assert exc_info.value.line == 2

    def test_empty_input_raises(self) -> None:
        """No terminals should raise ValueError."""
        with pytest.raises(ValueError, match="At least one terminal"):
            weighted_mst([])

    def test_bad_insertion_order_raises(self) -> None:
        """insertion_order must be a permutation of the ids."""
        with pytest.raises(ValueError, match="permutation"):
            weighted_mst(rectangle(1.0), insertion_order=[0, 1, 2])


@pytest.mark.unit
class TestPlaneWeightedMst:
    """Tests for plane_weighted_mst."""

    def test_avoids_crossing(self) -> None:
        """The plane variant should take the next cheapest edge instead of a crossing one."""
        # Given: an instance whose WMST crosses
        terminals = _crossing_instance()

        # When: building the plane variant
        tree = plane_weighted_mst(terminals)

        # Then: it is crossing-free, spanning and costlier than the WMST
        assert tree.edges() == [(0, 1), (0, 2), (0, 3)]
        assert crossing_pairs(tree) == []
        assert tree.is_spanning_tree()
        plane = tree_metrics(tree).weighted_length
        assert plane > tree_metrics(weighted_mst(terminals)).weighted_length

    def test_equals_wmst_when_wmst_is_plane(self) -> None:
        """Without crossings in the way both builders should agree."""
        terminals = rectangle(1.2, 7.0)

        assert plane_weighted_mst(terminals).edges() == weighted_mst(terminals).edges()

    def test_infeasible_raises(self) -> None:
        """If every candidate is blocked InfeasiblePlaneTreeError should be raised."""
        # Given: a crossing test that blocks everything
        with patch("soapfilm.domain.wmst.segments_cross", return_value=True):
            # When/Then: the third terminal cannot be attached
            with pytest.raises(InfeasiblePlaneTreeError):
                plane_weighted_mst(rectangle(1.0)[:3])

    def test_equal_cost_alternative_is_not_a_fallback(
        self, caplog: pytest.LogCaptureFixture
    ) -> None:
        """Only a strictly costlier replacement for a blocked pair should be logged."""
        # Given: edge 0-1 blocks the 109-cost pair 2-3, pair 0-4 costs 109 too,
        # and terminal 3 must later take a 112.9-cost edge from 0
        terminals = [
            WeightedVertex(0, Point(0.0, 0.0), 1.0),
            WeightedVertex(1, Point(4.0, 0.0), 1.0),
            WeightedVertex(2, Point(2.0, -1.0), 9.0),
            WeightedVertex(3, Point(2.0, 1.0), 100.0),
            WeightedVertex(4, Point(0.0, -109.0), 1.0),
        ]

        # When: building the plane variant with debug logging
        with caplog.at_level("DEBUG", logger="soapfilm.domain.wmst"):
            tree = plane_weighted_mst(terminals)

        # Then: every terminal hangs off 0 and one fallback is reported
        assert tree.edges() == [(0, 1), (0, 2), (0, 3), (0, 4)]
        assert "took 1 non-cheapest" in caplog.text

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_terminals_give_plane_spanning_tree(self, seed: int) -> None:
        """Thirty random weighted terminals should get a crossing-free spanning tree."""
        # Given: 30 terminals in a 100 x 100 box with weights 1..9
        rng = np.random.default_rng(seed)
        points = rng.uniform(0.0, 100.0, size=(30, 2))
        weights = rng.integers(1, 10, size=30)
        terminals = [
            WeightedVertex(i, Point(float(x), float(y)), float(w))
            for i, ((x, y), w) in enumerate(zip(points, weights))
        ]

        # When: building the plane variant
        tree = plane_weighted_mst(terminals)

        # Then: it spans all 30 terminals without crossings
        assert tree.is_spanning_tree()
        assert len(tree.terminal_ids()) == 30
        assert crossing_pairs(tree) == []
        plane = tree_metrics(tree).weighted_length
        assert plane >= tree_metrics(weighted_mst(terminals)).weighted_length - 1e-9
