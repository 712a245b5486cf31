"""Tests for the exhaustive weighted Steiner tree search."""

import math

import numpy as np
import pytest

from soapfilm.application.oracle import (
    Topology,
    enumerate_topologies,
    optimize_topology,
    oracle_wsmt,
    steiner_weights,
)
from soapfilm.domain.errors import CapExceededError, DuplicateTerminalError
from soapfilm.domain.families import (
    TRIANGLE_CENTRE,
    hexagon_orbit,
    hexagon_orbit_mst_length,
    rectangle,
    triangle_corners,
)
from soapfilm.domain.geometry import Point, WeightedVertex, angle_at, euclid_dist
from soapfilm.domain.tree import tree_metrics
from soapfilm.domain.wmst import weighted_mst

SQRT3 = math.sqrt(3.0)


def _unit_square() -> list[WeightedVertex]:
    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    return [WeightedVertex(i, Point(x, y), 1.0) for i, (x, y) in enumerate(corners)]


@pytest.mark.unit
class TestTopology:
    """Tests for Topology validation and enumeration."""

    @pytest.mark.parametrize(("n", "count"), [(1, 1), (2, 1), (3, 4), (4, 19), (5, 140)])
    def test_topology_counts(self, n: int, count: int) -> None:
        """n^(n-2) spanning trees plus (2n-5)!! full topologies should be listed."""
        assert len(enumerate_topologies(n)) == count

    def test_full_topologies_have_degree_three_steiner_points(self) -> None:
        """Every full topology on five terminals should have three degree-3 Steiner slots."""
        full = [t for t in enumerate_topologies(5) if t.is_full]

        assert len(full) == 15
        for topology in full:
            degrees = dict(topology.graph().degree)
            assert all(degrees[s] == 3 for s in range(5, 8))

    def test_topologies_are_distinct(self) -> None:
        """No topology should be listed twice."""
        topologies = enumerate_topologies(5)

        assert len({(t.steiner_count, t.edges) for t in topologies}) == len(topologies)

    def test_cap(self) -> None:
        """More than seven terminals should raise CapExceededError."""
        with pytest.raises(CapExceededError):
            enumerate_topologies(8)

    def test_no_terminals(self) -> None:
        """Zero terminals should raise ValueError."""
        with pytest.raises(ValueError, match="At least one terminal"):
            enumerate_topologies(0)

    def test_rejects_degree_two_steiner_slot(self) -> None:
        """A Steiner slot of degree two should be rejected."""
        with pytest.raises(ValueError, match="degree"):
            Topology(3, 1, ((0, 3), (1, 3), (1, 2)))

    def test_rejects_cycle(self) -> None:
        """Edges that close a cycle should be rejected."""
        with pytest.raises(ValueError, match="tree"):
            Topology(3, 0, ((0, 1), (1, 2), (0, 2)))


@pytest.mark.unit
class TestSteinerWeights:
    """Tests for the Steiner weight fixed point."""

    def test_smallest_terminal_weight_spreads(self) -> None:
        """The lightest terminal weight should reach every Steiner point."""
        # Given: heavy terminals on one Steiner point, light ones on the other
        topology = Topology(4, 2, ((0, 4), (1, 4), (2, 5), (3, 5), (4, 5)))

        # When: computing the fixed point
        weights = steiner_weights(topology, [7.0, 7.0, 1.0, 1.0])

        # Then: both Steiner points carry weight 1
        assert np.array_equal(weights, [1.0, 1.0])

    def test_each_weight_is_min_of_neighbours(self) -> None:
        """Every Steiner weight should equal the smallest adjacent weight."""
        topology = Topology(5, 3, ((0, 5), (1, 5), (5, 6), (2, 6), (6, 7), (3, 7), (4, 7)))
        terminal_weights = [3.0, 4.0, 5.0, 6.0, 2.5]

        weights = steiner_weights(topology, terminal_weights)

        everything = np.concatenate([terminal_weights, weights])
        for j, adjacent in enumerate(topology.steiner_neighbors()):
            assert weights[j] == everything[adjacent].min()


@pytest.mark.unit
class TestOptimizeTopology:
    """Tests for optimize_topology."""

    def test_equilateral_star(self) -> None:
        """The star on the reference triangle should reach 2 sqrt(3)."""
        star = Topology(3, 1, ((0, 3), (1, 3), (2, 3)))

        optimized = optimize_topology(star, triangle_corners())

        assert optimized.weighted_length == pytest.approx(2 * SQRT3, abs=1e-8)
        assert euclid_dist(optimized.tree.pos(3), TRIANGLE_CENTRE) < 1e-6

    def test_collinear_terminals_collapse(self) -> None:
        """On collinear terminals the optimum should equal the straight path."""
        # Given: three points on a line and the star topology
        terminals = [WeightedVertex(i, Point(float(i), 0.0), 1.0) for i in range(3)]
        star = Topology(3, 1, ((0, 3), (1, 3), (2, 3)))

        # When: optimizing
        optimized = optimize_topology(star, terminals)

        # Then: length 2, with the Steiner point on the segment
        assert optimized.weighted_length == pytest.approx(2.0, abs=1e-6)
        assert abs(optimized.tree.pos(3).y) < 1e-6

    def test_spanning_topology_is_evaluated_directly(self) -> None:
        """A topology without Steiner points should cost its edges."""
        path = Topology(3, 0, ((0, 1), (1, 2)))

        optimized = optimize_topology(path, triangle_corners())

        assert optimized.weighted_length == pytest.approx(4.0)
        assert optimized.converged

    def test_terminal_count_mismatch(self) -> None:
        """Slot count and terminal count must agree."""
        star = Topology(3, 1, ((0, 3), (1, 3), (2, 3)))

        with pytest.raises(ValueError, match="terminal slots"):
            optimize_topology(star, _unit_square())


@pytest.mark.unit
class TestOracleWsmt:
    """Tests for oracle_wsmt."""

    def test_equilateral_triangle(self) -> None:
        """The reference triangle should be joined at its centre with 120 degree angles."""
        # When: searching
        result = oracle_wsmt(triangle_corners())

        # Then: the full topology wins with length 2 sqrt(3)
        assert result.best_weighted_length == pytest.approx(2 * SQRT3, abs=1e-8)
        assert result.best_topology.is_full
        assert result.topologies_examined == 4
        tree = result.best_tree
        (sid,) = tree.steiner_ids()
        a, b, c = (tree.pos(n) for n in tree.neighbors(sid))
        assert angle_at(tree.pos(sid), a, b) == pytest.approx(120.0, abs=1e-4)
        assert angle_at(tree.pos(sid), b, c) == pytest.approx(120.0, abs=1e-4)

    def test_unit_square(self) -> None:
        """The unit square should reach 1 + sqrt(3) with two Steiner points."""
        result = oracle_wsmt(_unit_square())

        assert result.best_weighted_length == pytest.approx(1 + SQRT3, abs=1e-7)
        assert result.best_topology.steiner_count == 2
        assert result.topologies_examined == 19

    def test_hexagon_orbit_two_level_tree(self) -> None:
        """For s = 1/8 the optimum should be the two-level tree of length 2 sqrt(3)."""
        result = oracle_wsmt(hexagon_orbit(1 / 8))

        assert result.best_euclidean_length == pytest.approx(2 * SQRT3, abs=1e-7)
        assert result.best_euclidean_length < hexagon_orbit_mst_length(1 / 8)

    def test_hexagon_orbit_below_tie(self) -> None:
        """At s = 0.2 the two-level tree should beat the path of length 4 - 2s."""
        # Given: the orbit just below the tie at 2 - sqrt(3)
        terminals = hexagon_orbit(0.2)

        # When: searching
        result = oracle_wsmt(terminals)

        # Then: the optimum is 2 sqrt(3) and the MST is the longer path
        assert result.best_euclidean_length == pytest.approx(2 * SQRT3, abs=1e-7)
        mst_length = tree_metrics(weighted_mst(terminals)).euclidean_length
        assert mst_length == pytest.approx(hexagon_orbit_mst_length(0.2), abs=1e-9)
        assert result.best_euclidean_length < mst_length

    def test_hexagon_orbit_tie(self) -> None:
        """At s = 2 - sqrt(3) the path and the two-level tree should tie."""
        s = 2 - SQRT3

        result = oracle_wsmt(hexagon_orbit(s))

        assert result.best_euclidean_length == pytest.approx(2 * SQRT3, abs=1e-7)
        assert result.best_euclidean_length == pytest.approx(
            hexagon_orbit_mst_length(s), abs=1e-7
        )

    def test_weighted_rectangle(self) -> None:
        """Heavy corners A and D should pull both Steiner points onto themselves."""
        # Given: the 2 x 2 square with weight 7 on A and D
        terminals = rectangle(2.0, 7.0)

        # When: searching
        result = oracle_wsmt(terminals)

        # Then: two Steiner points sit on A and D and the length is 6
        assert result.best_weighted_length == pytest.approx(6.0, abs=1e-6)
        assert result.best_weighted_length < tree_metrics(weighted_mst(terminals)).weighted_length
        tree = result.best_tree
        positions = sorted(tree.pos(s).as_tuple() for s in tree.steiner_ids())
        assert positions[0] == pytest.approx((0.0, 0.0), abs=1e-6)
        assert positions[1] == pytest.approx((0.0, 2.0), abs=1e-6)
        for sid in tree.steiner_ids():
            adjacent = [tree.vertex(n).weight for n in tree.neighbors(sid)]
            assert tree.vertex(sid).weight == min(adjacent)

    def test_single_terminal(self) -> None:
        """One terminal should give a length of zero."""
        result = oracle_wsmt([WeightedVertex(0, Point(3.0, 4.0), 2.0)])

        assert result.best_weighted_length == 0.0
        assert result.topologies_examined == 1

    def test_two_terminals(self) -> None:
        """Two terminals should be joined directly."""
        terminals = [
            WeightedVertex(0, Point(0.0, 0.0), 1.0),
            WeightedVertex(1, Point(3.0, 4.0), 3.0),
        ]

        result = oracle_wsmt(terminals)

        assert result.best_weighted_length == pytest.approx(10.0)
        assert result.best_tree.edges() == [(0, 1)]

    def test_cap_exceeded(self) -> None:
        """Eight terminals should raise CapExceededError."""
        terminals = [WeightedVertex(i, Point(float(i), float(i * i)), 1.0) for i in range(8)]

        with pytest.raises(CapExceededError):
            oracle_wsmt(terminals)

    def test_duplicate_terminals(self) -> None:
        """Terminals sharing a position should raise DuplicateTerminalError."""
        terminals = [
            WeightedVertex(0, Point(0.0, 0.0), 1.0),
            WeightedVertex(1, Point(0.0, 0.0), 1.0),
        ]

        with pytest.raises(DuplicateTerminalError):
            oracle_wsmt(terminals)
