"""Tests for the parametric instance families."""

import math

import pytest

from soapfilm.domain.families import (
    TRIANGLE_CENTRE,
    hexagon_orbit,
    rectangle,
    triangle_corners,
)
from soapfilm.domain.geometry import Point, euclid_dist


@pytest.mark.unit
class TestTriangleCorners:
    """Tests for triangle_corners."""

    def test_equilateral_side_two(self) -> None:
        """All sides should have length 2."""
        a, b, c = (v.pos for v in triangle_corners())

        for p, q in ((a, b), (b, c), (a, c)):
            assert euclid_dist(p, q) == pytest.approx(2.0)


@pytest.mark.unit
class TestHexagonOrbit:
    """Tests for hexagon_orbit."""

    def test_six_points_equidistant_from_centre(self) -> None:
        """The orbit should have six points on one circle about the centre."""
        # When: building the orbit for s = 0.2
        points = [v.pos for v in hexagon_orbit(0.2)]

        # Then: all six lie at the same distance from the centre
        radii = [euclid_dist(p, TRIANGLE_CENTRE) for p in points]
        assert len(points) == 6
        assert max(radii) - min(radii) < 1e-12

    def test_points_lie_two_s_from_corners(self) -> None:
        """Every orbit point should be 2s from its nearest corner."""
        s = 0.125
        corners = [v.pos for v in triangle_corners()]

        for vertex in hexagon_orbit(s):
            nearest = min(euclid_dist(vertex.pos, c) for c in corners)
            assert nearest == pytest.approx(2 * s)

    def test_seed_point_first(self) -> None:
        """The first orbit point should be (1 - 2s, 0)."""
        first = hexagon_orbit(0.25)[0].pos

        assert first.x == pytest.approx(0.5)
        assert first.y == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("s", [0.0, 0.5, -0.1])
    def test_parameter_range(self, s: float) -> None:
        """s outside (0, 1/2) should raise ValueError."""
        with pytest.raises(ValueError, match="Orbit parameter"):
            hexagon_orbit(s)


@pytest.mark.unit
class TestRectangle:
    """Tests for rectangle."""

    def test_corners_and_weights(self) -> None:
        """A and D should carry omega; ids should follow the letters."""
        vertices = rectangle(1.5, 7.0)

        assert [v.id for v in vertices] == [0, 1, 2, 3]
        assert [v.pos for v in vertices] == [
            Point(0.0, 1.5),
            Point(2.0, 1.5),
            Point(2.0, 0.0),
            Point(0.0, 0.0),
        ]
        assert [v.weight for v in vertices] == [7.0, 1.0, 1.0, 7.0]

    def test_height_must_be_positive(self) -> None:
        """A non-positive height should raise ValueError."""
        with pytest.raises(ValueError, match="height"):
            rectangle(0.0)

    def test_diagonal(self) -> None:
        """The diagonal AC should match Pythagoras."""
        a, _, c, _ = rectangle(1.0)

        assert euclid_dist(a.pos, c.pos) == pytest.approx(math.sqrt(5.0))
