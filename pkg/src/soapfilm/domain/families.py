"""Parametric instance families with known optima.

These are the configurations used to calibrate the solver: the
six-point orbit in an equilateral triangle, where the minimal spanning
path and the two-level Steiner tree trade places at ``s = 2 - sqrt(3)``,
and the weighted rectangle whose WMST switches at ``ell = 8 / 7``.
"""

from __future__ import annotations

import math

from soapfilm.domain.geometry import Point, WeightedVertex, rotate_about

__all__ = ["hexagon_orbit", "hexagon_orbit_mst_length", "rectangle", "triangle_corners"]

SQRT3 = math.sqrt(3.0)
TRIANGLE_CENTRE = Point(0.0, 1.0 / SQRT3)


def triangle_corners(weight: float = 1.0) -> list[WeightedVertex]:
    """Corners ``(-1, 0)``, ``(1, 0)``, ``(0, sqrt(3))`` of the reference triangle."""
    points = (Point(-1.0, 0.0), Point(1.0, 0.0), Point(0.0, SQRT3))
    return [WeightedVertex(i, p, weight) for i, p in enumerate(points)]


def hexagon_orbit(s: float, weight: float = 1.0) -> list[WeightedVertex]:
    """Return the orbit of ``(1 - 2s, 0)`` under the triangle's symmetry group.

    The group is generated by the reflection ``x -> -x`` and the
    120 degree rotation about ``(0, 1/sqrt(3))``. Each side of the triangle
    carries two orbit points, at distance ``2s`` from the nearest corners.

    Args:
        s: Orbit parameter in the open interval (0, 1/2).
        weight: Weight given to every point.

    Raises:
        ValueError: If ``s`` lies outside (0, 1/2).
    """
    if not 0.0 < s < 0.5:
        msg = f"Orbit parameter must lie in (0, 1/2), got {s}"
        raise ValueError(msg)
    seed = Point(1.0 - 2.0 * s, 0.0)
    mirror = Point(-seed.x, seed.y)
    points = []
    for turn in range(3):
        points.append(rotate_about(seed, TRIANGLE_CENTRE, 120.0 * turn))
        points.append(rotate_about(mirror, TRIANGLE_CENTRE, 120.0 * turn))
    return [WeightedVertex(i, p, weight) for i, p in enumerate(points)]


def hexagon_orbit_mst_length(s: float) -> float:
    """Euclidean MST length of :func:`hexagon_orbit` for ``s <= 1/3``."""
    return 4.0 - 2.0 * s


def rectangle(ell: float, omega: float = 1.0) -> list[WeightedVertex]:
    """Return the rectangle ``A=(0, ell), B=(2, ell), C=(2, 0), D=(0, 0)``.

    ``A`` and ``D`` carry weight ``omega``; ``B`` and ``C`` carry weight 1.
    Ids follow the letters: A=0, B=1, C=2, D=3.

    Example:
        >>> [v.weight for v in rectangle(2.0, 7.0)]
        [7.0, 1.0, 1.0, 7.0]
    """
    if ell <= 0:
        msg = f"Rectangle height must be positive, got {ell}"
        raise ValueError(msg)
    corners = (
        (Point(0.0, ell), float(omega)),
        (Point(2.0, ell), 1.0),
        (Point(2.0, 0.0), 1.0),
        (Point(0.0, 0.0), float(omega)),
    )
    return [WeightedVertex(i, p, w) for i, (p, w) in enumerate(corners)]
