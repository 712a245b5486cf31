"""Seeded random instances."""

from __future__ import annotations

import logging

import numpy as np

from soapfilm.domain.geometry import Point, WeightedVertex

__all__ = ["BOX_SIZE", "generate_random_instance"]

logger = logging.getLogger(__name__)

BOX_SIZE = 100.0


def generate_random_instance(
    n: int, weight_range: tuple[int, int] = (1, 9), seed: int = 0
) -> list[WeightedVertex]:
    """Draw ``n`` terminals uniformly in ``[0, 100]^2`` with integer weights.

    Weights are uniform over ``weight_range``, both ends included. The
    same arguments always give the same terminals; a position that
    repeats an earlier one is redrawn.

    Raises:
        ValueError: If ``n`` is below one or the weight range is not a
            range of positive integers.

    Example:
        >>> first = generate_random_instance(5, (1, 9), seed=42)
        >>> first == generate_random_instance(5, (1, 9), seed=42)
        True
    """
    if n < 1:
        msg = f"At least one terminal is required, got {n}"
        raise ValueError(msg)
    low, high = weight_range
    if not 1 <= low <= high:
        msg = f"Weight range must satisfy 1 <= low <= high, got {weight_range}"
        raise ValueError(msg)

    rng = np.random.default_rng(seed)
    terminals: list[WeightedVertex] = []
    seen: set[tuple[float, float]] = set()
    while len(terminals) < n:
        x, y = (float(c) for c in rng.uniform(0.0, BOX_SIZE, size=2))
        weight = float(rng.integers(low, high + 1))
        if (x, y) in seen:
            continue
        seen.add((x, y))
        terminals.append(WeightedVertex(len(terminals), Point(x, y), weight))
    logger.debug("Generated %d terminals with seed %d", n, seed)
    return terminals
