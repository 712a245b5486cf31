"""Application layer protocols.

This module defines the Protocol interface shared by the heuristic and the
exhaustive solver, so experiments and the CLI can compare them without
depending on either implementation.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import NamedTuple, Protocol

from soapfilm.domain.geometry import WeightedVertex
from soapfilm.domain.tree import PlaneTree, TreeMetrics

__all__ = ["SolvedTree", "SteinerSolverProtocol"]


class SolvedTree(NamedTuple):
    """A solver's tree with its lengths and convergence flag."""

    tree: PlaneTree
    metrics: TreeMetrics
    converged: bool


class SteinerSolverProtocol(Protocol):
    """Protocol for weighted Steiner tree solvers.

    Implementations take terminals and return a tree spanning them, with
    Steiner points added where they shorten the weighted length.

    Example:
        >>> from soapfilm.application.solvers import SoapFilmSolver
        >>> from soapfilm.domain.families import triangle_corners
        >>> solver: SteinerSolverProtocol = SoapFilmSolver()
        >>> solved = solver.solve(triangle_corners())
        >>> len(solved.tree.steiner_ids())
        1
    """

    def solve(self, terminals: Sequence[WeightedVertex]) -> SolvedTree:
        """Connect the terminals by a short weighted tree.

        Args:
            terminals: Terminals in insertion order. Positions must be
                pairwise distinct and weights positive.

        Returns:
            The tree, its weighted and Euclidean lengths and whether the
            solver converged.

        Raises:
            ValueError: If ``terminals`` is empty.
            DuplicateTerminalError: If two terminals share a position.
            CapExceededError: If the solver cannot handle this many
                terminals.

        Preconditions:
            - At least one terminal is given
            - Terminal ids are unique

        Postconditions:
            - The returned tree is a spanning tree containing every terminal
            - Every Steiner point has degree three
            - ``metrics`` equals ``tree_metrics(tree)``
        """
        ...
