"""Domain layer: geometry, trees, spanning trees and configuration."""

from soapfilm.domain.config import MergePolicy, Ordering, RelaxObjective, SolveConfig
from soapfilm.domain.geometry import Point, WeightedVertex
from soapfilm.domain.tree import PlaneTree, TreeMetrics, tree_metrics

__all__ = [
    "MergePolicy",
    "Ordering",
    "PlaneTree",
    "Point",
    "RelaxObjective",
    "SolveConfig",
    "TreeMetrics",
    "WeightedVertex",
    "tree_metrics",
]
