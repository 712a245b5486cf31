"""JSON reports.

Reports are flat objects with snake_case keys. Configuration values are
echoed under ``config_`` and trace event counts under ``events_``. Keys
are sorted so equal runs produce byte-identical files.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Optional

from soapfilm.application.heuristic import SolveReport
from soapfilm.application.oracle import OracleResult
from soapfilm.domain.tree import PlaneTree, TreeMetrics, tree_metrics
from soapfilm.infrastructure.instance_io import atomic_write_text

__all__ = [
    "dumps_report",
    "oracle_report",
    "solve_report",
    "tree_report",
    "write_report",
]

logger = logging.getLogger(__name__)


def _metrics(prefix: str, metrics: TreeMetrics) -> dict[str, float]:
    return {
        f"{prefix}_weighted_length": metrics.weighted_length,
        f"{prefix}_euclidean_length": metrics.euclidean_length,
    }


def _tree_fields(tree: PlaneTree) -> dict[str, Any]:
    return {
        "tree_vertices": [
            [v.id, v.pos.x, v.pos.y, v.weight, v.kind.value]
            for v in sorted(tree.vertices, key=lambda v: v.id)
        ],
        "tree_edges": [list(edge) for edge in tree.edges()],
    }


def solve_report(report: SolveReport, tree: PlaneTree) -> dict[str, Any]:
    """Flatten a heuristic run into a JSON-ready mapping.

    Example:
        >>> from soapfilm.application.heuristic import solve
        >>> from soapfilm.domain.families import triangle_corners
        >>> outcome = solve(triangle_corners())
        >>> solve_report(outcome.report, outcome.tree)["steiner_count"]
        1
    """
    data: dict[str, Any] = {
        "terminal_count": report.terminal_count,
        "ratio_weighted": report.ratio_weighted,
        "ratio_euclidean": report.ratio_euclidean,
        "iterations": report.iterations,
        "converged": report.converged,
        "steiner_count": report.steiner_count,
        "min_steiner_angle": report.min_steiner_angle,
        "max_weighted_gradient": report.max_weighted_gradient,
        "merge_events": report.merge_events,
        "reverted_iterations": report.reverted_iterations,
        "selected_iteration": report.selected_iteration,
        "planarity_violations": len(report.planarity),
        "planarity": [[list(d.edge_a), list(d.edge_b)] for d in report.planarity],
        "steiner_ratio_reference": report.steiner_ratio_reference,
    }
    data.update(_metrics("wmst", report.wmst_metrics))
    data.update(_metrics("plane_wmst", report.plane_wmst_metrics))
    data.update(_metrics("final", report.final_metrics))
    data.update({f"config_{key}": value for key, value in report.config.to_dict().items()})
    data.update({f"events_{kind}": count for kind, count in report.event_counts.items()})
    data.update(_tree_fields(tree))
    return data


def tree_report(tree: PlaneTree, reference: Optional[PlaneTree] = None) -> dict[str, Any]:
    """Lengths of a spanning tree, with ratios against ``reference`` if given."""
    metrics = tree_metrics(tree)
    data: dict[str, Any] = {"terminal_count": len(tree.terminal_ids())}
    data.update(_metrics("tree", metrics))
    if reference is not None:
        base = tree_metrics(reference)
        data.update(_metrics("reference", base))
        data["ratio_weighted"] = (
            metrics.weighted_length / base.weighted_length if base.weighted_length else 1.0
        )
    data.update(_tree_fields(tree))
    return data


def oracle_report(result: OracleResult) -> dict[str, Any]:
    data: dict[str, Any] = {
        "terminal_count": result.best_topology.terminal_count,
        "best_weighted_length": result.best_weighted_length,
        "best_euclidean_length": result.best_euclidean_length,
        "topologies_examined": result.topologies_examined,
        "converged": result.converged,
        "best_topology_steiner_count": result.best_topology.steiner_count,
        "best_topology_edges": [list(edge) for edge in result.best_topology.edges],
    }
    data.update(_tree_fields(result.best_tree))
    return data


def dumps_report(data: Mapping[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(path: Path, data: Mapping[str, Any]) -> None:
    """Write a report as UTF-8 JSON in one atomic step."""
    atomic_write_text(path, dumps_report(data))
    logger.info("Wrote report to %s", path)
