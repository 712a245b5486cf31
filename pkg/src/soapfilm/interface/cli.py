"""Command-line interface for weighted Steiner trees.

This module provides the CLI entry point: solving instance files with the
soap-film heuristic, building weighted MSTs, running the exhaustive search
on small instances, generating random instances and running the planarity
experiment on the seven-vertex template.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable

from soapfilm import __version__
from soapfilm.application.experiment import assumption2_experiment
from soapfilm.application.oracle import MAX_ORACLE_TERMINALS
from soapfilm.application.protocols import SteinerSolverProtocol
from soapfilm.application.solvers import ExhaustiveSolver, SoapFilmSolver
from soapfilm.domain.config import MergePolicy, Ordering, RelaxObjective
from soapfilm.domain.config_loader import load_solve_config
from soapfilm.domain.errors import CapExceededError, InfeasiblePlaneTreeError, InstanceError
from soapfilm.domain.wmst import plane_weighted_mst, weighted_mst
from soapfilm.infrastructure.generator import generate_random_instance
from soapfilm.infrastructure.instance_io import load_template, read_instance, write_instance
from soapfilm.infrastructure.report_writer import (
    oracle_report,
    solve_report,
    tree_report,
    write_report,
)
from soapfilm.infrastructure.svg_renderer import Phase, RenderSpec, render_svg, write_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NOT_CONVERGED = 3
EXIT_INTERRUPTED = 130

DEFAULT_PHASES = "plane_wmst,final"


def _phases(raw: str) -> tuple[Phase, ...]:
    try:
        return tuple(Phase(part.strip()) for part in raw.split(",") if part.strip())
    except ValueError as e:
        choices = ", ".join(p.value for p in Phase)
        msg = f"invalid phase list {raw!r} (choose from {choices})"
        raise argparse.ArgumentTypeError(msg) from e


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser for the CLI.

    Returns:
        Configured ArgumentParser instance.
    """
    parser = argparse.ArgumentParser(
        prog="soapfilm",
        description="Weighted Steiner trees grown from the plane WMST by a soap-film heuristic.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  soapfilm solve points.txt --svg tree.svg      # Solve and draw
  soapfilm solve points.txt --ordering acutest  # Visit acute vertices first
  soapfilm oracle points.txt --json best.json   # Exact optimum, up to 7 terminals
  soapfilm gen --n 30 --seed 42 --out points.txt
        """,
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Enable verbose output",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    solve_cmd = commands.add_parser("solve", help="Run the soap-film heuristic")
    solve_cmd.add_argument("instance", type=Path, help="Instance file (x y w per line)")
    solve_cmd.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="Angle tolerance as a fraction of 120 degrees (default: 0.022)",
    )
    solve_cmd.add_argument(
        "--ordering",
        choices=[o.value for o in Ordering],
        default=None,
        help="Vertex processing order (default: input)",
    )
    solve_cmd.add_argument(
        "--merge-policy",
        choices=[p.value for p in MergePolicy],
        default=None,
        help="Weight of a terminal after a Steiner point merges into it (default: keep)",
    )
    solve_cmd.add_argument(
        "--relax-objective",
        choices=[r.value for r in RelaxObjective],
        default=None,
        help="Length minimised when relaxing (default: surface-tension)",
    )
    solve_cmd.add_argument(
        "--tilt",
        type=float,
        default=None,
        help="Tilt in degrees for stagnating Steiner edges, 0 disables (default: 1.3)",
    )
    solve_cmd.add_argument(
        "--phases",
        type=_phases,
        default=_phases(DEFAULT_PHASES),
        help=f"Comma-separated SVG panels (default: {DEFAULT_PHASES})",
    )
    solve_cmd.add_argument("--svg", type=Path, default=None, help="Write an SVG drawing")
    solve_cmd.add_argument("--json", type=Path, default=None, help="Write a JSON report")

    wmst_cmd = commands.add_parser("wmst", help="Build the weighted MST")
    wmst_cmd.add_argument("instance", type=Path, help="Instance file (x y w per line)")
    wmst_cmd.add_argument(
        "--plane", action="store_true", help="Build the crossing-free variant"
    )
    wmst_cmd.add_argument("--svg", type=Path, default=None, help="Write an SVG drawing")
    wmst_cmd.add_argument("--json", type=Path, default=None, help="Write a JSON report")

    oracle_cmd = commands.add_parser(
        "oracle", help=f"Exhaustive optimum (at most {MAX_ORACLE_TERMINALS} terminals)"
    )
    oracle_cmd.add_argument("instance", type=Path, help="Instance file (x y w per line)")
    oracle_cmd.add_argument("--svg", type=Path, default=None, help="Write an SVG drawing")
    oracle_cmd.add_argument("--json", type=Path, default=None, help="Write a JSON report")

    gen_cmd = commands.add_parser("gen", help="Generate a random instance")
    gen_cmd.add_argument("--n", type=int, required=True, help="Number of terminals")
    gen_cmd.add_argument("--wmin", type=int, default=1, help="Smallest weight (default: 1)")
    gen_cmd.add_argument("--wmax", type=int, default=9, help="Largest weight (default: 9)")
    gen_cmd.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    gen_cmd.add_argument("--out", type=Path, required=True, help="Output instance file")

    exp_cmd = commands.add_parser(
        "assumption2", help="Random weights on the seven-vertex template"
    )
    exp_cmd.add_argument("--trials", type=int, default=12, help="Number of trials (default: 12)")
    exp_cmd.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    exp_cmd.add_argument("--wmin", type=int, default=1, help="Smallest weight (default: 1)")
    exp_cmd.add_argument("--wmax", type=int, default=9, help="Largest weight (default: 9)")
    exp_cmd.add_argument(
        "--template",
        type=Path,
        default=None,
        help="Template file of 'x y group' lines (default: bundled template)",
    )
    exp_cmd.add_argument("--json", type=Path, default=None, help="Write a JSON summary")

    return parser


def _run_solve(args: argparse.Namespace) -> int:
    parsed = read_instance(args.instance)
    config = load_solve_config(
        angle_tolerance_fraction=args.tolerance,
        ordering=Ordering(args.ordering) if args.ordering else None,
        merge_policy=MergePolicy(args.merge_policy) if args.merge_policy else None,
        relax_objective=RelaxObjective(args.relax_objective) if args.relax_objective else None,
        tilt_degrees=args.tilt,
    )
    logger.info("Solving %s (%d terminals)", args.instance, len(parsed.terminals))
    solver = SoapFilmSolver(config)
    outcome = solver.run(parsed.terminals)
    report = outcome.report

    if args.svg:
        write_svg(args.svg, render_svg(outcome.trace, RenderSpec(phases=args.phases)))
    if args.json:
        write_report(args.json, solve_report(report, outcome.tree))

    print(
        f"Weighted length {report.final_metrics.weighted_length:.6f} "
        f"(plane WMST {report.plane_wmst_metrics.weighted_length:.6f}, "
        f"ratio {report.ratio_weighted:.4f}); "
        f"Euclidean ratio {report.ratio_euclidean:.4f}; "
        f"{report.steiner_count} Steiner points"
    )
    if not report.converged:
        logger.error("Heuristic did not converge; results were still written")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _run_wmst(args: argparse.Namespace) -> int:
    parsed = read_instance(args.instance)
    unrestricted = weighted_mst(parsed.terminals)
    tree = plane_weighted_mst(parsed.terminals) if args.plane else unrestricted
    data = tree_report(tree, unrestricted if args.plane else None)

    if args.svg:
        write_svg(args.svg, render_svg(tree))
    if args.json:
        write_report(args.json, data)
    label = "Plane WMST" if args.plane else "WMST"
    print(f"{label} weighted length {data['tree_weighted_length']:.6f}")
    return EXIT_OK


def _run_oracle(args: argparse.Namespace) -> int:
    parsed = read_instance(args.instance)
    result = ExhaustiveSolver().run(parsed.terminals)
    if args.svg:
        write_svg(args.svg, render_svg(result.best_tree))
    if args.json:
        write_report(args.json, oracle_report(result))
    print(
        f"Optimum weighted length {result.best_weighted_length:.9f} "
        f"over {result.topologies_examined} topologies"
    )
    if not result.converged:
        logger.error("Exhaustive search did not fully converge; results were still written")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _run_gen(args: argparse.Namespace) -> int:
    terminals = generate_random_instance(args.n, (args.wmin, args.wmax), args.seed)
    header = [f"n={args.n} weights={args.wmin}..{args.wmax} seed={args.seed}"]
    write_instance(args.out, terminals, header)
    print(f"Wrote {len(terminals)} terminals to {args.out}")
    return EXIT_OK


def _run_assumption2(args: argparse.Namespace) -> int:
    template = load_template(args.template)
    solver: SteinerSolverProtocol = SoapFilmSolver(load_solve_config())
    stats = assumption2_experiment(
        template.positions,
        template.groups,
        args.trials,
        args.seed,
        weight_range=(args.wmin, args.wmax),
        solver=solver,
    )
    if args.json:
        write_report(args.json, stats.to_dict())
    print(
        f"{stats.trial_count} trials: {stats.wmst_crossings} WMSTs with crossings, "
        f"{stats.pattern_occurrences} forbidden patterns, "
        f"{stats.heuristic_violations} non-plane heuristic outputs"
    )
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "solve": _run_solve,
    "wmst": _run_wmst,
    "oracle": _run_oracle,
    "gen": _run_gen,
    "assumption2": _run_assumption2,
}


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the CLI.

    Args:
        argv: Command-line arguments (default: sys.argv[1:]).

    Returns:
        Exit code: 0 on success, 1 for usage, input or file errors, 2 when
        the instance exceeds the search cap or no plane tree exists, 3 when
        a solver did not converge (outputs are still written), 130 when
        interrupted.
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    # Configure logging
    log_level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(
        level=log_level,
        format="%(levelname)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)

    except (CapExceededError, InfeasiblePlaneTreeError) as e:
        logger.error("%s", e)
        return EXIT_INFEASIBLE

    except FileNotFoundError as e:
        logger.error("%s", e)
        return EXIT_USAGE

    except InstanceError as e:
        logger.error("Invalid instance: %s", e)
        return EXIT_USAGE

    except ValueError as e:
        logger.error("%s", e)
        return EXIT_USAGE

    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
