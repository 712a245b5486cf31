"""SVG rendering of trees and pipeline phases.

Documents are built from string templates with every coordinate printed
to six decimal places, and elements are emitted in a fixed order (panel
frame, edges by id, vertices by id, labels), so equal inputs give
byte-identical output.

Colours: tree edges are black, edges removed by a slide or detach step
are cyan, and the edges that triggered the last such step are red. The
overlay panel draws the plane WMST in cyan under the final tree.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

from soapfilm.application.heuristic import EventKind, Trace
from soapfilm.domain.geometry import Point
from soapfilm.domain.tree import PlaneTree
from soapfilm.infrastructure.instance_io import atomic_write_text

__all__ = ["Phase", "RenderSpec", "render_svg", "write_svg"]

logger = logging.getLogger(__name__)

TREE_COLOR = "black"
REMOVED_COLOR = "cyan"
TRIGGER_COLOR = "red"
TERMINAL_FILL = "white"
STEINER_FILL = "black"
TERMINAL_RADIUS = 4.0
STEINER_RADIUS = 2.0
EDGE_WIDTH = 1.5
FONT_SIZE = 10.0


class Phase(str, Enum):
    """Pipeline phases that can be drawn as panels."""

    WMST = "wmst"
    PLANE_WMST = "plane_wmst"
    SLIDE = "slide"
    DETACH = "detach"
    FINAL = "final"
    OVERLAY = "overlay"


# Snapshot to fall back on when a phase never fired.
_FALLBACK = {
    Phase.SLIDE: ("slide", "plane_wmst"),
    Phase.DETACH: ("detach", "slide", "plane_wmst"),
    Phase.FINAL: ("final", "detach", "slide", "plane_wmst"),
}

_EVENT_OF_PHASE = {Phase.SLIDE: EventKind.SLIDE_INHERENT, Phase.DETACH: EventKind.DETACH}


@dataclass(frozen=True)
class RenderSpec:
    """Which phases to draw, side by side, and the size of each panel.

    Example:
        >>> RenderSpec(phases=(Phase.PLANE_WMST, Phase.FINAL)).phases[0].value
        'plane_wmst'
    """

    phases: tuple[Phase, ...] = (Phase.FINAL,)
    width: float = 400.0
    height: float = 400.0
    margin: float = 24.0
    show_weights: bool = True

    def __post_init__(self) -> None:
        if not self.phases:
            msg = "At least one phase must be selected"
            raise ValueError(msg)
        if self.width <= 2 * self.margin or self.height <= 2 * self.margin:
            msg = "Panel must be larger than twice its margin"
            raise ValueError(msg)


@dataclass(frozen=True)
class _Layer:
    tree: PlaneTree
    color: str
    draw_vertices: bool


@dataclass(frozen=True)
class _Panel:
    title: str
    layers: tuple[_Layer, ...]
    segments: tuple[tuple[tuple[float, float, float, float], str], ...] = ()


class _Frame:
    """Maps plane coordinates into a panel, y axis pointing up."""

    def __init__(self, points: Sequence[Point], spec: RenderSpec) -> None:
        xs = [p.x for p in points] or [0.0]
        ys = [p.y for p in points] or [0.0]
        self.min_x, self.max_y = min(xs), max(ys)
        span = max(max(xs) - self.min_x, self.max_y - min(ys))
        inner = min(spec.width, spec.height) - 2 * spec.margin
        self.scale = inner / span if span > 0 else 1.0
        self.pad_x = spec.margin + (inner - (max(xs) - self.min_x) * self.scale) / 2
        self.pad_y = spec.margin + (inner - (self.max_y - min(ys)) * self.scale) / 2

    def map(self, x: float, y: float, offset: float) -> tuple[float, float]:
        return (
            offset + self.pad_x + (x - self.min_x) * self.scale,
            self.pad_y + (self.max_y - y) * self.scale,
        )


def _f(value: float) -> str:
    return f"{value:.6f}"


def _line(a: tuple[float, float], b: tuple[float, float], color: str) -> str:
    return (
        f'<line x1="{_f(a[0])}" y1="{_f(a[1])}" x2="{_f(b[0])}" y2="{_f(b[1])}" '
        f'stroke="{color}" stroke-width="{_f(EDGE_WIDTH)}" stroke-linecap="round"/>'
    )


def _circle(c: tuple[float, float], radius: float, fill: str) -> str:
    return (
        f'<circle cx="{_f(c[0])}" cy="{_f(c[1])}" r="{_f(radius)}" '
        f'fill="{fill}" stroke="{TREE_COLOR}" stroke-width="1.000000"/>'
    )


def _text(x: float, y: float, content: str) -> str:
    return (
        f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" '
        f'font-size="{_f(FONT_SIZE)}">{content}</text>'
    )


def _weight_label(weight: float) -> str:
    return str(int(weight)) if weight.is_integer() else f"{weight:g}"


def _snapshot(trace: Trace, phase: Phase) -> Optional[PlaneTree]:
    for key in _FALLBACK.get(phase, (phase.value,)):
        if key in trace.snapshots:
            return trace.snapshots[key]
    return None


def _phase_segments(
    trace: Trace, phase: Phase
) -> tuple[tuple[tuple[float, float, float, float], str], ...]:
    kind = _EVENT_OF_PHASE.get(phase)
    if kind is None:
        return ()
    events = trace.of_kind(kind)
    segments = []
    for index, event in enumerate(events):
        color = TRIGGER_COLOR if index == len(events) - 1 else REMOVED_COLOR
        for x1, y1, x2, y2 in event.payload.get("removed_segments", ()):
            segments.append(((x1, y1, x2, y2), color))
    return tuple(segments)


def _panels(source: Union[PlaneTree, Trace], spec: RenderSpec) -> list[_Panel]:
    if isinstance(source, PlaneTree):
        return [_Panel("tree", (_Layer(source, TREE_COLOR, True),))]

    panels = []
    for phase in spec.phases:
        if phase is Phase.OVERLAY:
            base = _snapshot(source, Phase.PLANE_WMST)
            final = _snapshot(source, Phase.FINAL)
            layers = []
            if base is not None:
                layers.append(_Layer(base, REMOVED_COLOR, False))
            if final is not None:
                layers.append(_Layer(final, TREE_COLOR, True))
            panels.append(_Panel(phase.value, tuple(layers)))
            continue
        tree = _snapshot(source, phase)
        if tree is None:
            logger.warning("No snapshot for phase %s; panel left empty", phase.value)
            panels.append(_Panel(phase.value, ()))
            continue
        panels.append(
            _Panel(
                phase.value,
                (_Layer(tree, TREE_COLOR, True),),
                _phase_segments(source, phase),
            )
        )
    return panels


def _all_points(panels: Iterable[_Panel]) -> list[Point]:
    points = []
    for panel in panels:
        for layer in panel.layers:
            points.extend(v.pos for v in layer.tree.vertices)
        for (x1, y1, x2, y2), _ in panel.segments:
            points.extend((Point(x1, y1), Point(x2, y2)))
    return points


def _draw_panel(
    panel: _Panel, frame: _Frame, offset: float, spec: RenderSpec, titled: bool
) -> list[str]:
    out = [
        f'<rect x="{_f(offset)}" y="0.000000" width="{_f(spec.width)}" '
        f'height="{_f(spec.height)}" fill="white" stroke="lightgray"/>'
    ]
    if titled:
        out.append(_text(offset + 4.0, FONT_SIZE + 2.0, panel.title))
    for (x1, y1, x2, y2), color in panel.segments:
        out.append(_line(frame.map(x1, y1, offset), frame.map(x2, y2, offset), color))
    for layer in panel.layers:
        tree = layer.tree
        for u, v in tree.edges():
            pu, pv = tree.pos(u), tree.pos(v)
            a = frame.map(pu.x, pu.y, offset)
            b = frame.map(pv.x, pv.y, offset)
            out.append(_line(a, b, layer.color))
    for layer in panel.layers:
        if not layer.draw_vertices:
            continue
        tree = layer.tree
        for vertex in sorted(tree.vertices, key=lambda v: v.id):
            centre = frame.map(vertex.pos.x, vertex.pos.y, offset)
            if vertex.is_steiner:
                out.append(_circle(centre, STEINER_RADIUS, STEINER_FILL))
            else:
                out.append(_circle(centre, TERMINAL_RADIUS, TERMINAL_FILL))
        if spec.show_weights:
            for vertex in sorted(tree.vertices, key=lambda v: v.id):
                if vertex.is_steiner:
                    continue
                x, y = frame.map(vertex.pos.x, vertex.pos.y, offset)
                label = f"{vertex.id}:{_weight_label(vertex.weight)}"
                out.append(_text(x + TERMINAL_RADIUS + 1.0, y - TERMINAL_RADIUS - 1.0, label))
    return out


def render_svg(source: Union[PlaneTree, Trace], spec: Optional[RenderSpec] = None) -> str:
    """Render a tree, or the selected phases of a trace, as an SVG 1.1 document.

    A tree is drawn as a single panel. For a trace every selected phase
    becomes one panel, left to right; a phase that never fired shows the
    snapshot before it. Terminals are white disks labelled ``id:weight``,
    Steiner points small black disks.

    Example:
        >>> from soapfilm.domain.geometry import Point, WeightedVertex
        >>> tree = PlaneTree([WeightedVertex(0, Point(0, 0), 1.0)])
        >>> render_svg(tree).count("<circle")
        1
    """
    spec = RenderSpec() if spec is None else spec
    panels = _panels(source, spec)
    frame = _Frame(_all_points(panels), spec)
    total_width = spec.width * len(panels)
    body = []
    for index, panel in enumerate(panels):
        body.extend(
            _draw_panel(panel, frame, index * spec.width, spec, titled=isinstance(source, Trace))
        )
    header = (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_f(total_width)}" height="{_f(spec.height)}" '
        f'viewBox="0 0 {_f(total_width)} {_f(spec.height)}">'
    )
    return "\n".join([header, *body, "</svg>"]) + "\n"


def write_svg(path: Path, document: str) -> None:
    atomic_write_text(path, document)
    logger.info("Wrote SVG to %s", path)
