"""Infrastructure layer: instance files, SVG rendering and JSON reports."""

from soapfilm.infrastructure.generator import generate_random_instance
from soapfilm.infrastructure.instance_io import (
    load_template,
    parse_instance,
    read_instance,
    write_instance,
)
from soapfilm.infrastructure.report_writer import write_report
from soapfilm.infrastructure.svg_renderer import Phase, RenderSpec, render_svg, write_svg

__all__ = [
    "Phase",
    "RenderSpec",
    "generate_random_instance",
    "load_template",
    "parse_instance",
    "read_instance",
    "render_svg",
    "write_instance",
    "write_report",
    "write_svg",
]
