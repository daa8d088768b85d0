from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from services.helpers.format_utils import delta_str, fmt_metric

# Get the templates directory relative to the project root
TEMPLATES_DIR = Path(__file__).resolve().parent.parent / "static" / "templates"

# Create a single environment for every text report
templates = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)
templates.filters["metric"] = fmt_metric
templates.filters["delta"] = delta_str
