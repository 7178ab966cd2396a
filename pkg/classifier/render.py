"""
Jinja2 text rendering of command reports (`--format text`).
"""

import math
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

TEMPLATE_DIR = Path(__file__).resolve().parent / 'templates' / 'classifier'

_env = None


def _fmt(value, digits=4):
    if value is None:
        return '-'
    if isinstance(value, float) and math.isnan(value):
        return 'nan'
    return f"{value:.{digits}g}"


def environment():
    global _env
    if _env is None:
        _env = Environment(
            loader=FileSystemLoader(TEMPLATE_DIR),
            undefined=StrictUndefined,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        _env.filters['fmt'] = _fmt
        _env.globals['zip'] = zip
    return _env


def render_template(template_name, **kwargs):
    """Render a template from classifier/templates/classifier with the given context."""
    return environment().get_template(template_name).render(**kwargs)


def render_report(report):
    """Text table for a report model, chosen by its `command` field."""
    return render_template(f"{report.command}.txt", report=report)
