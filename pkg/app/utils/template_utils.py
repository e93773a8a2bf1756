"""
Template rendering utilities
"""
from typing import Any, Dict

from jinja2 import Environment, PackageLoader, StrictUndefined

from app.core.logging import logger

_environment = Environment(
    loader=PackageLoader("app", "templates"),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    undefined=StrictUndefined,
)


def render_template(template_name: str, context: Dict[str, Any]) -> str:
    """
    Render a Jinja2 template shipped in ``app/templates``

    Args:
        template_name: Name of the template file
        context: Dictionary with template variables

    Returns:
        Rendered template as string
    """
    try:
        template = _environment.get_template(template_name)
        return template.render(**context)

    except Exception as e:
        logger.error(f"Error rendering template {template_name}: {str(e)}")
        raise
