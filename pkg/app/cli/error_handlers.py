"""
Error handling for the command line
"""
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape

from app.core.exceptions import (
    CheckpointError,
    DataValidationError,
    GraphError,
    InsufficientDataError,
    InvalidArgumentError,
)
from app.core.logging import logger

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

VALIDATION_ERRORS = (
    InvalidArgumentError,
    GraphError,
    DataValidationError,
    InsufficientDataError,
    CheckpointError,
    FileNotFoundError,
)


def format_validation_error(exc: ValidationError) -> str:
    """One line per failing field: ``dotted.location: message``"""
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "config"
        lines.append(f"{location}: {error['msg']}")
    return "\n".join(lines)


def pydantic_validation_exception_handler(exc: ValidationError, console: Console) -> int:
    """
    Handle Pydantic validation errors
    """
    logger.error(f"Pydantic validation error: {exc}")
    console.print(f"[bold red]invalid configuration[/bold red]\n{escape(format_validation_error(exc))}", markup=True)
    return EXIT_VALIDATION


def validation_exception_handler(exc: Exception, console: Console) -> int:
    """
    Handle input validation errors
    """
    logger.error(f"Validation error: {exc}")
    console.print(f"[bold red]error:[/bold red] {escape(str(exc))}", markup=True, highlight=False)
    return EXIT_VALIDATION


def runtime_exception_handler(exc: Exception, console: Console) -> int:
    """
    Handle everything else
    """
    logger.exception(f"Runtime error: {exc}")
    console.print(f"[bold red]runtime error:[/bold red] {escape(str(exc))}", markup=True, highlight=False)
    return EXIT_RUNTIME


def handle_exception(exc: Exception, console: Console) -> int:
    """Report ``exc`` and return the process exit code"""
    if isinstance(exc, ValidationError):
        return pydantic_validation_exception_handler(exc, console)
    if isinstance(exc, VALIDATION_ERRORS):
        return validation_exception_handler(exc, console)
    return runtime_exception_handler(exc, console)
