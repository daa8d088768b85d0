import functools

import click
from loguru import logger

from core.exceptions.errors import GridRepairError


def apology(message: str, code: int = 1):
    """Render message as an apology to the user and stop with `code`."""
    click.echo(f"error: {message}", err=True)
    raise click.exceptions.Exit(code)


def handle_errors(command):
    """Route every toolkit error raised by a command through `apology`."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except GridRepairError as e:
            logger.debug("{} failed: {}", command.__name__, type(e).__name__)
            apology(e.message, e.exit_code)
    return wrapper
