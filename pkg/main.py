import sys

import click
from loguru import logger

from api.commands import events, metrics, plots, rerun, synth
from core.config.settings import get_settings


@click.group()
@click.option("--log-level", default=None, help="Override GRIDREPAIR_LOG_LEVEL for this run.")
def cli(log_level):
    """Storm resilience metrics and rerunning-history counterfactuals from outage and crew logs."""
    settings = get_settings()
    # Machine output goes to stdout; logs go to stderr
    logger.remove()
    logger.add(sys.stderr, level=(log_level or settings.LOG_LEVEL).upper(), diagnose=not settings.is_production)


# Include commands
cli.add_command(events.events_command)
cli.add_command(metrics.metrics_command)
cli.add_command(plots.plot_data_command)
cli.add_command(rerun.rerun_command)
cli.add_command(synth.synth_command)


if __name__ == "__main__":
    cli()
