from typing import Optional

import click

from api.commands.options import add_options, dataset_options
from api.dependencies import load_events, run_config, write_output
from core.exceptions.errors import ConfigError
from core.exceptions.handlers import handle_errors
from services.processes import sample_curves


@click.command("plot-data")
@add_options(dataset_options)
@click.option("--event", "ordinal", type=click.IntRange(min=1), default=None, help="Event ordinal (default: first event).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Directory for the CSV file.")
@handle_errors
def plot_data_command(ordinal: Optional[int], **options):
    """Sampled O, R and P curves of one event as CSV."""
    cfg = run_config(**options)
    dataset, event_set = load_events(cfg)
    if not event_set.events:
        return
    by_ordinal = {e.ordinal: e for e in event_set.events}
    event = event_set.events[0] if ordinal is None else by_ordinal.get(ordinal)
    if event is None:
        raise ConfigError(f"No event {ordinal}; events are {', '.join(str(o) for o in by_ordinal)}")

    text = sample_curves(event, dataset.crew).to_csv(index=False, lineterminator="\n")
    click.echo(text, nl=False)
    write_output(cfg, f"plot_event{event.ordinal}.csv", text)
