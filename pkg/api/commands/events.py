import click

from api.commands.options import add_options, dataset_options, output_options
from api.dependencies import emit, load_events, run_config
from core.exceptions.handlers import handle_errors
from services.events import event_summary


@click.command("events")
@add_options(dataset_options)
@add_options(output_options)
@handle_errors
def events_command(**options):
    """Group outages into storm events."""
    cfg = run_config(**options)
    _, event_set = load_events(cfg)
    emit(cfg, "events", {
        "events": [event_summary(e) for e in event_set.events],
        "dropped": [event_summary(e) for e in event_set.dropped],
    })
