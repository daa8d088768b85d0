import click

from api.commands.options import add_options, dataset_options, output_options
from api.dependencies import emit, load_events, run_config
from core.exceptions.handlers import handle_errors
from services.metrics import compute_metrics, render_metrics_table


@click.command("metrics")
@add_options(dataset_options)
@add_options(output_options)
@handle_errors
def metrics_command(**options):
    """Resilience metrics of every event.

    Crew-dependent metrics (crew hours, RE, REPAIR) are reported as "unavailable" without
    --crew.
    """
    cfg = run_config(**options)
    dataset, event_set = load_events(cfg)
    records = [compute_metrics(e, dataset.crew, cfg.customers_served) for e in event_set.events]
    emit(
        cfg,
        "metrics",
        {"events": [m.model_dump(mode="json") for m in records]},
        render_metrics_table(records),
    )
