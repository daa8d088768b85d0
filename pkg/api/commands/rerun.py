import click
from loguru import logger

from api.commands.options import add_options, dataset_options, existing_file, output_options
from api.dependencies import emit, load_events, run_config, write_output
from core.exceptions.errors import ConfigError
from core.exceptions.handlers import handle_errors
from core.schemas import CrewScale
from services.ingest import parse_work_log, read_text
from services.processes import sample_curves
from services.rerun import apply_scenario, parse_scenario, render_rerun_table, rerun_report


@click.command("rerun")
@add_options(dataset_options)
@click.option("--scenario", "scenario_specs", multiple=True, required=True,
              help="speedup:<s> | crewscale:<a>[:exact|paper] | shift:<delta_h>[:chrono|largest]; repeatable.")
@click.option("--work", type=existing_file, default=None, help="Repair work CSV (id,repair_work) for shift scenarios.")
@click.option("--literal-sign", is_flag=True, help="Subtract the hourly recurrence increment instead of adding it.")
@click.option("--plot", is_flag=True, help="Also write plot-data CSV with R and R' per result under --out.")
@add_options(output_options)
@handle_errors
def rerun_command(scenario_specs, work, literal_sign, plot, **options):
    """Rerun history: compare each event with its counterfactual restoration."""
    scenarios = [parse_scenario(spec) for spec in scenario_specs]
    if literal_sign:
        scenarios = [s.model_copy(update={"literal_sign": True}) if isinstance(s, CrewScale) else s for s in scenarios]
    cfg = run_config(scenarios=tuple(scenarios), work=work, **options)
    if plot and cfg.out_dir is None:
        raise ConfigError("--plot needs --out")

    dataset, event_set = load_events(cfg)
    work_map = parse_work_log(read_text(cfg.work)) if cfg.work else None
    results = [apply_scenario(e, dataset.crew, scenario, work_map, cfg.customers_served) for scenario in cfg.scenarios for e in event_set.events]
    if not results:
        emit(cfg, "rerun", {"results": [], "report": None})
        return

    report = rerun_report(results)
    emit(
        cfg,
        "rerun",
        {"results": [res.model_dump(mode="json") for res in results], "report": report.model_dump(mode="json")},
        render_rerun_table(report),
    )

    if plot:
        events = {e.ordinal: e for e in event_set.events}
        for res in results:
            frame = sample_curves(events[res.ordinal], dataset.crew, r_prime=res.r_prime)
            write_output(cfg, f"rerun_event{res.ordinal}_{res.scenario.replace(':', '_')}.csv", frame.to_csv(index=False, lineterminator="\n"))
        logger.info("Wrote plot data for {} result(s)", len(results))
