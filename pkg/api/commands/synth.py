from pathlib import Path

import click

from api.commands.options import existing_file
from api.dependencies import write_output
from core.config.settings import get_settings
from core.exceptions.handlers import handle_errors
from core.schemas import RunConfig
from services.helpers.format_utils import dump_json
from services.ingest import write_crew_log, write_outage_log, write_work_log
from services.simlab import load_synth_config, synthesize


@click.command("synth")
@click.option("--config", "config_path", type=existing_file, required=True, help="Storm model, crew and policy (TOML or JSON).")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Overrides the seed in the config.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Directory for outages.csv, crew.csv and work.csv.")
@handle_errors
def synth_command(config_path, seed, out_dir):
    """Generate a synthetic storm and simulate its restoration."""
    synth = load_synth_config(config_path)
    if seed is not None:
        synth = synth.model_copy(update={"storm": synth.storm.model_copy(update={"seed": seed})})
    records, profile, work = synthesize(synth)

    cfg = RunConfig(out_dir=Path(out_dir))
    write_output(cfg, "outages.csv", write_outage_log(records))
    write_output(cfg, "crew.csv", write_crew_log(profile))
    write_output(cfg, "work.csv", write_work_log(work))
    click.echo(dump_json({
        "seed": synth.storm.seed if synth.storm.seed is not None else get_settings().SYNTH_SEED,
        "outages": len(records),
        "customers": sum(rec.customers for rec in records),
        "crew_hours": profile.total_crew_hours,
        "files": ["outages.csv", "crew.csv", "work.csv"],
    }, get_settings().SIG_DIGITS), nl=False)
