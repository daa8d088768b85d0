from pathlib import Path
from typing import Optional, Tuple

import click
from loguru import logger

from core.config.settings import get_settings
from core.exceptions.errors import InputFileError
from core.schemas import Dataset, EventSet, GroupingOptions, RunConfig
from services.events import extract_events
from services.helpers.format_utils import dump_json
from services.ingest import load_dataset, validate_dataset


def run_config(**options) -> RunConfig:
    """Merge command-line flags over settings; flags left unset fall back to settings."""
    settings = get_settings()
    slack = options.pop("slack_min", None)
    min_outages = options.pop("min_outages", None)
    options["grouping"] = GroupingOptions(
        slack=settings.SLACK_MIN if slack is None else slack,
        min_outages=settings.MIN_OUTAGES if min_outages is None else min_outages,
    )
    if options.get("out_dir") is None and settings.OUTPUT_DIR:
        options["out_dir"] = Path(settings.OUTPUT_DIR)
    if options.get("customers_served") is None:
        options["customers_served"] = settings.CUSTOMERS_SERVED
    options.setdefault("time_format", settings.TIME_FORMAT)
    return RunConfig(**{key: value for key, value in options.items() if value is not None})


def load_events(cfg: RunConfig) -> Tuple[Dataset, EventSet]:
    """Parse the logs named by `cfg` and group the outages into events."""
    dataset = load_dataset(
        cfg.outages,
        cfg.crew,
        time_format=cfg.time_format,
        exclude_ids=cfg.exclude_ids,
        exclude_activities=cfg.exclude_activities,
    )
    validate_dataset(dataset)
    event_set = extract_events(dataset.outages, cfg.grouping)
    if not event_set.events:
        logger.warning("No events with at least {} outage(s)", cfg.grouping.min_outages)
    return dataset, event_set


def write_output(cfg: RunConfig, name: str, text: str):
    """Write a report under --out, when given."""
    if cfg.out_dir is None:
        return
    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        (cfg.out_dir / name).write_text(text, encoding="utf-8")
    except OSError as e:
        raise InputFileError(f"Cannot write {cfg.out_dir / name}: {e}")
    logger.info("Wrote {}", cfg.out_dir / name)


def emit(cfg: RunConfig, stem: str, payload, table: Optional[str] = None):
    """Print the JSON and/or text rendering of a report and mirror it under --out."""
    if cfg.as_json:
        text = dump_json(payload, get_settings().SIG_DIGITS)
        click.echo(text, nl=False)
        write_output(cfg, f"{stem}.json", text)
    if cfg.as_table and table is not None:
        click.echo(table, nl=False)
        write_output(cfg, f"{stem}.txt", table)
