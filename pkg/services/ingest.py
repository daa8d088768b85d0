"""Outage and crew log ingestion.

Both logs are CSV with a header row. Timestamps are parsed with pandas, truncated to whole
minutes and kept as integer minutes since 1970-01-01T00:00 wall clock.
"""
import io
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Union

import pandas as pd
from loguru import logger
from pydantic import BaseModel, Field

from core.config.settings import get_settings
from core.constants import (
    CREW_ACTIVITY_COLUMN,
    CREW_COLUMNS,
    DEFAULT_OUTAGE_SCHEMA,
    MINUTES_PER_HOUR,
    OUTAGE_COLUMNS,
    WORK_COLUMNS,
)
from core.exceptions.errors import InputFileError, LogParseError, RowError
from core.schemas import CrewProfile, CrewRecord, Dataset, DatasetMetadata, OutageRecord, ValidationReport
from services.helpers.time_utils import series_to_minutes, to_iso
from services.helpers.validation_utils import describe_warnings


class OutageLog(BaseModel):
    """Outcome of parsing an outage log: accepted records plus every rejected row.

    rows_in == len(records) + len(errors) always holds; dataset-level problems (duplicate
    ids) are listed separately since they do not reject a single row.
    """
    records: List[OutageRecord] = Field(default_factory=list)
    errors: List[RowError] = Field(default_factory=list)
    dataset_errors: List[RowError] = Field(default_factory=list)
    rows_in: int = 0

    @property
    def ok(self) -> bool:
        return not self.errors and not self.dataset_errors

    def raise_for_errors(self):
        if self.ok:
            return self
        raise LogParseError(
            f"Outage log has {len(self.errors)} invalid row(s) and {len(self.dataset_errors)} dataset error(s)",
            self.errors + self.dataset_errors,
        )


def _read_csv(stream: Union[str, TextIO]) -> pd.DataFrame:
    text = stream if isinstance(stream, str) else stream.read()
    text = text.lstrip("\ufeff")
    if not text.strip():
        return pd.DataFrame()
    frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    frame.columns = [str(col).strip() for col in frame.columns]
    return frame


def _parse_instants(column: pd.Series, time_format: str) -> pd.Series:
    return series_to_minutes(pd.to_datetime(column.str.strip(), format=time_format, errors="coerce"))


def parse_outage_log(stream: Union[str, TextIO], schema: Optional[Dict[str, str]] = None, time_format: Optional[str] = None) -> OutageLog:
    """Parse an outage log into records sorted by (start, id).

    `schema` maps the canonical names id/start/restore/customers to the file's column names.
    """
    schema = {**DEFAULT_OUTAGE_SCHEMA, **(schema or {})}
    time_format = time_format or get_settings().TIME_FORMAT

    frame = _read_csv(stream)
    if frame.empty:
        return OutageLog()
    missing = [schema[name] for name in OUTAGE_COLUMNS if schema[name] not in frame.columns]
    if missing:
        raise LogParseError(f"Outage log is missing column(s): {', '.join(missing)}")

    raw = {name: frame[schema[name]].str.strip() for name in OUTAGE_COLUMNS}
    starts = _parse_instants(raw["start"], time_format)
    restores = _parse_instants(raw["restore"], time_format)
    customers = pd.to_numeric(raw["customers"], errors="coerce")

    records, errors = [], []
    for i in range(len(frame)):
        line = i + 2  # header is line 1
        problems = []
        if raw["id"].iat[i] == "":
            problems.append("missing id")
        if pd.isna(starts.iat[i]):
            problems.append(f"malformed start timestamp {raw['start'].iat[i]!r}")
        if pd.isna(restores.iat[i]):
            problems.append(f"malformed restore timestamp {raw['restore'].iat[i]!r}")
        cust = customers.iat[i]
        if pd.isna(cust) or cust % 1 != 0:
            problems.append(f"malformed customers {raw['customers'].iat[i]!r}")
        elif cust < 0:
            problems.append(f"negative customers {int(cust)}")
        if not problems and restores.iat[i] < starts.iat[i]:
            problems.append(f"restore {raw['restore'].iat[i]} before start {raw['start'].iat[i]}")
        if problems:
            errors.append(RowError(line=line, message="; ".join(problems)))
            continue
        records.append(OutageRecord(id=raw["id"].iat[i], start=int(starts.iat[i]), restore=int(restores.iat[i]), customers=int(cust)))

    # Dataset-level: ids must be unique
    dataset_errors = []
    ids = pd.Series([rec.id for rec in records])
    for dup_id in ids[ids.duplicated()].unique():
        dataset_errors.append(RowError(message=f"duplicate id {dup_id!r}"))

    records.sort(key=lambda rec: (rec.start, rec.id))
    logger.info("Parsed {} outage row(s): {} record(s), {} rejected", len(frame), len(records), len(errors))
    return OutageLog(records=records, errors=errors, dataset_errors=dataset_errors, rows_in=len(frame))


def parse_crew_log(stream: Union[str, TextIO], time_format: Optional[str] = None, exclude_activities: Iterable[str] = ()) -> CrewProfile:
    """Parse an hourly crew log into a gap-filled CrewProfile.

    An optional `activity` column allows several rows per hour; rows whose activity is in
    `exclude_activities` are dropped and the rest are summed per hour.
    """
    time_format = time_format or get_settings().TIME_FORMAT
    frame = _read_csv(stream)
    if frame.empty:
        return CrewProfile()
    missing = [col for col in CREW_COLUMNS if col not in frame.columns]
    if missing:
        raise LogParseError(f"Crew log is missing column(s): {', '.join(missing)}")

    hours = _parse_instants(frame["hour_start"], time_format)
    fte = pd.to_numeric(frame["fte"].str.strip(), errors="coerce")

    errors = []
    for i in range(len(frame)):
        line = i + 2
        if pd.isna(hours.iat[i]):
            errors.append(RowError(line=line, message=f"malformed hour_start {frame['hour_start'].iat[i]!r}"))
        elif hours.iat[i] % MINUTES_PER_HOUR != 0:
            errors.append(RowError(line=line, message=f"hour_start {frame['hour_start'].iat[i]} is not on the hour"))
        if pd.isna(fte.iat[i]):
            errors.append(RowError(line=line, message=f"malformed fte {frame['fte'].iat[i]!r}"))
        elif fte.iat[i] < 0:
            errors.append(RowError(line=line, message=f"negative fte {fte.iat[i]}"))
    if errors:
        raise LogParseError(f"Crew log has {len(errors)} invalid value(s)", errors)

    samples = pd.DataFrame({"hour_start": hours.astype("int64"), "fte": fte.astype(float)})
    if CREW_ACTIVITY_COLUMN in frame.columns:
        excluded = {activity.strip().lower() for activity in exclude_activities}
        keep = ~frame[CREW_ACTIVITY_COLUMN].str.strip().str.lower().isin(excluded)
        logger.info("Excluding {} crew row(s) by activity", int((~keep).sum()))
        samples = samples[keep.to_numpy()].groupby("hour_start", as_index=False)["fte"].sum()
    else:
        duplicated = samples["hour_start"].duplicated()
        if duplicated.any():
            raise LogParseError(
                "Crew log repeats an hour",
                [RowError(line=int(i) + 2, message=f"repeated hour_start {to_iso(h)}") for i, h in samples["hour_start"][duplicated].items()],
            )
    if samples.empty:
        return CrewProfile()

    # Fill missing hours with fte = 0
    samples = samples.sort_values("hour_start").set_index("hour_start")["fte"]
    full = range(int(samples.index[0]), int(samples.index[-1]) + MINUTES_PER_HOUR, MINUTES_PER_HOUR)
    samples = samples.reindex(full, fill_value=0.0)

    return CrewProfile(samples=tuple(CrewRecord(hour_start=int(h), fte=float(v)) for h, v in samples.items()))


def apply_exclusions(records: Iterable[OutageRecord], exclude_ids: Iterable[str]) -> List[OutageRecord]:
    """Drop user-excluded outages by id."""
    excluded = set(exclude_ids)
    kept = [rec for rec in records if rec.id not in excluded]
    if excluded:
        logger.info("Excluded {} outage(s) by id", len(excluded) - len(excluded - {rec.id for rec in records}))
    return kept


def write_outage_log(records: Iterable[OutageRecord]) -> str:
    frame = pd.DataFrame(
        [(rec.id, to_iso(rec.start), to_iso(rec.restore), rec.customers) for rec in records],
        columns=OUTAGE_COLUMNS,
    )
    return frame.to_csv(index=False, lineterminator="\n")


def write_crew_log(profile: CrewProfile) -> str:
    frame = pd.DataFrame([(to_iso(s.hour_start), s.fte) for s in profile.samples], columns=CREW_COLUMNS)
    return frame.to_csv(index=False, lineterminator="\n")


def parse_work_log(stream: Union[str, TextIO]) -> Dict[str, float]:
    """Repair work in crew-hours per outage id."""
    frame = _read_csv(stream)
    if frame.empty:
        return {}
    missing = [col for col in WORK_COLUMNS if col not in frame.columns]
    if missing:
        raise LogParseError(f"Work log is missing column(s): {', '.join(missing)}")
    work = pd.to_numeric(frame["repair_work"].str.strip(), errors="coerce")
    errors = [
        RowError(line=i + 2, message=f"invalid repair_work {frame['repair_work'].iat[i]!r}")
        for i in range(len(frame)) if pd.isna(work.iat[i]) or work.iat[i] < 0
    ]
    if errors:
        raise LogParseError(f"Work log has {len(errors)} invalid row(s)", errors)
    return dict(zip(frame["id"].str.strip(), work.astype(float)))


def write_work_log(work: Dict[str, float]) -> str:
    frame = pd.DataFrame(list(work.items()), columns=WORK_COLUMNS)
    return frame.to_csv(index=False, lineterminator="\n")


def read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputFileError(f"Cannot read {path}: {e}")


def load_dataset(
    outages_path: Union[str, Path],
    crew_path: Optional[Union[str, Path]] = None,
    schema: Optional[Dict[str, str]] = None,
    time_format: Optional[str] = None,
    exclude_ids: Iterable[str] = (),
    exclude_activities: Iterable[str] = (),
) -> Dataset:
    """Read, parse and filter both logs into a Dataset; raises on any invalid row."""
    log = parse_outage_log(read_text(outages_path), schema=schema, time_format=time_format).raise_for_errors()
    crew = CrewProfile()
    if crew_path is not None:
        crew = parse_crew_log(read_text(crew_path), time_format=time_format, exclude_activities=exclude_activities)
    return Dataset(
        outages=tuple(apply_exclusions(log.records, exclude_ids)),
        crew=crew,
        metadata=DatasetMetadata(source=str(outages_path)),
    )


def validate_dataset(dataset: Dataset) -> ValidationReport:
    return describe_warnings(dataset)
