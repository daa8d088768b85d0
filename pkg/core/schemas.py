from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.constants import MINUTES_PER_HOUR


class Weighting(str, Enum):
    CUSTOMERS = "customers"
    OUTAGES = "outages"


class MetricStatus(str, Enum):
    """Explicit marker for a metric that cannot be given a number."""
    UNDEFINED = "undefined"
    UNAVAILABLE = "unavailable"


# A metric is either a number or one of the markers above, never 0 or NaN as a stand-in
Metric = Union[float, MetricStatus]


class DispatchPolicy(str, Enum):
    CHRONOLOGICAL = "chrono"
    LARGEST_CUSTOMERS_FIRST = "largest"


# Outages
class OutageRecord(BaseModel):
    """One outage ticket. Instants are integer minutes since 1970-01-01T00:00 wall clock."""
    id: str
    start: int
    restore: int
    customers: int = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _restore_after_start(self):
        if self.restore < self.start:
            raise ValueError(f"outage {self.id} is restored before it starts")
        return self

    @property
    def duration(self) -> int:
        """d_k in minutes"""
        return self.restore - self.start


# Crew
class CrewRecord(BaseModel):
    hour_start: int
    fte: float = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @field_validator("hour_start")
    @classmethod
    def _hour_aligned(cls, v: int) -> int:
        if v % MINUTES_PER_HOUR != 0:
            raise ValueError(f"crew sample at minute {v} is not aligned to an hour")
        return v


class CrewProfile(BaseModel):
    """Hourly crew deployment C(t); each sample covers [hour_start, hour_start + 60)."""
    samples: Tuple[CrewRecord, ...] = ()

    model_config = ConfigDict(frozen=True)

    @field_validator("samples")
    @classmethod
    def _strictly_increasing(cls, v):
        for prev, curr in zip(v, v[1:]):
            if curr.hour_start <= prev.hour_start:
                raise ValueError("crew samples must have strictly increasing hour_start")
        return v

    @property
    def is_empty(self) -> bool:
        return len(self.samples) == 0

    @property
    def start(self) -> Optional[int]:
        return self.samples[0].hour_start if self.samples else None

    @property
    def end(self) -> Optional[int]:
        return self.samples[-1].hour_start + MINUTES_PER_HOUR if self.samples else None

    @property
    def total_crew_hours(self) -> float:
        return float(sum(s.fte for s in self.samples))


class DatasetMetadata(BaseModel):
    source: str = ""
    tz_note: str = "timestamps are local wall-clock; daylight saving shifts are not modeled"


class Dataset(BaseModel):
    outages: Tuple[OutageRecord, ...] = ()
    crew: CrewProfile = CrewProfile()
    metadata: DatasetMetadata = DatasetMetadata()

    model_config = ConfigDict(frozen=True)

    @field_validator("outages")
    @classmethod
    def _sorted_by_start(cls, v):
        return tuple(sorted(v, key=lambda rec: (rec.start, rec.id)))


class ValidationWarning(BaseModel):
    kind: str
    message: str
    elements: Tuple[str, ...] = ()


class ValidationReport(BaseModel):
    warnings: Tuple[ValidationWarning, ...] = ()
    counts: Dict[str, int] = {}
    n_outages: int = 0
    n_crew_samples: int = 0

    @property
    def messages(self) -> List[str]:
        return [w.message for w in self.warnings]


# Events
class GroupingOptions(BaseModel):
    slack: int = Field(default=0, ge=0)  # minutes
    min_outages: int = Field(default=1, ge=1)


class Event(BaseModel):
    """A maximal group of overlapping outages with its sorted outage and restore instants."""
    ordinal: int = 1
    members: Tuple[OutageRecord, ...] = ()
    o: Tuple[int, ...] = ()
    r: Tuple[int, ...] = ()
    n: int = 0
    n_cust: int = 0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _consistent(self):
        if not (len(self.members) == len(self.o) == len(self.r) == self.n):
            raise ValueError("event vectors do not match its members")
        return self

    @classmethod
    def from_members(cls, members, ordinal: int = 1) -> "Event":
        members = tuple(sorted(members, key=lambda rec: (rec.start, rec.id)))
        return cls(
            ordinal=ordinal,
            members=members,
            o=tuple(sorted(rec.start for rec in members)),
            r=tuple(sorted(rec.restore for rec in members)),
            n=len(members),
            n_cust=sum(rec.customers for rec in members),
        )

    @property
    def member_ids(self) -> List[str]:
        return [rec.id for rec in self.members]


class EventSet(BaseModel):
    events: Tuple[Event, ...] = ()
    dropped: Tuple[Event, ...] = ()


# Curves
class StepCurve(BaseModel):
    """Right-continuous piecewise-constant function.

    `values[i]` holds on [breakpoints[i], breakpoints[i+1]); the last value holds after the
    last breakpoint; `initial` holds before the first one.
    """
    breakpoints: Tuple[int, ...] = ()
    values: Tuple[Union[int, float], ...] = ()
    weighting: Weighting = Weighting.CUSTOMERS
    initial: Union[int, float] = 0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _well_formed(self):
        if len(self.breakpoints) != len(self.values):
            raise ValueError("a step curve needs one value per breakpoint")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        return self

    @property
    def final_level(self) -> Union[int, float]:
        return self.values[-1] if self.values else self.initial

    def values_at(self, instants) -> np.ndarray:
        levels = np.concatenate(([self.initial], np.asarray(self.values)))
        index = np.searchsorted(np.asarray(self.breakpoints, dtype=np.int64), np.asarray(instants), side="right")
        return levels[index]

    def value_at(self, instant: int) -> Union[int, float]:
        return self.values_at([instant])[0].item()


# Metrics
class EventMetrics(BaseModel):
    ordinal: int = 1
    o_1: str = ""
    r_n: str = ""
    n: int
    n_cust: int
    outage_duration_h: float
    outage_rate: Metric
    restore_delay_h: float
    restore_duration_h: float
    d95_h: Metric
    d95_outages_h: Metric
    cust_restore_rate: Metric
    outage_restore_rate: Metric
    event_duration_h: float
    max_cust_out: Union[int, float]
    max_outages_out: int
    a_cust: float
    crew_hours: Metric
    re: Metric
    air: Metric
    repair: Metric
    saidi_contribution_h: Metric = MetricStatus.UNAVAILABLE


class ResilienceScores(BaseModel):
    re: Metric
    air: Metric
    repair: Metric


# Scenarios
class ScaleMode(str, Enum):
    EXACT = "exact"
    PAPER_RECURRENCE = "paper"


class UniformSpeedup(BaseModel):
    kind: Literal["speedup"] = "speedup"
    s: float = Field(ge=0, lt=1)

    @property
    def label(self) -> str:
        return f"speedup:{self.s:g}"


class CrewScale(BaseModel):
    kind: Literal["crewscale"] = "crewscale"
    a: float = Field(ge=0)
    mode: ScaleMode = ScaleMode.EXACT
    literal_sign: bool = False

    @property
    def label(self) -> str:
        return f"crewscale:{self.a:g}:{self.mode.value}"


class ProactiveShift(BaseModel):
    kind: Literal["shift"] = "shift"
    delta_h: float = Field(gt=0)
    policy: DispatchPolicy = DispatchPolicy.CHRONOLOGICAL

    @property
    def label(self) -> str:
        return f"shift:{self.delta_h:g}:{self.policy.value}"


Scenario = Annotated[Union[UniformSpeedup, CrewScale, ProactiveShift], Field(discriminator="kind")]


class RerunResult(BaseModel):
    scenario: str
    ordinal: int = 1
    base: EventMetrics
    counterfactual: EventMetrics
    delta_re: Metric
    delta_air: Metric
    delta_repair: Metric
    crew_hours_saved: Metric
    r_base: StepCurve
    r_prime: StepCurve
    steps: Optional[int] = None


class RerunRow(BaseModel):
    ordinal: int
    scenario: str
    base_re: Metric
    base_air: Metric
    base_repair: Metric
    counterfactual_re: Metric
    counterfactual_air: Metric
    counterfactual_repair: Metric
    delta_re: Metric
    delta_air: Metric
    delta_repair: Metric
    a_cust_base: float
    a_cust_counterfactual: float
    crew_hours_saved: Metric


class RerunReport(BaseModel):
    rows: Tuple[RerunRow, ...]
    mean_delta_repair: Metric


# Synthetic storms
class IntensitySegment(BaseModel):
    hours: float = Field(gt=0)
    rate: float = Field(ge=0)  # outages per hour


class FixedCustomers(BaseModel):
    kind: Literal["fixed"] = "fixed"
    value: int = Field(gt=0)


class UniformCustomers(BaseModel):
    kind: Literal["uniform"] = "uniform"
    low: int = Field(gt=0)
    high: int = Field(gt=0)  # inclusive

    @model_validator(mode="after")
    def _ordered(self):
        if self.high < self.low:
            raise ValueError("uniform customers need low <= high")
        return self


class ZipfCustomers(BaseModel):
    """Heavy-tailed discrete customer counts: min(cap, scale * Zipf(a))."""
    kind: Literal["zipf"] = "zipf"
    a: float = Field(gt=1)
    scale: int = Field(default=1, gt=0)
    cap: int = Field(default=100_000, gt=0)


CustomerDist = Annotated[Union[FixedCustomers, UniformCustomers, ZipfCustomers], Field(discriminator="kind")]


class FixedWork(BaseModel):
    kind: Literal["fixed"] = "fixed"
    value: float = Field(gt=0)  # crew-hours


class UniformWork(BaseModel):
    kind: Literal["uniform"] = "uniform"
    low: float = Field(gt=0)
    high: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.high < self.low:
            raise ValueError("uniform work needs low <= high")
        return self


class GammaWork(BaseModel):
    kind: Literal["gamma"] = "gamma"
    shape: float = Field(gt=0)
    scale: float = Field(gt=0)


RepairDist = Annotated[Union[FixedWork, UniformWork, GammaWork], Field(discriminator="kind")]


class StormModel(BaseModel):
    intensity: Tuple[IntensitySegment, ...]
    customer_dist: CustomerDist
    repair_dist: RepairDist
    seed: Optional[int] = Field(default=None, ge=0)  # None: Settings.SYNTH_SEED
    origin: datetime = datetime(2022, 6, 13)

    @property
    def horizon_h(self) -> float:
        return sum(seg.hours for seg in self.intensity)


class StormOutage(BaseModel):
    id: str
    start: int
    customers: int = Field(ge=0)
    repair_work: float = Field(ge=0)  # crew-hours

    model_config = ConfigDict(frozen=True)


class CrewSegment(BaseModel):
    hours: int = Field(gt=0)
    fte: float = Field(ge=0)


class SynthConfig(BaseModel):
    storm: StormModel
    crew: Tuple[CrewSegment, ...]
    policy: DispatchPolicy = DispatchPolicy.CHRONOLOGICAL
    crew_offset_h: int = 0  # crews start this many whole hours after the storm origin


class RestorationSchedule(BaseModel):
    records: Tuple[OutageRecord, ...]
    allocated: Dict[str, float]  # crew-hours spent per ticket


# Command line
class RunConfig(BaseModel):
    outages: Optional[Path] = None
    crew: Optional[Path] = None
    work: Optional[Path] = None
    grouping: GroupingOptions = GroupingOptions()
    scenarios: Tuple[Scenario, ...] = ()
    out_dir: Optional[Path] = None
    as_json: bool = False
    as_table: bool = False
    exclude_ids: Tuple[str, ...] = ()
    exclude_activities: Tuple[str, ...] = ()
    customers_served: Optional[int] = None
    time_format: str = "ISO8601"

    @model_validator(mode="after")
    def _one_format_at_least(self):
        if not self.as_json and not self.as_table:
            self.as_json = True
        return self
