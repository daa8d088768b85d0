import math
from typing import Iterable, Mapping, Optional

import numpy as np
import pandas as pd
from loguru import logger

from core.config.settings import get_settings
from core.constants import METRIC_TABLE_ROWS, MINUTES_PER_HOUR
from core.exceptions.errors import CurveError, UndefinedMetricError
from core.schemas import CrewProfile, Event, EventMetrics, Metric, MetricStatus, ResilienceScores, StepCurve, Weighting
from core.templates import templates
from services.helpers.time_utils import to_hours, to_iso
from services.processes import (
    area,
    build_outage_process,
    build_restore_process,
    curve_max,
    performance_curve,
    quantile_crossing,
)


def crew_hours(p: CrewProfile, start: int, end: int) -> Metric:
    """Crew-hours deployed over [start, end]: each hourly sample weighted by its overlap."""
    if start > end:
        raise CurveError(f"Crew-hour bounds are reversed ({start} > {end})")
    if p.is_empty:
        return MetricStatus.UNAVAILABLE
    hour_start = np.asarray([s.hour_start for s in p.samples], dtype=np.int64)
    fte = np.asarray([s.fte for s in p.samples], dtype=float)
    overlap = np.clip(np.minimum(hour_start + MINUTES_PER_HOUR, end) - np.maximum(hour_start, start), 0, None)
    return float((fte * overlap).sum() / MINUTES_PER_HOUR)


def restoration_efficiency(c_crew: float, n: int) -> float:
    """RE = log10(crew hours per outage restored)"""
    if n <= 0 or c_crew <= 0:
        raise UndefinedMetricError(f"RE is undefined for crew hours {c_crew} and {n} outage(s)")
    return math.log10(c_crew / n)


def area_index(a_cust: float, n_cust: int) -> float:
    """AIR = log10(customer hours per customer out)"""
    if n_cust <= 0 or a_cust <= 0:
        raise UndefinedMetricError(f"AIR is undefined for {a_cust} customer hours and {n_cust} customer(s)")
    return math.log10(a_cust / n_cust)


def repair_metric(re: Metric, air: Metric) -> Metric:
    """REPAIR = RE + AIR; a marker on either side carries through."""
    if MetricStatus.UNAVAILABLE in (re, air):
        return MetricStatus.UNAVAILABLE
    if MetricStatus.UNDEFINED in (re, air):
        return MetricStatus.UNDEFINED
    return re + air


def saidi_contribution(a_cust: float, customers_served: int) -> float:
    """Hours the event adds to the SAIDI numerator per customer served."""
    if not customers_served or customers_served <= 0:
        raise UndefinedMetricError("SAIDI contribution needs a positive customer base")
    return a_cust / customers_served


def _guarded(metric, *args) -> Metric:
    if any(isinstance(arg, MetricStatus) for arg in args):
        return MetricStatus.UNAVAILABLE
    try:
        return metric(*args)
    except UndefinedMetricError as e:
        logger.debug(e.message)
        return MetricStatus.UNDEFINED


def _per_hour(count: int, hours: float) -> Metric:
    return count / hours if hours > 0 else MetricStatus.UNDEFINED


def metrics_from_processes(
    o_cust: StepCurve,
    r_cust: StepCurve,
    o_count: StepCurve,
    r_count: StepCurve,
    p: CrewProfile,
    ordinal: int = 1,
    customers_served: Optional[int] = None,
    d95_fraction: Optional[float] = None,
) -> EventMetrics:
    """Full metric record of an event given its four process curves.

    Instants are read off the outage-count curves; r_n is the later of the last restore and
    the instant the customer restore curve reaches its final level.
    """
    d95_fraction = d95_fraction or get_settings().D95_FRACTION
    n = int(o_count.final_level)
    n_cust = o_cust.final_level
    o_1, o_n = o_count.breakpoints[0], o_count.breakpoints[-1]
    r_1 = r_count.breakpoints[0]
    r_n = r_count.breakpoints[-1]
    if r_cust.final_level > 0:
        r_n = max(r_n, quantile_crossing(r_cust, 1.0))

    p_cust = performance_curve(o_cust, r_cust)
    p_count = performance_curve(o_count, r_count)
    a_cust = area(p_cust, o_1, r_n)

    outage_duration_h = to_hours(o_n - o_1)
    restore_duration_h = to_hours(r_n - r_1)

    d95_h = MetricStatus.UNDEFINED
    if r_cust.final_level > 0:
        d95_h = to_hours(quantile_crossing(r_cust, d95_fraction) - r_1)
    d95_outages_h = to_hours(quantile_crossing(r_count, d95_fraction) - r_1)

    c_crew = crew_hours(p, o_1, r_n)
    re = _guarded(restoration_efficiency, c_crew, n)
    air = _guarded(area_index, a_cust, n_cust)

    saidi = MetricStatus.UNAVAILABLE
    if customers_served is not None:
        saidi = _guarded(saidi_contribution, a_cust, customers_served)

    return EventMetrics(
        ordinal=ordinal,
        o_1=to_iso(o_1),
        r_n=to_iso(r_n),
        n=n,
        n_cust=int(n_cust),
        outage_duration_h=outage_duration_h,
        outage_rate=_per_hour(n, outage_duration_h),
        restore_delay_h=to_hours(r_1 - o_1),
        restore_duration_h=restore_duration_h,
        d95_h=d95_h,
        d95_outages_h=d95_outages_h,
        cust_restore_rate=_per_hour(n_cust, restore_duration_h),
        outage_restore_rate=_per_hour(n, restore_duration_h),
        event_duration_h=to_hours(r_n - o_1),
        max_cust_out=curve_max(p_cust),
        max_outages_out=int(curve_max(p_count)),
        a_cust=a_cust,
        crew_hours=c_crew,
        re=re,
        air=air,
        repair=repair_metric(re, air),
        saidi_contribution_h=saidi,
    )


def compute_metrics(e: Event, p: CrewProfile, customers_served: Optional[int] = None) -> EventMetrics:
    """Every resilience metric of one event."""
    if customers_served is None:
        customers_served = get_settings().CUSTOMERS_SERVED
    metrics = metrics_from_processes(
        build_outage_process(e, Weighting.CUSTOMERS),
        build_restore_process(e, Weighting.CUSTOMERS),
        build_outage_process(e, Weighting.OUTAGES),
        build_restore_process(e, Weighting.OUTAGES),
        p,
        ordinal=e.ordinal,
        customers_served=customers_served,
    )
    logger.debug("Event {}: n={} RE={} AIR={}", e.ordinal, metrics.n, metrics.re, metrics.air)
    return metrics


def resilience_scores(n: int, c_crew: float, n_cust: int, a_cust: float) -> ResilienceScores:
    """RE, AIR and REPAIR from the four event totals alone."""
    re = _guarded(restoration_efficiency, c_crew, n)
    air = _guarded(area_index, a_cust, n_cust)
    return ResilienceScores(re=re, air=air, repair=repair_metric(re, air))


def compare_storms(rows: Iterable[Mapping]) -> pd.DataFrame:
    """Score and rank storms by REPAIR, lowest (best) first.

    Each row needs storm, n, crew_hours, n_cust and a_cust. Storms whose REPAIR is a marker
    rank last.
    """
    frame = pd.DataFrame(list(rows), columns=["storm", "n", "crew_hours", "n_cust", "a_cust"])
    scores = [
        resilience_scores(row.n, row.crew_hours, row.n_cust, row.a_cust)
        for row in frame.itertuples(index=False)
    ]
    for name in ("re", "air", "repair"):
        frame[name] = [getattr(s, name) for s in scores]

    numeric = pd.to_numeric(frame["repair"].map(lambda v: np.nan if isinstance(v, MetricStatus) else v))
    frame["rank"] = numeric.rank(method="min", na_option="bottom").astype(int)
    return frame.sort_values(["rank", "storm"], kind="stable").reset_index(drop=True)


def render_metrics_table(records: Iterable[EventMetrics]) -> str:
    """Aligned text table, one column per event, rows in the resilience metric table order."""
    return templates.get_template("metrics_table.txt").render(
        events=[m.model_dump() for m in records],
        rows=METRIC_TABLE_ROWS,
    )
