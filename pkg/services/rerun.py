"""Rerunning history: metrics of an event under faster repairs, more crews or earlier dispatch."""
import math
from fractions import Fraction
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import ValidationError

from core.config.settings import get_settings
from core.constants import MINUTES_PER_HOUR, RERUN_TABLE_ROWS, SCENARIO_GRAMMAR
from core.exceptions.errors import ConfigError, CrewCoverageError, ScenarioError
from core.schemas import (
    CrewProfile,
    CrewRecord,
    CrewScale,
    DispatchPolicy,
    Event,
    EventMetrics,
    Metric,
    MetricStatus,
    ProactiveShift,
    RerunReport,
    RerunResult,
    RerunRow,
    ScaleMode,
    Scenario,
    StepCurve,
    StormOutage,
    UniformSpeedup,
    Weighting,
)
from core.templates import templates
from services.events import event_bounds
from services.helpers.time_utils import floor_hour, round_minutes, to_iso
from services.metrics import compute_metrics, crew_hours, metrics_from_processes
from services.processes import build_outage_process, build_restore_process
from services.simlab import simulate_restoration

MODE_ALIASES = {
    "paper_recurrence": ScaleMode.PAPER_RECURRENCE.value,
    "hourly": ScaleMode.PAPER_RECURRENCE.value,
    "recurrence": ScaleMode.PAPER_RECURRENCE.value,
}


def parse_scenario(text: str) -> Scenario:
    """Parse `speedup:<s>`, `crewscale:<a>[:mode]` or `shift:<delta_h>[:policy]`."""
    parts = [part.strip().lower() for part in text.strip().split(":")]
    kind, args = parts[0], parts[1:]
    try:
        if kind == "speedup" and len(args) == 1:
            return UniformSpeedup(s=float(args[0]))
        if kind == "crewscale" and len(args) in (1, 2):
            a = float(args[0])
            if a >= 1:
                raise ValueError("crew scale must stay below 1")
            mode = ScaleMode(MODE_ALIASES.get(args[1], args[1])) if len(args) == 2 else ScaleMode.EXACT
            return CrewScale(a=a, mode=mode)
        if kind == "shift" and len(args) in (1, 2):
            policy = DispatchPolicy(args[1]) if len(args) == 2 else DispatchPolicy.CHRONOLOGICAL
            return ProactiveShift(delta_h=float(args[0]), policy=policy)
    except (ValueError, ValidationError) as e:
        logger.debug("Scenario {!r} rejected: {}", text, e)
    raise ScenarioError(f"Invalid scenario {text!r}. Accepted forms:\n  " + "\n  ".join(SCENARIO_GRAMMAR))


def _delta(counterfactual: Metric, base: Metric) -> Metric:
    for marker in (MetricStatus.UNAVAILABLE, MetricStatus.UNDEFINED):
        if marker in (counterfactual, base):
            return marker
    return counterfactual - base


def _saved(profile: CrewProfile, o_1: int, base_end: int, counterfactual_end: int) -> Metric:
    """Crew-hours no longer needed once crews are released at the counterfactual last restore."""
    base_hours = crew_hours(profile, o_1, base_end)
    if isinstance(base_hours, MetricStatus):
        return base_hours
    return base_hours - crew_hours(profile, o_1, counterfactual_end)


def _result(label: str, ordinal: int, base: EventMetrics, counterfactual: EventMetrics, saved: Metric,
            r_base: StepCurve, r_prime: StepCurve, steps: Optional[int] = None) -> RerunResult:
    result = RerunResult(
        scenario=label,
        ordinal=ordinal,
        base=base,
        counterfactual=counterfactual,
        delta_re=_delta(counterfactual.re, base.re),
        delta_air=_delta(counterfactual.air, base.air),
        delta_repair=_delta(counterfactual.repair, base.repair),
        crew_hours_saved=saved,
        r_base=r_base,
        r_prime=r_prime,
        steps=steps,
    )
    logger.debug("Rerun {} on event {}: delta REPAIR {}", label, ordinal, result.delta_repair)
    return result


# Uniform speedup
def apply_uniform_speedup(e: Event, s: float) -> Event:
    """Every repair takes (1 - s) of its observed duration; starts are unchanged.

    New restores are rounded to the nearest minute, ties to even.
    """
    if not 0 <= s < 1:
        raise ScenarioError(f"Speedup must be in [0, 1), got {s}")
    keep = 1 - Fraction(str(s))
    members = [
        rec.model_copy(update={"restore": rec.start + round_minutes(keep * rec.duration)})
        for rec in e.members
    ]
    return Event.from_members(members, ordinal=e.ordinal)


def rerun_speedup(e: Event, p: CrewProfile, s: float, label: Optional[str] = None,
                  customers_served: Optional[int] = None) -> RerunResult:
    faster = apply_uniform_speedup(e, s)
    o_1, _, _, r_n = event_bounds(e)
    return _result(
        label or UniformSpeedup(s=s).label,
        e.ordinal,
        compute_metrics(e, p, customers_served),
        compute_metrics(faster, p, customers_served),
        _saved(p, o_1, r_n, event_bounds(faster)[3]),
        build_restore_process(e, Weighting.CUSTOMERS),
        build_restore_process(faster, Weighting.CUSTOMERS),
    )


# Crew scale
def require_coverage(p: CrewProfile, start: int, end: int):
    """The profile must hold a sample for every hour touching [start, end]."""
    if p.is_empty:
        raise CrewCoverageError("Crew scenarios need a crew profile")
    first = floor_hour(start)
    needed = set(range(first, max(end, first + 1), MINUTES_PER_HOUR))
    missing = sorted(needed - {s.hour_start for s in p.samples})
    if missing:
        raise CrewCoverageError(
            f"Crew profile has {len(missing)} missing hour(s) inside the event, first at {to_iso(missing[0])}"
        )


def scale_profile(p: CrewProfile, factor: float, start: int) -> CrewProfile:
    """Multiply every sample from the hour holding `start` onward by `factor`."""
    first = floor_hour(start)
    return CrewProfile(samples=tuple(
        CrewRecord(hour_start=s.hour_start, fte=s.fte * factor) if s.hour_start >= first else s
        for s in p.samples
    ))


def _truncate(c: StepCurve, at: int) -> StepCurve:
    """Same curve, with every jump after `at` pulled back to `at`."""
    if not c.breakpoints or c.breakpoints[-1] <= at:
        return c
    keep = [b for b in c.breakpoints if b < at]
    values = c.values_at(keep).tolist() if keep else []
    return c.model_copy(update={"breakpoints": tuple(keep) + (at,), "values": tuple(values) + (c.final_level,)})


def recurrence_restore_curve(e: Event, faster: Event, literal_sign: bool = False):
    """Hourly accumulated-restoration recurrence on top of the exact counterfactual curve.

    On the grid t_k = o_1 + k hours, restorations completing in (t_k-1, t_k] contribute a
    gain g_k, their customer-weighted relative time saving (r - r') / (r - o_1). The bonus
    grows as B_k = B_k-1 + g_k * R'(t_k-1), and R'(t) = E(t) + B(t) clipped to
    [0, min(O(t), n_cust)] where E is the exact counterfactual restore curve. The loop stops
    once R' reaches n_cust.

    Returns the curve, truncated at the release instant, and the number of hourly steps.
    """
    o_1, _, _, _ = event_bounds(e)
    r_end = event_bounds(faster)[3]
    n_cust = e.n_cust
    sign = -1.0 if literal_sign else 1.0

    exact = build_restore_process(faster, Weighting.CUSTOMERS)
    outage = build_outage_process(e, Weighting.CUSTOMERS)

    base_by_id = {rec.id: rec for rec in e.members}
    pairs = pd.DataFrame(
        [(rec.restore, base_by_id[rec.id].restore, rec.customers) for rec in faster.members],
        columns=["r_prime", "r", "c"],
    )
    pairs["hour"] = np.ceil((pairs["r_prime"] - o_1) / MINUTES_PER_HOUR).astype(int)
    pairs["saved"] = pairs["c"] * (pairs["r"] - pairs["r_prime"])
    pairs["span"] = pairs["c"] * (pairs["r"] - o_1)
    per_hour = pairs.groupby("hour")[["saved", "span"]].sum()

    def level(instants, bonus_levels):
        return np.clip(
            exact.values_at(instants) + bonus_levels,
            0,
            np.minimum(outage.values_at(instants), n_cust),
        )

    last_step = max(1, math.ceil((r_end - o_1) / MINUTES_PER_HOUR))
    grid, bonus = [o_1], [0.0]
    steps = 0
    prev = level([o_1], [0.0])[0]
    for k in range(1, last_step + 1):
        steps = k
        saved, span = per_hour.loc[k] if k in per_hour.index else (0, 0)
        gain = saved / span if span > 0 else 0.0
        grid.append(o_1 + k * MINUTES_PER_HOUR)
        bonus.append(bonus[-1] + sign * gain * prev)
        prev = level([grid[-1]], [bonus[-1]])[0]
        if prev >= n_cust:
            break

    # Evaluate on every jump of E and O plus the hourly grid
    instants = np.union1d(np.union1d(exact.breakpoints, outage.breakpoints), grid).astype(np.int64)
    instants = instants[instants <= grid[-1]]
    step_bonus = np.asarray(bonus)[np.searchsorted(np.asarray(grid), instants, side="right") - 1]
    values = level(instants, step_bonus)

    if n_cust > 0:
        if values[-1] < n_cust:
            # Only reachable when the increment is subtracted; the remainder is restored when the loop ends
            logger.warning("Recurrence ended below {} customers; restoring the rest at {}", n_cust, to_iso(grid[-1]))
            values[-1] = n_cust
        release = instants[np.nonzero(values >= n_cust)[0][0]]
        within = instants <= release
        instants, values = instants[within], values[within]

    curve = StepCurve(breakpoints=tuple(instants.tolist()), values=tuple(values.tolist()), weighting=Weighting.CUSTOMERS)
    return curve, steps


def apply_crew_scale(e: Event, p: CrewProfile, a: float, mode: ScaleMode = ScaleMode.EXACT, literal_sign: bool = False,
                     customers_served: Optional[int] = None) -> RerunResult:
    """Metrics with (1 + a) times the crews from o_1 on, each repair shortened by the factor (1 - a)."""
    if a < 0 or 1 - a <= 0:
        raise ScenarioError(f"Crew scale must be in [0, 1), got {a}")
    o_1, _, _, r_n = event_bounds(e)
    require_coverage(p, o_1, r_n)

    scaled = scale_profile(p, 1 + a, o_1)
    faster = apply_uniform_speedup(e, a)
    if customers_served is None:
        customers_served = get_settings().CUSTOMERS_SERVED
    base = compute_metrics(e, p, customers_served)
    label = CrewScale(a=a, mode=mode, literal_sign=literal_sign).label

    if mode == ScaleMode.EXACT:
        counterfactual = compute_metrics(faster, scaled, customers_served)
        r_prime = build_restore_process(faster, Weighting.CUSTOMERS)
        steps = None
        release = event_bounds(faster)[3]
    else:
        r_prime, steps = recurrence_restore_curve(e, faster, literal_sign)
        release = r_prime.breakpoints[-1]
        counterfactual = metrics_from_processes(
            build_outage_process(e, Weighting.CUSTOMERS),
            r_prime,
            build_outage_process(e, Weighting.OUTAGES),
            _truncate(build_restore_process(faster, Weighting.OUTAGES), release),
            scaled,
            ordinal=e.ordinal,
            customers_served=customers_served,
        )
        logger.debug("Recurrence on event {} stopped after {} hourly step(s)", e.ordinal, steps)

    return _result(
        label, e.ordinal, base, counterfactual,
        _saved(scaled, o_1, r_n, release),
        build_restore_process(e, Weighting.CUSTOMERS), r_prime, steps,
    )


# Proactive shift
def shift_profile(p: CrewProfile, delta_h: float) -> CrewProfile:
    """C'(t) = max(C(t), C(t + delta)), resampled hourly; the last level is held for delta after the profile ends.

    Crews only ever arrive earlier: no hour of the shifted profile has fewer crews than the observed one.
    """
    shift = round_minutes(Fraction(str(delta_h)) * MINUTES_PER_HOUR)
    hold = math.ceil(shift / MINUTES_PER_HOUR) + 1
    extended = CrewProfile(samples=p.samples + tuple(
        CrewRecord(hour_start=p.end + k * MINUTES_PER_HOUR, fte=p.samples[-1].fte) for k in range(hold)
    ))
    return CrewProfile(samples=tuple(
        CrewRecord(hour_start=h, fte=max(
            crew_hours(p, h, h + MINUTES_PER_HOUR),
            crew_hours(extended, h + shift, h + shift + MINUTES_PER_HOUR),
        ))
        for h in range(floor_hour(p.start - shift), p.end, MINUTES_PER_HOUR)
    ))


def apply_proactive_shift(e: Event, p: CrewProfile, delta_h: float, policy: DispatchPolicy = DispatchPolicy.CHRONOLOGICAL,
                          work: Optional[Dict[str, float]] = None, customers_served: Optional[int] = None) -> RerunResult:
    """Simulated restoration with every crew deployed `delta_h` hours earlier.

    Repair work per ticket comes from `work` when given, otherwise from the observed
    duration at one team. Base and counterfactual are both simulated under `policy`.
    """
    if delta_h <= 0:
        raise ScenarioError(f"Shift must be positive, got {delta_h}")
    if p.is_empty:
        raise CrewCoverageError("Proactive dispatch needs a crew profile")
    work = work or {}
    tickets = [
        StormOutage(id=rec.id, start=rec.start, customers=rec.customers,
                    repair_work=work.get(rec.id, rec.duration / MINUTES_PER_HOUR))
        for rec in e.members
    ]
    shifted = shift_profile(p, delta_h)
    base_event = Event.from_members(simulate_restoration(tickets, p, policy), ordinal=e.ordinal)
    early_event = Event.from_members(simulate_restoration(tickets, shifted, policy), ordinal=e.ordinal)

    o_1, _, _, r_n = event_bounds(base_event)
    return _result(
        ProactiveShift(delta_h=delta_h, policy=policy).label,
        e.ordinal,
        compute_metrics(base_event, p, customers_served),
        compute_metrics(early_event, shifted, customers_served),
        _saved(shifted, o_1, r_n, event_bounds(early_event)[3]),
        build_restore_process(base_event, Weighting.CUSTOMERS),
        build_restore_process(early_event, Weighting.CUSTOMERS),
    )


def apply_scenario(e: Event, p: CrewProfile, scenario: Scenario, work: Optional[Dict[str, float]] = None,
                   customers_served: Optional[int] = None) -> RerunResult:
    if isinstance(scenario, UniformSpeedup):
        return rerun_speedup(e, p, scenario.s, customers_served=customers_served)
    if isinstance(scenario, CrewScale):
        return apply_crew_scale(e, p, scenario.a, scenario.mode, scenario.literal_sign, customers_served)
    if isinstance(scenario, ProactiveShift):
        return apply_proactive_shift(e, p, scenario.delta_h, scenario.policy, work, customers_served)
    raise ScenarioError(f"Unknown scenario {scenario!r}")


# Reports
def rerun_report(results: Iterable[RerunResult]) -> RerunReport:
    """Base vs counterfactual rows in event order plus the mean change in REPAIR."""
    results = sorted(results, key=lambda res: res.ordinal)
    if not results:
        raise ConfigError("Nothing to report: no rerun results")
    rows = tuple(
        RerunRow(
            ordinal=res.ordinal,
            scenario=res.scenario,
            base_re=res.base.re,
            base_air=res.base.air,
            base_repair=res.base.repair,
            counterfactual_re=res.counterfactual.re,
            counterfactual_air=res.counterfactual.air,
            counterfactual_repair=res.counterfactual.repair,
            delta_re=res.delta_re,
            delta_air=res.delta_air,
            delta_repair=res.delta_repair,
            a_cust_base=res.base.a_cust,
            a_cust_counterfactual=res.counterfactual.a_cust,
            crew_hours_saved=res.crew_hours_saved,
        )
        for res in results
    )
    deltas = pd.Series([row.delta_repair for row in rows if not isinstance(row.delta_repair, MetricStatus)], dtype=float)
    mean = float(deltas.mean()) if len(deltas) else MetricStatus.UNDEFINED
    return RerunReport(rows=rows, mean_delta_repair=mean)


def render_rerun_table(report: RerunReport) -> str:
    return templates.get_template("rerun_table.txt").render(
        rows=[row.model_dump() for row in report.rows],
        metric_rows=RERUN_TABLE_ROWS,
        mean_delta_repair=report.mean_delta_repair,
    )
