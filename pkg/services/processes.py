"""Outage, restore and performance step curves of an event.

Curves are right-continuous: the level at a jump instant is the post-jump level. Areas are
taken in level-minutes (integer customer-minutes for record-built curves) and reported in
hours.
"""
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd

from core.constants import MINUTES_PER_HOUR
from core.exceptions.errors import CurveError
from core.schemas import CrewProfile, Event, StepCurve, Weighting
from services.events import event_bounds
from services.helpers.time_utils import to_iso


def _accumulate(instants: Iterable[int], weights: Iterable[int], w: Weighting) -> StepCurve:
    """Running sum of `weights`, jumping at `instants`; coincident instants share one jump."""
    instants = np.asarray(list(instants), dtype=np.int64)
    weights = np.asarray(list(weights), dtype=np.int64)
    times, inverse = np.unique(instants, return_inverse=True)
    jumps = np.zeros(len(times), dtype=np.int64)
    np.add.at(jumps, inverse, weights)
    return StepCurve(breakpoints=tuple(times.tolist()), values=tuple(np.cumsum(jumps).tolist()), weighting=w)


def _weights(e: Event, w: Weighting):
    if w == Weighting.CUSTOMERS:
        return [rec.customers for rec in e.members]
    return [1] * e.n


def build_outage_process(e: Event, w: Weighting = Weighting.CUSTOMERS) -> StepCurve:
    """O(t): customers (or outages) accumulated by each outage start."""
    event_bounds(e)
    return _accumulate((rec.start for rec in e.members), _weights(e, w), w)


def build_restore_process(e: Event, w: Weighting = Weighting.CUSTOMERS) -> StepCurve:
    """R(t): customers (or outages) accumulated by each restore."""
    event_bounds(e)
    return _accumulate((rec.restore for rec in e.members), _weights(e, w), w)


def performance_curve(o_curve: StepCurve, r_curve: StepCurve) -> StepCurve:
    """P(t) = O(t) - R(t) on the union of both breakpoint sets."""
    if o_curve.weighting != r_curve.weighting:
        raise CurveError(f"Cannot subtract a {r_curve.weighting.value} curve from a {o_curve.weighting.value} curve")
    if o_curve.final_level != r_curve.final_level:
        raise CurveError(f"Outage and restore curves end at different levels ({o_curve.final_level} vs {r_curve.final_level})")

    grid = np.union1d(np.asarray(o_curve.breakpoints, dtype=np.int64), np.asarray(r_curve.breakpoints, dtype=np.int64))
    levels = o_curve.values_at(grid) - r_curve.values_at(grid)
    return StepCurve(
        breakpoints=tuple(grid.tolist()),
        values=tuple(levels.tolist()),
        weighting=o_curve.weighting,
        initial=o_curve.initial - r_curve.initial,
    )


def area_minutes(c: StepCurve, start: int, end: int) -> Union[int, float]:
    """Integral of the curve over [start, end] in level-minutes; exact for integer curves."""
    if start > end:
        raise CurveError(f"Integration bounds are reversed ({start} > {end})")
    grid = np.asarray(c.breakpoints, dtype=np.int64)
    inner = grid[(grid > start) & (grid < end)]
    edges = np.concatenate(([start], inner, [end])).astype(np.int64)
    return (c.values_at(edges[:-1]) * np.diff(edges)).sum().item()


def area(c: StepCurve, start: int, end: int) -> float:
    """Integral of the curve over [start, end] in level-hours (customer-hours for P_cust)."""
    return area_minutes(c, start, end) / MINUTES_PER_HOUR


def curve_max(c: StepCurve) -> Union[int, float]:
    return max([c.initial, *c.values])


def quantile_crossing(r_curve: StepCurve, fraction: float) -> int:
    """Earliest instant at which a restore curve reaches `fraction` of its final level."""
    if not 0 < fraction <= 1:
        raise CurveError(f"Fraction must be in (0, 1], got {fraction}")
    final = r_curve.final_level
    if final <= 0:
        raise CurveError("Restore curve never rises above zero")
    # Relative tolerance so that fraction=1.0 lands on the last jump for float curves
    target = fraction * final * (1 - 1e-12)
    reached = np.nonzero(np.asarray(r_curve.values) >= target)[0]
    return int(r_curve.breakpoints[reached[0]])


def crew_levels(profile: CrewProfile, instants) -> np.ndarray:
    """C(t) at each instant; zero outside the profile."""
    instants = np.asarray(instants, dtype=np.int64)
    if profile.is_empty:
        return np.zeros(len(instants))
    starts = np.asarray([s.hour_start for s in profile.samples], dtype=np.int64)
    fte = np.asarray([s.fte for s in profile.samples], dtype=float)
    index = np.searchsorted(starts, instants, side="right") - 1
    inside = (index >= 0) & (instants < starts[np.clip(index, 0, None)] + MINUTES_PER_HOUR)
    return np.where(inside, fte[np.clip(index, 0, None)], 0.0)


def sample_curves(e: Event, profile: CrewProfile, r_prime: Optional[StepCurve] = None) -> pd.DataFrame:
    """Plot-ready samples of every process at each breakpoint and on the hourly grid from o_1."""
    o_1, _, _, r_n = event_bounds(e)
    curves = {
        "O_cust": build_outage_process(e, Weighting.CUSTOMERS),
        "R_cust": build_restore_process(e, Weighting.CUSTOMERS),
        "O_n": build_outage_process(e, Weighting.OUTAGES),
        "R_n": build_restore_process(e, Weighting.OUTAGES),
    }
    if r_prime is not None:
        curves["R_prime_cust"] = r_prime
    end = max(r_n, r_prime.breakpoints[-1]) if r_prime is not None and r_prime.breakpoints else r_n

    hourly = np.arange(o_1, end + 1, MINUTES_PER_HOUR, dtype=np.int64)
    grid = np.union1d(hourly, np.concatenate([np.asarray(c.breakpoints, dtype=np.int64) for c in curves.values()]))

    frame = pd.DataFrame({"t_iso": [to_iso(t) for t in grid], "minutes_from_o1": grid - o_1})
    frame["O_cust"] = curves["O_cust"].values_at(grid)
    frame["R_cust"] = curves["R_cust"].values_at(grid)
    frame["P_cust"] = frame["O_cust"] - frame["R_cust"]
    frame["O_n"] = curves["O_n"].values_at(grid)
    frame["R_n"] = curves["R_n"].values_at(grid)
    frame["P_n"] = frame["O_n"] - frame["R_n"]
    frame["crew_fte"] = crew_levels(profile, grid)
    if r_prime is not None:
        frame["R_prime_cust"] = r_prime.values_at(grid)
    return frame
