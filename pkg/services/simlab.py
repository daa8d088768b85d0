"""Synthetic storms and a crew-limited restoration simulator.

Every random draw comes from `numpy.random.Generator(numpy.random.PCG64(seed))`, so a seed
names one fixed stream on any platform running the same numpy release.
"""
import json
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from collections import deque
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import ValidationError

from core.config.settings import get_settings
from core.constants import MINUTES_PER_HOUR
from core.exceptions.errors import ConfigError, InputFileError, UnfinishedTicketsError
from core.schemas import (
    CrewProfile,
    CrewRecord,
    CrewSegment,
    DispatchPolicy,
    FixedCustomers,
    FixedWork,
    GammaWork,
    OutageRecord,
    RestorationSchedule,
    StormModel,
    StormOutage,
    SynthConfig,
    UniformCustomers,
    UniformWork,
)
from services.helpers.time_utils import round_minutes, to_minutes
from services.processes import crew_levels

# Remaining work below this many crew-hours counts as done
WORK_TOLERANCE = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def replicate_seeds(seed: int, k: int) -> List[int]:
    """k independent child seeds of `seed`, one per replicate."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(k)]


def _draw_customers(dist, rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(dist, FixedCustomers):
        return np.full(size, dist.value, dtype=np.int64)
    if isinstance(dist, UniformCustomers):
        return rng.integers(dist.low, dist.high, endpoint=True, size=size)
    return np.minimum(dist.cap, dist.scale * rng.zipf(dist.a, size=size))


def _draw_work(dist, rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(dist, FixedWork):
        return np.full(size, dist.value, dtype=float)
    if isinstance(dist, UniformWork):
        return rng.uniform(dist.low, dist.high, size=size)
    if isinstance(dist, GammaWork):
        return rng.gamma(dist.shape, dist.scale, size=size)
    raise ConfigError(f"Unknown repair distribution {dist!r}")


def generate_storm(m: StormModel) -> List[StormOutage]:
    """Outage tickets of one synthetic storm, in start order.

    Candidate arrivals come from a homogeneous Poisson process at the peak rate and are
    kept with probability rate(t) / peak. Starts are truncated to whole minutes after
    `m.origin`.
    """
    seed = get_settings().SYNTH_SEED if m.seed is None else m.seed
    rng = make_rng(seed)
    rates = np.asarray([seg.rate for seg in m.intensity], dtype=float)
    edges = np.cumsum([seg.hours for seg in m.intensity])
    peak = rates.max(initial=0.0)
    if peak == 0:
        logger.info("Storm intensity is zero everywhere; no outages generated")
        return []

    candidates = np.sort(rng.uniform(0.0, m.horizon_h, size=rng.poisson(peak * m.horizon_h)))
    segment = np.minimum(np.searchsorted(edges, candidates, side="right"), len(rates) - 1)
    keep = rng.uniform(size=len(candidates)) <= rates[segment] / peak
    arrivals_h = candidates[keep]

    customers = _draw_customers(m.customer_dist, rng, len(arrivals_h))
    work = _draw_work(m.repair_dist, rng, len(arrivals_h))
    origin = to_minutes(m.origin)

    outages = [
        StormOutage(id=f"O{k:05d}", start=origin + int(math.floor(t * MINUTES_PER_HOUR)), customers=int(c), repair_work=float(w))
        for k, (t, c, w) in enumerate(zip(arrivals_h, customers, work), start=1)
    ]
    logger.info("Generated {} outage(s) from {} candidate(s) with seed {}", len(outages), len(candidates), seed)
    return outages


def build_crew_profile(segments: Iterable[CrewSegment], start: int) -> CrewProfile:
    """Hourly profile holding each segment's fte for its number of hours, from `start`."""
    samples, hour = [], start
    for seg in segments:
        for _ in range(seg.hours):
            samples.append(CrewRecord(hour_start=hour, fte=seg.fte))
            hour += MINUTES_PER_HOUR
    return CrewProfile(samples=tuple(samples))


def _policy_key(policy: DispatchPolicy):
    if policy == DispatchPolicy.LARGEST_CUSTOMERS_FIRST:
        return lambda tk: (-tk.customers, tk.start, tk.id)
    return lambda tk: (tk.start, tk.id)


def simulate_schedule(outages: Sequence[StormOutage], p: CrewProfile, policy: DispatchPolicy = DispatchPolicy.CHRONOLOGICAL) -> RestorationSchedule:
    """Work-conserving dispatch of crews to open tickets.

    Between decision instants (arrivals, hour boundaries, completions) open tickets are
    ranked by `policy`; the ticket ranked i works at min(1, max(0, C(t) - i)) crew-hours per
    hour, so a ticket holds at most one team and spare capacity flows down the ranking. A
    ticket outranked by a new arrival keeps its progress. Completion instants are rounded
    to whole minutes, ties to even.
    """
    key = _policy_key(policy)
    pending = deque(sorted(outages, key=lambda tk: (tk.start, tk.id)))
    remaining: Dict[str, float] = {tk.id: tk.repair_work for tk in outages}
    allocated: Dict[str, float] = {tk.id: 0.0 for tk in outages}
    finished: Dict[str, float] = {}
    crew_end = p.end if not p.is_empty else None

    open_tickets: List[StormOutage] = []
    t = float(pending[0].start) if pending else 0.0
    while pending or open_tickets:
        while pending and pending[0].start <= t:
            open_tickets.append(pending.popleft())
        for tk in [tk for tk in open_tickets if remaining[tk.id] <= WORK_TOLERANCE]:
            finished[tk.id] = t
            open_tickets.remove(tk)
        if not open_tickets:
            if pending:
                t = float(pending[0].start)
            continue

        fte = float(crew_levels(p, [math.floor(t)])[0])
        ranked = sorted(open_tickets, key=key)
        rates = [min(1.0, max(0.0, fte - i)) for i in range(len(ranked))]

        if not any(rates) and not pending and (crew_end is None or t >= crew_end):
            stuck = sorted(tk.id for tk in open_tickets)
            logger.error("Simulation stopped with {} unfinished ticket(s)", len(stuck))
            raise UnfinishedTicketsError(stuck)

        candidates = [(math.floor(t / MINUTES_PER_HOUR) + 1) * MINUTES_PER_HOUR]
        if pending:
            candidates.append(pending[0].start)
        candidates += [t + remaining[tk.id] / rate * MINUTES_PER_HOUR for tk, rate in zip(ranked, rates) if rate > 0]
        t_next = min(candidates)

        for tk, rate in zip(ranked, rates):
            done = min(remaining[tk.id], rate * (t_next - t) / MINUTES_PER_HOUR)
            remaining[tk.id] -= done
            allocated[tk.id] += done
        t = t_next

    records = sorted(
        (OutageRecord(id=tk.id, start=tk.start, restore=max(tk.start, round_minutes(finished[tk.id])), customers=tk.customers) for tk in outages),
        key=lambda rec: (rec.start, rec.id),
    )
    return RestorationSchedule(records=tuple(records), allocated=allocated)


def simulate_restoration(outages: Sequence[StormOutage], p: CrewProfile, policy: DispatchPolicy = DispatchPolicy.CHRONOLOGICAL) -> List[OutageRecord]:
    return list(simulate_schedule(outages, p, policy).records)


def load_synth_config(path: Union[str, Path]) -> SynthConfig:
    """Read a synth config from TOML or JSON (chosen by suffix)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputFileError(f"Cannot read {path}: {e}")
    try:
        raw = json.loads(text) if path.suffix.lower() == ".json" else tomllib.loads(text)
        return SynthConfig.model_validate(raw)
    except (ValueError, ValidationError) as e:
        raise ConfigError(f"Invalid synth config {path}: {e}")


def synthesize(cfg: SynthConfig) -> Tuple[List[OutageRecord], CrewProfile, Dict[str, float]]:
    """Storm, crew profile and simulated restoration of one synth config.

    Returns the restored outage records, the crew profile and the repair work per ticket.
    """
    storm = generate_storm(cfg.storm)
    profile = build_crew_profile(cfg.crew, to_minutes(cfg.storm.origin) + cfg.crew_offset_h * MINUTES_PER_HOUR)
    records = simulate_restoration(storm, profile, cfg.policy)
    return records, profile, {tk.id: tk.repair_work for tk in storm}
