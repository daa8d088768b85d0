from typing import Iterable, List, Optional, Tuple

from loguru import logger

from core.exceptions.errors import EmptyEventError
from core.schemas import Event, EventSet, GroupingOptions, OutageRecord
from services.helpers.time_utils import to_iso


def extract_events(records: Iterable[OutageRecord], opts: Optional[GroupingOptions] = None) -> EventSet:
    """Group outages into events by temporal overlap.

    A record joins the current group when it starts no later than `slack` minutes after the
    latest restore seen in that group, so touching intervals share an event. Groups are
    numbered in order of o_1 before the min_outages filter; filtered groups land in
    `dropped` so they can be audited.
    """
    opts = opts or GroupingOptions()
    ordered = sorted(records, key=lambda rec: (rec.start, rec.id))

    groups: List[List[OutageRecord]] = []
    horizon = None  # latest restore of the open group
    for rec in ordered:
        if horizon is None or rec.start - horizon > opts.slack:
            groups.append([rec])
            horizon = rec.restore
        else:
            groups[-1].append(rec)
            horizon = max(horizon, rec.restore)

    events, dropped = [], []
    for ordinal, members in enumerate(groups, start=1):
        event = Event.from_members(members, ordinal=ordinal)
        (events if event.n >= opts.min_outages else dropped).append(event)

    if dropped:
        logger.info("Dropped {} event(s) with fewer than {} outage(s)", len(dropped), opts.min_outages)
    logger.debug("Grouped {} outage(s) into {} event(s)", len(ordered), len(groups))
    return EventSet(events=tuple(events), dropped=tuple(dropped))


def event_bounds(e: Event) -> Tuple[int, int, int, int]:
    """(o_1, o_n, r_1, r_n)"""
    if e.n == 0:
        raise EmptyEventError(f"Event {e.ordinal} has no outages")
    return e.o[0], e.o[-1], e.r[0], e.r[-1]


def event_summary(e: Event) -> dict:
    """JSON-ready description of one event for the `events` command."""
    o_1, o_n, r_1, r_n = event_bounds(e)
    return {
        "ordinal": e.ordinal,
        "o_1": to_iso(o_1),
        "o_n": to_iso(o_n),
        "r_1": to_iso(r_1),
        "r_n": to_iso(r_n),
        "n": e.n,
        "n_cust": e.n_cust,
        "members": e.member_ids,
    }
