import numpy as np
import pytest

from core.exceptions.errors import EmptyEventError
from core.schemas import Event, GroupingOptions, OutageRecord
from services.events import event_bounds, event_summary, extract_events
from tests.conftest import BASE, outages


def test_three_outages_two_events():
    records = outages("A", 1, 0, 120, 5) + outages("B", 1, 60, 200, 7) + outages("C", 1, 300, 360, 1)
    event_set = extract_events(records)
    assert [e.member_ids for e in event_set.events] == [["A000", "B000"], ["C000"]]
    first = event_set.events[0]
    assert (first.n, first.n_cust) == (2, 12)
    assert event_bounds(first) == (BASE, BASE + 60, BASE + 120, BASE + 200)


def test_touching_intervals_share_an_event():
    records = outages("A", 1, 0, 60, 1) + outages("B", 1, 60, 90, 1)
    assert len(extract_events(records).events) == 1


def test_slack_bridges_short_gaps():
    records = outages("A", 1, 0, 60, 1) + outages("B", 1, 75, 90, 1)
    assert len(extract_events(records).events) == 2
    assert len(extract_events(records, GroupingOptions(slack=15)).events) == 1
    assert len(extract_events(records, GroupingOptions(slack=14)).events) == 2


def test_min_outages_drops_but_keeps_ordinals():
    records = outages("A", 1, 0, 60, 1) + outages("B", 3, 120, 180, 1) + outages("C", 1, 300, 310, 1)
    event_set = extract_events(records, GroupingOptions(min_outages=2))
    assert [e.ordinal for e in event_set.events] == [2]
    assert [e.ordinal for e in event_set.dropped] == [1, 3]


def test_restores_are_sorted_independently():
    records = outages("A", 1, 0, 500, 5) + outages("B", 1, 10, 100, 7)
    e = extract_events(records).events[0]
    assert e.o == (BASE, BASE + 10)
    assert e.r == (BASE + 100, BASE + 500)


def test_empty_inputs():
    assert extract_events([]).events == ()
    with pytest.raises(EmptyEventError):
        event_bounds(Event())


def test_event_summary_is_json_ready():
    e = extract_events(outages("A", 2, 0, 30, 4)).events[0]
    summary = event_summary(e)
    assert summary["o_1"] == "2022-06-13T00:00"
    assert summary["r_n"] == "2022-06-13T00:30"
    assert summary["n_cust"] == 8


def sweep_partition(records, slack):
    """Events by sweeping a half-minute grid: a boundary wherever nothing is open."""
    end = max(rec.restore for rec in records) + slack
    covered = np.zeros(2 * (end - BASE) + 3, dtype=bool)
    for rec in records:
        covered[2 * (rec.start - BASE): 2 * (rec.restore + slack - BASE) + 1] = True
    component = np.cumsum(~covered)
    groups = {}
    for rec in records:
        groups.setdefault(component[2 * (rec.start - BASE)], set()).add(rec.id)
    return {frozenset(ids) for ids in groups.values()}


def test_grouping_matches_sweep_oracle():
    rng = np.random.default_rng(20220613)
    for _ in range(500):
        n = int(rng.integers(1, 51))
        slack = int(rng.choice([0, 0, 5, 30]))
        starts = rng.integers(0, 2000, size=n)
        durations = rng.integers(0, 120, size=n)
        records = [
            OutageRecord(id=f"X{k}", start=BASE + int(s), restore=BASE + int(s + d), customers=1)
            for k, (s, d) in enumerate(zip(starts, durations))
        ]
        found = {frozenset(e.member_ids) for e in extract_events(records, GroupingOptions(slack=slack)).events}
        assert found == sweep_partition(records, slack)


def test_reextracting_an_event_is_idempotent():
    rng = np.random.default_rng(613)
    for _ in range(200):
        n = int(rng.integers(1, 41))
        slack = int(rng.choice([0, 1, 5, 30]))
        starts = rng.integers(0, 2000, size=n)
        durations = rng.integers(0, 120, size=n)
        customers = rng.integers(0, 500, size=n)
        records = [
            OutageRecord(id=f"X{k}", start=BASE + int(s), restore=BASE + int(s + d), customers=int(c))
            for k, (s, d, c) in enumerate(zip(starts, durations, customers))
        ]
        options = GroupingOptions(slack=slack)
        for e in extract_events(records, options).events:
            again = extract_events(list(e.members), options).events
            assert len(again) == 1
            assert event_bounds(again[0]) == event_bounds(e)
            assert (again[0].n, again[0].n_cust) == (e.n, e.n_cust)
            assert sorted(again[0].member_ids) == sorted(e.member_ids)
