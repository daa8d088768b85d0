import math

import numpy as np
import pytest

from core.exceptions.errors import UndefinedMetricError
from core.schemas import CrewProfile, CrewRecord, Event, MetricStatus, OutageRecord
from services.metrics import (
    area_index,
    compare_storms,
    compute_metrics,
    crew_hours,
    render_metrics_table,
    repair_metric,
    resilience_scores,
    restoration_efficiency,
    saidi_contribution,
)
from tests.conftest import BASE, HOUR, flat_crew, outages

# storm: (n, crew hours, RE, customers, customer hours, AIR, REPAIR)
STORM_TABLE = {
    1: (1536, 142172, 1.966, 176929, 1135907, 0.808, 2.774),
    2: (1126, 49549, 1.643, 107578, 370417, 0.537, 2.180),
    3: (1267, 42399, 1.525, 128132, 282653, 0.344, 1.868),
    4: (216, 31866, 2.169, 28724, 31786, 0.044, 2.213),
    5: (2588, 118405, 1.660, 208613, 2221044, 1.027, 2.688),
    6: (850, 75411, 1.948, 88923, 753380, 0.928, 2.876),
    7: (457, 30250, 1.821, 49497, 91268, 0.266, 2.087),
    8: (347, 30816, 1.948, 38053, 80027, 0.323, 2.271),
    9: (1129, 49443, 1.641, 111156, 576270, 0.715, 2.356),
}


def test_crew_hours():
    profile = CrewProfile(samples=(
        CrewRecord(hour_start=BASE, fte=10), CrewRecord(hour_start=BASE + HOUR, fte=10), CrewRecord(hour_start=BASE + 2 * HOUR, fte=5),
    ))
    assert crew_hours(profile, BASE, BASE + 3 * HOUR) == 25
    assert crew_hours(profile, BASE + 30, BASE + HOUR + 30) == 10
    assert crew_hours(CrewProfile(), BASE, BASE + HOUR) == MetricStatus.UNAVAILABLE


def test_storm6_crew_hours(storm6_event, storm6_crew):
    assert crew_hours(storm6_crew, storm6_event.o[0], storm6_event.r[-1]) == 75411


def test_log_scores():
    assert restoration_efficiency(1000, 100) == pytest.approx(1.0)
    assert restoration_efficiency(75411, 850) == pytest.approx(1.948, abs=1e-3)
    assert restoration_efficiency(142172, 1536) == pytest.approx(1.966, abs=1e-3)
    assert area_index(100, 100) == 0.0
    assert area_index(753380, 88923) == pytest.approx(0.928, abs=1e-3)
    assert area_index(2221044, 208613) == pytest.approx(1.027, abs=1e-3)
    with pytest.raises(UndefinedMetricError):
        restoration_efficiency(10, 0)
    with pytest.raises(UndefinedMetricError):
        restoration_efficiency(0, 10)
    with pytest.raises(UndefinedMetricError):
        area_index(0, 10)


def test_repair_metric():
    assert repair_metric(1.966, 0.808) == pytest.approx(2.774)
    assert repair_metric(0, 0) == 0
    assert repair_metric(1.525, 0.344) == pytest.approx(1.869)
    assert repair_metric(MetricStatus.UNDEFINED, 0.5) == MetricStatus.UNDEFINED
    assert repair_metric(MetricStatus.UNAVAILABLE, MetricStatus.UNDEFINED) == MetricStatus.UNAVAILABLE


def test_saidi_contribution():
    assert saidi_contribution(753380, 4_000_000) == pytest.approx(0.18835, abs=1e-5)
    assert saidi_contribution(0, 1000) == 0
    assert saidi_contribution(200, 100) == 2
    with pytest.raises(UndefinedMetricError):
        saidi_contribution(200, 0)


@pytest.mark.parametrize("storm", sorted(STORM_TABLE))
def test_storm_table_scores(storm):
    n, c_crew, re, n_cust, a_cust, air, repair = STORM_TABLE[storm]
    scores = resilience_scores(n, c_crew, n_cust, a_cust)
    assert scores.re == pytest.approx(re, abs=0.002)
    assert scores.air == pytest.approx(air, abs=0.002)
    assert scores.repair == pytest.approx(repair, abs=0.002)
    assert scores.repair == scores.re + scores.air


def test_compare_storms_ranks_by_repair():
    rows = [
        {"storm": storm, "n": row[0], "crew_hours": row[1], "n_cust": row[3], "a_cust": row[4]}
        for storm, row in STORM_TABLE.items()
    ]
    frame = compare_storms(rows + [{"storm": 10, "n": 5, "crew_hours": 0, "n_cust": 5, "a_cust": 5}])
    assert frame["storm"].tolist()[:3] == [3, 7, 2]
    assert frame["storm"].iloc[-1] == 10
    assert frame["repair"].iloc[-1] == MetricStatus.UNDEFINED
    assert frame["rank"].tolist() == list(range(1, 11))


def test_storm6_metrics(storm6_event, storm6_crew):
    m = compute_metrics(storm6_event, storm6_crew)
    assert (m.n, m.n_cust) == (850, 88923)
    assert m.outage_duration_h == 29
    assert m.outage_rate == pytest.approx(29.31, abs=0.01)
    assert m.restore_delay_h == pytest.approx(0.567, abs=1e-3)
    assert m.restore_duration_h == 70
    assert m.d95_h == 49
    assert m.cust_restore_rate == pytest.approx(1270.3, abs=0.1)
    assert m.outage_restore_rate == pytest.approx(12.14, abs=0.01)
    assert m.event_duration_h == pytest.approx(m.restore_delay_h + m.restore_duration_h)
    assert m.max_cust_out == 32959
    assert m.max_outages_out == 501
    assert m.a_cust == 753380
    assert m.crew_hours == 75411
    assert m.re == pytest.approx(1.948, abs=1e-3)
    assert m.air == pytest.approx(0.928, abs=1e-3)
    assert m.repair == m.re + m.air
    assert m.saidi_contribution_h == MetricStatus.UNAVAILABLE
    assert m.o_1 == "2022-06-13T00:00"


def test_single_outage_metrics():
    e = Event.from_members(outages("S", 1, 0, 120, 100))
    m = compute_metrics(e, flat_crew(10, 2), customers_served=1000)
    assert m.n == 1
    assert m.a_cust == 200
    assert m.air == pytest.approx(math.log10(2))
    assert m.re == pytest.approx(math.log10(20))
    assert m.repair == pytest.approx(1.602, abs=1e-3)
    assert m.outage_rate == MetricStatus.UNDEFINED
    assert m.restore_duration_h == 0
    assert m.cust_restore_rate == MetricStatus.UNDEFINED
    assert m.saidi_contribution_h == pytest.approx(0.2)


def test_zero_duration_event():
    e = Event.from_members(outages("Z", 3, 0, 0, 7))
    m = compute_metrics(e, flat_crew(1, 1))
    assert m.a_cust == 0
    assert m.air == MetricStatus.UNDEFINED
    assert m.repair == MetricStatus.UNDEFINED
    assert m.event_duration_h == m.restore_duration_h == m.outage_duration_h == 0


def test_missing_crew_marks_crew_metrics_unavailable(two_outage_event):
    m = compute_metrics(two_outage_event, CrewProfile())
    assert m.crew_hours == MetricStatus.UNAVAILABLE
    assert m.re == MetricStatus.UNAVAILABLE
    assert m.repair == MetricStatus.UNAVAILABLE
    assert m.air == pytest.approx(math.log10(60 / 30))


def test_customers_served_from_settings(monkeypatch, two_outage_event):
    from core.config.settings import get_settings
    monkeypatch.setenv("GRIDREPAIR_CUSTOMERS_SERVED", "120")
    get_settings.cache_clear()
    assert compute_metrics(two_outage_event, CrewProfile()).saidi_contribution_h == pytest.approx(0.5)


def test_scaling_customers_keeps_scores():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 40))
        starts = rng.integers(0, 600, size=n)
        durations = rng.integers(1, 600, size=n)
        customers = rng.integers(1, 1000, size=n)
        factor = int(rng.integers(2, 9))
        events = [
            Event.from_members([
                OutageRecord(id=f"X{k}", start=BASE + int(s), restore=BASE + int(s + d), customers=int(c) * m)
                for k, (s, d, c) in enumerate(zip(starts, durations, customers))
            ])
            for m in (1, factor)
        ]
        crew = flat_crew(5, 24)
        base, scaled = (compute_metrics(e, crew) for e in events)
        assert scaled.air == pytest.approx(base.air, abs=1e-12)
        assert scaled.re == base.re
        assert base.d95_h <= base.restore_duration_h


def test_metrics_table_lists_rows_in_order(storm6_event, storm6_crew, two_outage_event):
    text = render_metrics_table([compute_metrics(storm6_event, storm6_crew), compute_metrics(two_outage_event, CrewProfile())])
    lines = text.splitlines()
    assert "event 1" in lines[0]
    assert lines.index("OUTAGE PROCESS METRICS") < lines.index("RESTORE PROCESS METRICS") < lines.index("PERFORMANCE CURVE METRICS")
    repair_line = next(line for line in lines if "REPAIR = RE Plus AIR" in line)
    assert "2.876" in repair_line
    assert "unavailable" in repair_line
