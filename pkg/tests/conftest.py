from datetime import datetime

import pytest

from core.config.settings import get_settings
from core.schemas import CrewProfile, CrewRecord, Event, OutageRecord
from services.helpers.time_utils import to_minutes

BASE = to_minutes(datetime(2022, 6, 13))
HOUR = 60


def outages(prefix, count, start, restore, customers):
    """`count` identical outages; start and restore in minutes after BASE."""
    return [
        OutageRecord(id=f"{prefix}{i:03d}", start=BASE + start, restore=BASE + restore, customers=customers)
        for i in range(count)
    ]


def flat_crew(fte, hours, first_hour=0):
    return CrewProfile(samples=tuple(
        CrewRecord(hour_start=BASE + (first_hour + h) * HOUR, fte=fte) for h in range(hours)
    ))


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Every test starts from default settings."""
    for name in ("LOG_LEVEL", "SLACK_MIN", "MIN_OUTAGES", "CUSTOMERS_SERVED", "OUTPUT_DIR", "SYNTH_SEED", "D95_FRACTION"):
        monkeypatch.delenv(f"GRIDREPAIR_{name}", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def storm6_records():
    """850 outages shaped to the storm-6 aggregates.

    n=850, 88923 customers, outages over 29 h, first restore 34 min in, restores over 70 h,
    88923 * 8.4724 customer-hours (753380), peak 32959 customers and 501 outages out.
    """
    return (
        outages("E", 1, 0, 34, 1)
        + outages("A", 1, 0, 860, 1)
        + outages("M", 498, 0, 600, 66)
        + outages("T", 1, 0, 4234, 89)
        + outages("Q", 174, 600, 855, 160)
        + outages("R", 146, 1740, 2040, 160)
        + outages("S", 1, 1740, 1830, 284)
        + outages("U", 1, 1740, 2974, 160)
        + outages("V", 27, 1740, 4234, 160)
    )


@pytest.fixture
def storm6_event(storm6_records):
    return Event.from_members(storm6_records)


@pytest.fixture
def storm6_crew():
    """75411 crew-hours over the 70 h of restoration, then an idle hour."""
    samples = [CrewRecord(hour_start=BASE + h * HOUR, fte=1078.0 if h < 21 else 1077.0) for h in range(70)]
    samples.append(CrewRecord(hour_start=BASE + 70 * HOUR, fte=0.0))
    return CrewProfile(samples=tuple(samples))


@pytest.fixture
def two_outage_event():
    """c=(10,20) over (0,120) and (60,180) minutes."""
    return Event.from_members(outages("A", 1, 0, 120, 10) + outages("B", 1, 60, 180, 20))
