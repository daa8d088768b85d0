from datetime import datetime, timedelta
from fractions import Fraction
from typing import Union

import pandas as pd

from core.constants import ISO_MINUTE_FORMAT, MINUTES_PER_HOUR

# Instants are whole minutes since this naive wall-clock epoch
EPOCH = datetime(1970, 1, 1)
PD_EPOCH = pd.Timestamp(EPOCH)


def to_minutes(moment: datetime) -> int:
    """Whole minutes since EPOCH, truncating seconds."""
    return (moment - EPOCH) // timedelta(minutes=1)


def to_datetime(minutes: int) -> datetime:
    return EPOCH + timedelta(minutes=int(minutes))


def to_iso(minutes: int) -> str:
    """Render an instant as YYYY-MM-DDTHH:MM"""
    return to_datetime(minutes).strftime(ISO_MINUTE_FORMAT)


def to_hours(minutes: Union[int, float]) -> float:
    return minutes / MINUTES_PER_HOUR


def series_to_minutes(timestamps: pd.Series) -> pd.Series:
    """Minutes since EPOCH for a datetime series; NaT stays missing."""
    if getattr(timestamps.dt, "tz", None) is not None:
        timestamps = timestamps.dt.tz_localize(None)  # keep the wall clock as written
    return (timestamps.dt.floor("min") - PD_EPOCH) // pd.Timedelta(minutes=1)


def round_minutes(value: Union[Fraction, float]) -> int:
    """Nearest whole minute, ties to even."""
    return int(round(value))


def floor_hour(minutes: int) -> int:
    return minutes - minutes % MINUTES_PER_HOUR
