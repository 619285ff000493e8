"""Half-hourly (or coarser) period grid anchored to calendar dates.

Every calendar day carries exactly ``periods_per_day`` observations, clock
changes included; daylight saving only influences annual lag selection, never
the grid itself.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

DAYS_PER_WEEK = 7


@dataclass(frozen=True)
class SeasonalGrid:
    """Maps integer period indices to (local date, intraday slot) pairs.

    Period 0 is slot 0 of ``series_start``; indices advance by one slot,
    rolling to the next day after ``periods_per_day`` slots.
    """

    periods_per_day: int
    series_start: dt.date
    days_per_week: int = DAYS_PER_WEEK

    def __post_init__(self) -> None:
        if self.periods_per_day < 1:
            raise ValueError("periods_per_day must be a positive integer")
        if self.days_per_week != DAYS_PER_WEEK:
            raise ValueError("grid assumes 7-day weeks")

    @property
    def periods_per_week(self) -> int:
        return self.periods_per_day * self.days_per_week

    def period_to_date(self, t: int, extent: int | None = None) -> tuple[dt.date, int]:
        """Return (date, slot) for period ``t``; inverse of :meth:`period_of`."""
        if t < 0 or (extent is not None and t >= extent):
            raise IndexError(f"period {t} outside series extent")
        day, slot = divmod(t, self.periods_per_day)
        return self.series_start + dt.timedelta(days=day), slot

    def date_of(self, t: int) -> dt.date:
        return self.series_start + dt.timedelta(days=t // self.periods_per_day)

    def slot_of(self, t: int) -> int:
        return t % self.periods_per_day

    def period_of(self, date: dt.date, slot: int = 0) -> int:
        if not 0 <= slot < self.periods_per_day:
            raise ValueError(f"slot {slot} outside [0, {self.periods_per_day})")
        day = (date - self.series_start).days
        if day < 0:
            raise IndexError(f"{date} precedes series start {self.series_start}")
        return day * self.periods_per_day + slot

    def day_start(self, date: dt.date) -> int:
        return self.period_of(date, 0)

    def slot_time(self, slot: int) -> str:
        """Wall-clock label HH:MM for the start of ``slot``."""
        minutes = slot * (24 * 60 // self.periods_per_day)
        return f"{minutes // 60:02d}:{minutes % 60:02d}"
