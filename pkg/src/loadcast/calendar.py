"""French holiday calendar, clock-change dates, and day-type classification.

Days are classified as normal weekdays, normal weekends, or special days in
one of seven categories:

* A/B  - national holidays ("basic special days") on a weekday / weekend
* C/D  - bridging proximity days: a Monday directly before, or a Friday
         directly after, a basic special day
* E/F  - non-bridging proximity weekdays that precede / follow a holiday
* G    - non-bridging proximity weekend days that follow a holiday

Which proximity days count as special is judgment encoded in a roster.  The
built-in French roster flags bridging Mondays/Fridays around every holiday
plus the Christmas week (21-24 and 27-30 December); within that week, weekend
days are only flagged when the other day of the same weekend is itself a
holiday (a lone Saturday or Sunday wedged against a holiday behaves
anomalously, while an ordinary post-Christmas weekend does not).  The roster
can be replaced by a config file for other markets or other judgments.
"""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass

__all__ = [
    "HolidayOccurrence",
    "DayClassification",
    "ProximityEntry",
    "CalendarError",
    "easter_date",
    "french_holidays",
    "clock_change_dates",
    "dst_phase",
    "classify_days",
    "default_proximity_days",
    "read_calendar_config",
    "write_calendar_config",
    "NORMAL_WEEKDAY",
    "NORMAL_WEEKEND",
    "SPECIAL",
    "CHRISTMAS_WEEK",
]

NORMAL_WEEKDAY = "normal-weekday"
NORMAL_WEEKEND = "normal-weekend"
SPECIAL = "special"

CHRISTMAS_WEEK = "ChristmasWeek"

# (name, month, day) fixed-date holidays; listed before the Easter-derived
# ones so that fixed dates win when a movable feast lands on one (e.g. 2008,
# when Ascension fell on 1 May).
_FIXED_HOLIDAYS = [
    ("NewYearsDay", 1, 1),
    ("LaborDay", 5, 1),
    ("VictoryDay", 5, 8),
    ("BastilleDay", 7, 14),
    ("Assumption", 8, 15),
    ("AllSaintsDay", 11, 1),
    ("RemembranceDay", 11, 11),
    ("ChristmasDay", 12, 25),
    ("BoxingDay", 12, 26),
    ("NewYearsEve", 12, 31),
]

# (name, offset from Easter Sunday in days)
_EASTER_HOLIDAYS = [
    ("EasterMonday", 1),
    ("AscensionDay", 39),
    ("WhitMonday", 50),
]

# Holidays dropped from the default roster.  The Assumption fell on a Sunday
# in 2004; a mid-August Sunday in France shows no anomalous load on top of
# the ordinary weekend dip, so the default roster does not flag it.
DEFAULT_EXCLUSIONS = frozenset({dt.date(2004, 8, 15)})


class CalendarError(ValueError):
    """Invalid calendar input (year range, config file, span coverage)."""


@dataclass(frozen=True)
class HolidayOccurrence:
    date: dt.date
    name: str

    @property
    def weekday(self) -> int:
        return self.date.weekday()

    @property
    def is_weekend(self) -> bool:
        return self.date.weekday() >= 5


@dataclass(frozen=True)
class ProximityEntry:
    """A configured special day adjacent to (or surrounding) a holiday.

    ``context`` names the holiday or named week the day is attached to;
    ``role`` is "before" or "after" relative to that context.
    """

    date: dt.date
    context: str
    role: str


@dataclass(frozen=True)
class DayClassification:
    date: dt.date
    kind: str  # NORMAL_WEEKDAY | NORMAL_WEEKEND | SPECIAL
    category: str | None = None  # "A".."G" when special
    holiday_ref: str | None = None  # holiday name or named-week context

    @property
    def is_normal(self) -> bool:
        return self.kind != SPECIAL

    @property
    def is_weekend(self) -> bool:
        return self.date.weekday() >= 5


def easter_date(year: int) -> dt.date:
    """Easter Sunday by the anonymous Gregorian computus (1583-4099)."""
    if not 1583 <= year <= 4099:
        raise CalendarError(f"year {year} outside Gregorian computus range 1583-4099")
    a = year % 19
    b = year // 100
    c = year % 100
    d = b // 4
    e = b % 4
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i = c // 4
    k = c % 4
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month = (h + l - 7 * m + 114) // 31
    day = ((h + l - 7 * m + 114) % 31) + 1
    return dt.date(year, month, day)


def french_holidays(
    year: int, exclusions: frozenset[dt.date] = DEFAULT_EXCLUSIONS
) -> list[HolidayOccurrence]:
    """The 13 basic French special days for ``year``, sorted by date.

    When a movable feast coincides with a fixed-date holiday the fixed date
    keeps the name and the movable occurrence is dropped for that year.
    """
    by_date: dict[dt.date, str] = {}
    easter = easter_date(year)
    for name, month, day in _FIXED_HOLIDAYS:
        by_date[dt.date(year, month, day)] = name
    for name, offset in _EASTER_HOLIDAYS:
        date = easter + dt.timedelta(days=offset)
        by_date.setdefault(date, name)
    return [
        HolidayOccurrence(date, name)
        for date, name in sorted(by_date.items())
        if date not in exclusions
    ]


def clock_change_dates(year: int) -> tuple[dt.date, dt.date]:
    """(spring, autumn) clock-change Sundays: last Sunday of March / October."""
    return _last_sunday(year, 3), _last_sunday(year, 10)


def _last_sunday(year: int, month: int) -> dt.date:
    last_day = dt.date(year + (month == 12), (month % 12) + 1, 1) - dt.timedelta(days=1)
    return last_day - dt.timedelta(days=(last_day.weekday() + 1) % 7)


def dst_phase(date: dt.date) -> bool:
    """True during summer time.  The spring change date itself counts as
    summer and the autumn change date as winter."""
    spring, autumn = clock_change_dates(date.year)
    return spring <= date < autumn


def default_proximity_days(
    holidays: list[HolidayOccurrence],
) -> list[ProximityEntry]:
    """Built-in proximity roster derived from a list of basic holidays.

    Per holiday: the bridging Monday before a Tuesday holiday and the
    bridging Friday after a Thursday holiday.  Around Christmas: 21-24
    December before the holidays, 27-30 December after them, weekdays
    always, weekend days only when their weekend partner is a holiday.
    Days that are themselves holidays are never listed.
    """
    holiday_dates = {h.date for h in holidays}
    years = sorted({h.date.year for h in holidays})
    entries: dict[dt.date, ProximityEntry] = {}

    def add(date: dt.date, context: str, role: str) -> None:
        if date not in holiday_dates and date not in entries:
            entries[date] = ProximityEntry(date, context, role)

    for h in holidays:
        if h.date.weekday() == 1:  # Tuesday holiday -> bridging Monday before
            add(h.date - dt.timedelta(days=1), h.name, "before")
        if h.date.weekday() == 3:  # Thursday holiday -> bridging Friday after
            add(h.date + dt.timedelta(days=1), h.name, "after")

    for year in years:
        for day, role in [(21, "before"), (22, "before"), (23, "before"), (24, "before"),
                          (27, "after"), (28, "after"), (29, "after"), (30, "after")]:
            date = dt.date(year, 12, day)
            if date.weekday() < 5:
                add(date, CHRISTMAS_WEEK, role)
            else:
                # Sat<->Sun partner of the same weekend
                partner = date + dt.timedelta(days=1 if date.weekday() == 5 else -1)
                if partner in holiday_dates:
                    add(date, CHRISTMAS_WEEK, role)
    return sorted(entries.values(), key=lambda e: e.date)


def classify_days(
    holidays: list[HolidayOccurrence],
    span: tuple[dt.date, dt.date],
    proximity: list[ProximityEntry] | None = None,
) -> dict[dt.date, DayClassification]:
    """Classify every date in ``span`` (inclusive).

    ``holidays`` must cover every year intersecting the span plus one year
    of margin on each side (proximity days look across year boundaries).
    ``proximity=None`` selects the built-in roster; pass an explicit list
    (e.g. from :func:`read_calendar_config`) to override the judgment.
    """
    start, end = span
    if start > end:
        raise CalendarError(f"empty span {start}..{end}")
    years_needed = set(range(start.year - 1, end.year + 2))
    years_have = {h.date.year for h in holidays}
    missing = years_needed - years_have
    if missing:
        raise CalendarError(
            f"holiday roster missing years {sorted(missing)} "
            "(span plus one year of margin required)"
        )

    holiday_by_date = {h.date: h for h in holidays}
    if proximity is None:
        proximity = default_proximity_days(holidays)
    prox_by_date = {e.date: e for e in proximity}

    out: dict[dt.date, DayClassification] = {}
    date = start
    one = dt.timedelta(days=1)
    while date <= end:
        if date in holiday_by_date:
            h = holiday_by_date[date]
            cat = "B" if h.is_weekend else "A"
            out[date] = DayClassification(date, SPECIAL, cat, h.name)
        elif date in prox_by_date:
            e = prox_by_date[date]
            bridging = (
                date.weekday() == 0 and (date + one) in holiday_by_date
            ) or (date.weekday() == 4 and (date - one) in holiday_by_date)
            if bridging:
                cat = "C" if e.role == "before" else "D"
            elif date.weekday() < 5:
                cat = "E" if e.role == "before" else "F"
            else:
                # only "after" weekend days exist in the built-in roster; a
                # configured "before" weekend day is filed under G as well
                cat = "G"
            out[date] = DayClassification(date, SPECIAL, cat, e.context)
        else:
            kind = NORMAL_WEEKEND if date.weekday() >= 5 else NORMAL_WEEKDAY
            out[date] = DayClassification(date, kind)
        date += one
    return out


def read_calendar_config(
    path: str,
) -> tuple[list[HolidayOccurrence], list[ProximityEntry]]:
    """Parse a calendar config file.

    Line format ``date,name,role`` with ISO dates and role in
    {basic, proximity-before, proximity-after}.  Blank lines and lines
    starting with '#' are ignored.
    """
    holidays: list[HolidayOccurrence] = []
    proximity: list[ProximityEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise CalendarError(f"{path}:{lineno}: expected 'date,name,role'")
            try:
                date = dt.date.fromisoformat(parts[0])
            except ValueError as exc:
                raise CalendarError(f"{path}:{lineno}: bad date {parts[0]!r}") from exc
            name, role = parts[1], parts[2]
            if role == "basic":
                holidays.append(HolidayOccurrence(date, name))
            elif role == "proximity-before":
                proximity.append(ProximityEntry(date, name, "before"))
            elif role == "proximity-after":
                proximity.append(ProximityEntry(date, name, "after"))
            else:
                raise CalendarError(f"{path}:{lineno}: unknown role {role!r}")
    return holidays, proximity


def write_calendar_config(
    path: str,
    holidays: list[HolidayOccurrence],
    proximity: list[ProximityEntry],
) -> None:
    """Write a roster in the same format read by :func:`read_calendar_config`."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for h in sorted(holidays, key=lambda h: h.date):
            writer.writerow([h.date.isoformat(), h.name, "basic"])
        for e in sorted(proximity, key=lambda e: e.date):
            writer.writerow([e.date.isoformat(), e.context, f"proximity-{e.role}"])
