"""Annual-lag selection: the rule engine that picks, for every day, the
corresponding past day whose load anchors the intrayear seasonal terms.

Normal days look back 52 weeks, or 53 when that lands in the opposite
daylight-saving phase.  Special days are matched to the most recent past
special day of the same category attached to the same holiday context,
with documented fallbacks when no such precedent exists.
"""
from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass, field

from .calendar import (
    SPECIAL,
    DayClassification,
    dst_phase,
)
from .grid import SeasonalGrid

__all__ = [
    "RuleError",
    "PlanEntry",
    "AnnualLagPlan",
    "m3_normal",
    "normal_lag_weeks",
    "select_corresponding_past_day",
    "build_lag_plan",
    "resolve_lag_chain",
    "write_lag_plan_csv",
]

log = logging.getLogger(__name__)

# fallback order when a proximity category has no same-category precedent
_SIBLING_CATEGORIES = {
    "C": ["D"],
    "D": ["C"],
    "E": ["F"],
    "F": ["E"],
    "G": ["F", "E"],
}


class RuleError(ValueError):
    """No corresponding past day can be selected; treat the day as normal."""


@dataclass(frozen=True)
class PlanEntry:
    date: dt.date
    category: str | None  # None for normal days
    past_date: dt.date
    m3_periods: int
    rationale: str


@dataclass
class AnnualLagPlan:
    """Per-day annual lags over a contiguous span of classified days."""

    grid: SeasonalGrid
    start: dt.date
    end: dt.date
    entries: dict[dt.date, PlanEntry] = field(default_factory=dict)

    def entry_for_period(self, t: int) -> PlanEntry:
        date = self.grid.date_of(t)
        entry = self.entries.get(date)
        if entry is None:
            raise IndexError(f"lag plan does not cover {date}")
        return entry

    def covers(self, date: dt.date) -> bool:
        return date in self.entries


def normal_lag_weeks(date: dt.date) -> int:
    """52, or 53 when 52 weeks back sits in the opposite DST phase."""
    phase = dst_phase(date)
    if dst_phase(date - dt.timedelta(weeks=52)) == phase:
        return 52
    if dst_phase(date - dt.timedelta(weeks=53)) == phase:
        return 53
    return 52


def m3_normal(t: int, grid: SeasonalGrid) -> int:
    """Annual lag, in periods, for a normal-day period."""
    return normal_lag_weeks(grid.date_of(t)) * grid.periods_per_week


def _doy_distance(a: dt.date, b: dt.date) -> int:
    """Circular distance between two dates' positions in the year."""
    da = (a - dt.date(a.year, 1, 1)).days
    db = (b - dt.date(b.year, 1, 1)).days
    diff = abs(da - db)
    return min(diff, 365 - diff)


class _HistoryIndex:
    """Lookup tables over a classified history for rule matching."""

    def __init__(self, classifications: dict[dt.date, DayClassification]):
        self.by_holiday: dict[str, list[DayClassification]] = {}
        self.by_cat_context: dict[tuple[str, str], list[DayClassification]] = {}
        for date in sorted(classifications):
            c = classifications[date]
            if c.kind != SPECIAL:
                continue
            if c.category in ("A", "B"):
                self.by_holiday.setdefault(c.holiday_ref, []).append(c)
            self.by_cat_context.setdefault((c.category, c.holiday_ref), []).append(c)

    def basic_before(self, name: str, cutoff: dt.date) -> list[DayClassification]:
        return [c for c in self.by_holiday.get(name, []) if c.date < cutoff]

    def category_before(
        self, category: str, context: str, cutoff: dt.date
    ) -> list[DayClassification]:
        return [
            c
            for c in self.by_cat_context.get((category, context), [])
            if c.date < cutoff
        ]


def _match_basic(
    current: DayClassification, index: _HistoryIndex
) -> tuple[dt.date, str]:
    """Category A/B: most recent same-holiday occurrence of the same
    weekday/weekend class; without one, the most recent occurrence of the
    holiday regardless of class."""
    past = index.basic_before(current.holiday_ref, current.date)
    if not past:
        raise RuleError(f"no past occurrence of {current.holiday_ref}")
    same_class = [c for c in past if c.is_weekend == current.is_weekend]
    if same_class:
        chosen = same_class[-1]
        return chosen.date, f"{current.category}:same-holiday-class-match"
    chosen = past[-1]
    return chosen.date, f"{current.category}:fallback-any-class"


def _match_proximity(
    current: DayClassification, index: _HistoryIndex
) -> tuple[dt.date, str]:
    """Categories C-G: most recent year holding a same-category day in the
    same holiday context, nearest date position within that year; then
    sibling categories; then the same position in the previous year."""
    for category in [current.category] + _SIBLING_CATEGORIES[current.category]:
        candidates = index.category_before(category, current.holiday_ref, current.date)
        if not candidates:
            continue
        best_year = max(c.date.year for c in candidates)
        in_year = [c for c in candidates if c.date.year == best_year]
        chosen = min(in_year, key=lambda c: (_doy_distance(c.date, current.date), c.date))
        tag = (
            f"{current.category}:same-category-match"
            if category == current.category
            else f"{current.category}:fallback-sibling-{category}"
        )
        return chosen.date, tag
    raise RuleError(
        f"no precedent for category {current.category} near {current.holiday_ref}"
    )


def select_corresponding_past_day(
    current: DayClassification,
    classifications: dict[dt.date, DayClassification],
    grid: SeasonalGrid,
    _index: _HistoryIndex | None = None,
) -> tuple[dt.date, int, str]:
    """Pick the corresponding past special day for ``current``.

    Returns (past date, annual lag in periods, rationale tag).  Raises
    :class:`RuleError` when no past special day qualifies at all, in which
    case callers treat the day as normal.
    """
    if current.kind != SPECIAL:
        raise ValueError("select_corresponding_past_day expects a special day")
    index = _index if _index is not None else _HistoryIndex(classifications)
    if current.category in ("A", "B"):
        past_date, rationale = _match_basic(current, index)
    else:
        past_date, rationale = _match_proximity(current, index)
    m3 = (current.date - past_date).days * grid.periods_per_day
    return past_date, m3, rationale


def build_lag_plan(
    classifications: dict[dt.date, DayClassification],
    grid: SeasonalGrid,
    span: tuple[dt.date, dt.date] | None = None,
    rule_based: bool = True,
) -> AnnualLagPlan:
    """Annual lag for every classified day (or for ``span`` within them).

    ``rule_based=False`` gives every day the normal-day lag; that is the
    plan used by the plain (non-rule-based) model variants.  Special days
    without any usable precedent degrade to the normal-day lag and are
    logged instead of aborting the plan.
    """
    if not classifications:
        raise ValueError("no classifications given")
    all_dates = sorted(classifications)
    if span is None:
        start, end = all_dates[0], all_dates[-1]
    else:
        start, end = span
    plan = AnnualLagPlan(grid=grid, start=start, end=end)
    index = _HistoryIndex(classifications)
    weeks_per = grid.periods_per_week

    date = start
    one = dt.timedelta(days=1)
    while date <= end:
        c = classifications.get(date)
        if c is None:
            raise ValueError(f"classifications do not cover {date}")
        if rule_based and c.kind == SPECIAL:
            try:
                past, m3, rationale = select_corresponding_past_day(
                    c, classifications, grid, _index=index
                )
            except RuleError as exc:
                log.warning("no precedent for %s (%s); using normal lag", date, exc)
                weeks = normal_lag_weeks(date)
                past = date - dt.timedelta(weeks=weeks)
                m3 = weeks * weeks_per
                rationale = f"{c.category}:no-precedent-normal-lag"
            plan.entries[date] = PlanEntry(date, c.category, past, m3, rationale)
        else:
            weeks = normal_lag_weeks(date)
            past = date - dt.timedelta(weeks=weeks)
            category = c.category if c.kind == SPECIAL else None
            plan.entries[date] = PlanEntry(
                date, category, past, weeks * weeks_per, f"normal:{weeks}w"
            )
        date += one
    return plan


def resolve_lag_chain(t: int, plan: AnnualLagPlan, depth: int = 3) -> list[int]:
    """Cumulative annual lags for period ``t``: the first lag is the day's
    own annual lag, each further lag adds the annual lag of the day just
    reached.  The chain truncates where the plan runs out of history."""
    if not 1 <= depth <= 3:
        raise ValueError("depth must be in 1..3")
    lags: list[int] = []
    total = 0
    current = t
    for _ in range(depth):
        date = plan.grid.date_of(current)
        entry = plan.entries.get(date)
        if entry is None:
            break
        total += entry.m3_periods
        if t - total < 0:
            break
        lags.append(total)
        current = t - total
    return lags


def write_lag_plan_csv(plan: AnnualLagPlan, path: str, special_only: bool = False) -> None:
    """Audit export: ``current_date,category,past_date,m3_periods,rationale``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("current_date,category,past_date,m3_periods,rationale\n")
        for date in sorted(plan.entries):
            e = plan.entries[date]
            if special_only and e.category is None:
                continue
            fh.write(
                f"{e.date.isoformat()},{e.category or ''},{e.past_date.isoformat()},"
                f"{e.m3_periods},{e.rationale}\n"
            )
