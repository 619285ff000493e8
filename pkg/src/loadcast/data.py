"""Load-series container, CSV ingestion/validation, and profiling utilities.

The CSV schema is ``date,slot,load_mw`` with ISO dates and zero-based slots,
deliberately carrying local dates rather than wall-clock timestamps so that
clock changes cannot produce gaps or duplicates.
"""
from __future__ import annotations

import datetime as dt
import hashlib
from dataclasses import dataclass, field

import numpy as np

from .calendar import DayClassification
from .grid import SeasonalGrid

__all__ = ["DataError", "LoadSeries", "load_csv", "write_csv", "weekday_profiles",
           "compare_profiles", "series_hash"]

WEEKDAY_NAMES = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]


class DataError(ValueError):
    """Malformed or gapped input data."""


@dataclass
class LoadSeries:
    """Strictly gridded, strictly positive load values in MW."""

    grid: SeasonalGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise DataError("series values must be one-dimensional")
        if self.values.size == 0:
            raise DataError("series is empty")
        if self.values.size % self.grid.periods_per_day != 0:
            raise DataError(
                f"series length {self.values.size} is not a whole number of days "
                f"at {self.grid.periods_per_day} periods per day"
            )
        if not np.all(np.isfinite(self.values)):
            raise DataError("series contains non-finite values")
        if np.any(self.values <= 0):
            bad = int(np.argmax(self.values <= 0))
            date, slot = self.grid.period_to_date(bad)
            raise DataError(f"non-positive load at {date} slot {slot}")

    def __len__(self) -> int:
        return self.values.size

    @property
    def n_days(self) -> int:
        return self.values.size // self.grid.periods_per_day

    @property
    def start_date(self) -> dt.date:
        return self.grid.series_start

    @property
    def end_date(self) -> dt.date:
        return self.grid.series_start + dt.timedelta(days=self.n_days - 1)

    def day_values(self, date: dt.date) -> np.ndarray:
        start = self.grid.day_start(date)
        if start + self.grid.periods_per_day > len(self):
            raise DataError(f"{date} outside series {self.start_date}..{self.end_date}")
        return self.values[start : start + self.grid.periods_per_day]


def load_csv(path: str, periods_per_day: int = 48, interpolate_single_gaps: bool = False) -> LoadSeries:
    """Read and validate a ``date,slot,load_mw`` file into a LoadSeries.

    Rows must be unique per (date, slot) and values positive.  Missing
    (date, slot) cells are rejected unless ``interpolate_single_gaps`` is
    set, which fills isolated one-period holes linearly.
    """
    rows: dict[tuple[dt.date, int], float] = {}
    duplicates: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "date,slot,load_mw":
            raise DataError(f"{path}: expected header 'date,slot,load_mw', got {header!r}")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields")
            try:
                date = dt.date.fromisoformat(parts[0])
                slot = int(parts[1])
                value = float(parts[2])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if not 0 <= slot < periods_per_day:
                raise DataError(f"{path}:{lineno}: slot {slot} outside grid")
            key = (date, slot)
            if key in rows:
                duplicates.append(f"{date} slot {slot}")
            rows[key] = value
    if duplicates:
        raise DataError(f"{path}: duplicate rows at " + "; ".join(duplicates))
    if not rows:
        raise DataError(f"{path}: no data rows")

    first = min(rows)[0]
    last = max(rows)[0]
    grid = SeasonalGrid(periods_per_day=periods_per_day, series_start=first)
    n = ((last - first).days + 1) * periods_per_day
    values = np.full(n, np.nan)
    for (date, slot), v in rows.items():
        values[grid.period_of(date, slot)] = v

    missing = np.flatnonzero(np.isnan(values))
    if missing.size:
        isolated = [
            int(i)
            for i in missing
            if 0 < i < n - 1 and not np.isnan(values[i - 1]) and not np.isnan(values[i + 1])
        ]
        if interpolate_single_gaps and len(isolated) == missing.size:
            for i in isolated:
                values[i] = 0.5 * (values[i - 1] + values[i + 1])
        else:
            labels = []
            for i in missing[:10]:
                date, slot = grid.period_to_date(int(i))
                labels.append(f"{date} slot {slot}")
            raise DataError(f"{path}: missing rows at " + "; ".join(labels))
    return LoadSeries(grid=grid, values=values)


def write_csv(series: LoadSeries, path: str) -> None:
    """Write the ``date,slot,load_mw`` representation of ``series``."""
    grid = series.grid
    m1 = grid.periods_per_day
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("date,slot,load_mw\n")
        for t, v in enumerate(series.values):
            date = grid.series_start + dt.timedelta(days=t // m1)
            fh.write(f"{date.isoformat()},{t % m1},{v!r}\n")


def weekday_profiles(
    series: LoadSeries,
    classifications: dict[dt.date, DayClassification] | None = None,
    normal_only: bool = False,
) -> np.ndarray:
    """Mean intraday profile per day of week, shape (7, periods_per_day).

    With ``normal_only`` (requires classifications) special days are left
    out of the averages.
    """
    if series.n_days < 7:
        raise DataError("need at least one full week of data")
    m1 = series.grid.periods_per_day
    sums = np.zeros((7, m1))
    counts = np.zeros(7)
    for day in range(series.n_days):
        date = series.grid.series_start + dt.timedelta(days=day)
        if normal_only:
            if classifications is None:
                raise ValueError("normal_only requires classifications")
            c = classifications.get(date)
            if c is None or not c.is_normal:
                continue
        sums[date.weekday()] += series.values[day * m1 : (day + 1) * m1]
        counts[date.weekday()] += 1
    if np.any(counts == 0):
        raise DataError("some weekdays have no (qualifying) occurrences")
    return sums / counts[:, None]


def compare_profiles(series: LoadSeries, dates: list[dt.date]) -> list[list]:
    """Aligned profile table: one row per slot, one column per date.

    Returns rows ``[slot, v(dates[0]), v(dates[1]), ...]`` ready for CSV.
    """
    columns = [series.day_values(d) for d in dates]
    m1 = series.grid.periods_per_day
    return [[slot] + [col[slot] for col in columns] for slot in range(m1)]


def series_hash(series: LoadSeries, start: int = 0, end: int | None = None) -> str:
    """Content hash of a window of the series (values plus grid anchor)."""
    end = len(series) if end is None else end
    h = hashlib.sha256()
    h.update(
        f"{series.grid.periods_per_day}|{series.grid.series_start.isoformat()}|{start}|{end}|".encode()
    )
    h.update(np.ascontiguousarray(series.values[start:end]).tobytes())
    return h.hexdigest()
