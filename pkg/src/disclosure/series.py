"""Daily disclosure-rate series: grouping, smoothing, period stats, changepoint.

All arithmetic is plain Python float in left-to-right order, so results are
reproducible bit for bit against a straightforward reference implementation.
Days are UTC calendar days throughout.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

_ONE_DAY = dt.timedelta(days=1)


@dataclass(frozen=True, slots=True)
class DailyEntry:
    date: dt.date
    total: int
    disclosing: int
    rate: float


@dataclass(frozen=True)
class DailySeries:
    entries: tuple[DailyEntry, ...]

    def __post_init__(self) -> None:
        for prev, cur in zip(self.entries, self.entries[1:]):
            if cur.date <= prev.date:
                raise ValueError("series dates must be strictly increasing")
        for e in self.entries:
            if e.disclosing > e.total:
                raise ValueError(f"{e.date}: disclosing {e.disclosing} > total {e.total}")

    def rates(self) -> list[float]:
        return [e.rate for e in self.entries]

    def dates(self) -> list[dt.date]:
        return [e.date for e in self.entries]


@dataclass(frozen=True)
class SmoothedSeries:
    window: int
    entries: tuple[tuple[dt.date, float], ...]


def daily_rates(labels: Iterable[tuple[dt.date, bool]]) -> DailySeries:
    """Group per-record flags into a per-day series; absent days stay absent."""
    counts: dict[dt.date, list[int]] = {}
    for day, disclosing in labels:
        bucket = counts.setdefault(day, [0, 0])
        bucket[0] += 1
        if disclosing:
            bucket[1] += 1
    entries = tuple(
        DailyEntry(day, total, disc, disc / total)
        for day, (total, disc) in sorted(counts.items())
    )
    return DailySeries(entries)


def merge_day_counts(*parts: dict[dt.date, list[int]]) -> DailySeries:
    """Combine mergeable per-day [total, disclosing] counters into a series."""
    combined: dict[dt.date, list[int]] = {}
    for part in parts:
        for day, (total, disc) in part.items():
            bucket = combined.setdefault(day, [0, 0])
            bucket[0] += total
            bucket[1] += disc
    entries = tuple(
        DailyEntry(day, total, disc, disc / total)
        for day, (total, disc) in sorted(combined.items())
    )
    return DailySeries(entries)


def _contiguous_runs(series: DailySeries) -> list[list[DailyEntry]]:
    runs: list[list[DailyEntry]] = []
    for entry in series.entries:
        if runs and entry.date - runs[-1][-1].date == _ONE_DAY:
            runs[-1].append(entry)
        else:
            runs.append([entry])
    return runs


def sma(series: DailySeries, window: int) -> SmoothedSeries:
    """Trailing moving average over calendar-contiguous runs.

    A calendar gap restarts the window; the value is dated at the window's
    last day. Runs shorter than the window contribute nothing.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    out: list[tuple[dt.date, float]] = []
    for run in _contiguous_runs(series):
        rates = [e.rate for e in run]
        for i in range(window - 1, len(run)):
            out.append((run[i].date, sum(rates[i - window + 1 : i + 1]) / window))
    return SmoothedSeries(window=window, entries=tuple(out))


def period_average(
    series: DailySeries, start: dt.date, end: dt.date, pooled: bool = False
) -> float:
    """Mean of the daily rates over [start, end].

    This is the unweighted average of per-day percentages. With pooled=True
    it is instead total disclosing over total records, a sensitivity variant.
    """
    if start > end:
        raise ValueError(f"period start {start} after end {end}")
    days = [e for e in series.entries if start <= e.date <= end]
    if not days:
        raise ValueError(f"no days in range {start}..{end}")
    if pooled:
        return sum(e.disclosing for e in days) / sum(e.total for e in days)
    return sum(e.rate for e in days) / len(days)


def _mean(xs: list[float]) -> float:
    return sum(xs) / len(xs)


def _sample_var(xs: list[float], mean: float) -> float:
    return sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)


def mean_shift_changepoint(series: DailySeries) -> tuple[dt.date, float, float]:
    """Best single mean-shift split of the rate series.

    Exhaustively scores every split with at least two entries per side by
    |mean difference| / pooled sample standard deviation (an exact step
    scores infinity; a constant series scores 0). Ties go to the earliest
    split. Returns (last pre-segment date, pre-mean, post-mean).
    """
    rates = series.rates()
    n = len(rates)
    if n < 4:
        raise ValueError(f"changepoint needs >= 4 entries, got {n}")
    best_score = -1.0
    best: tuple[dt.date, float, float] | None = None
    for i in range(2, n - 1):
        pre, post = rates[:i], rates[i:]
        m1, m2 = _mean(pre), _mean(post)
        v1, v2 = _sample_var(pre, m1), _sample_var(post, m2)
        pooled_sd = (((i - 1) * v1 + (n - i - 1) * v2) / (n - 2)) ** 0.5
        diff = abs(m2 - m1)
        if pooled_sd == 0.0:
            score = float("inf") if diff > 0.0 else 0.0
        else:
            score = diff / pooled_sd
        if score > best_score:
            best_score = score
            best = (series.entries[i - 1].date, m1, m2)
    assert best is not None
    return best


def write_daily_csv(
    series: DailySeries,
    path: str | Path,
    sma_windows: tuple[int, ...] = (7, 30),
) -> None:
    """Plot-ready CSV: date, total, disclosing, rate, then one SMA column per
    window (cells empty where the average is undefined)."""
    smoothed = {w: dict(sma(series, w).entries) for w in sma_windows}
    lines = ["date,total,disclosing,rate," + ",".join(f"sma{w}" for w in sma_windows)]
    for e in series.entries:
        cells = [e.date.isoformat(), str(e.total), str(e.disclosing), repr(e.rate)]
        for w in sma_windows:
            value = smoothed[w].get(e.date)
            cells.append("" if value is None else repr(value))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def changepoint_report(series: DailySeries) -> str:
    date, pre_mean, post_mean = mean_shift_changepoint(series)
    return (
        f"changepoint_date = {date.isoformat()}\n"
        f"pre_mean = {pre_mean!r}\n"
        f"post_mean = {post_mean!r}\n"
    )
