"""Daily sentiment aggregation: cutoff calendar mapping, means, source adjustment.

Scored articles are pushed onto trading days (publications at or after the
local cutoff count for the next day, weekends roll forward), averaged per
company and day with zero-fill for quiet days, then shrunk toward zero when
today's unique-source count falls below the company's historical mean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

from .sentiment import ScoredArticle

HISTORY_MODES = ("nonzero_days", "all_days")


@dataclass(frozen=True)
class TradingCalendar:
    dates: tuple[date, ...]
    timezone: str = "Europe/Berlin"
    cutoff: time = time(17, 0)

    def __post_init__(self) -> None:
        if not self.dates:
            raise ValueError("calendar has no trading dates")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("trading dates must be strictly increasing")
        ZoneInfo(self.timezone)  # fail fast on unknown zone names

    @property
    def tzinfo(self) -> ZoneInfo:
        return ZoneInfo(self.timezone)


@dataclass(frozen=True)
class AggregationConfig:
    market_timezone: str = "Europe/Berlin"
    cutoff_local_time: str = "17:00"
    adjustment_history: str = "nonzero_days"

    def __post_init__(self) -> None:
        if self.adjustment_history not in HISTORY_MODES:
            raise ValueError(
                f"adjustment_history must be one of {HISTORY_MODES}, got {self.adjustment_history!r}")

    @property
    def cutoff(self) -> time:
        hh, mm = self.cutoff_local_time.split(":")
        return time(int(hh), int(mm))


def load_aggregation_config(path: str | Path) -> AggregationConfig:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return AggregationConfig(
        market_timezone=obj.get("market_timezone", "Europe/Berlin"),
        cutoff_local_time=obj.get("cutoff_local_time", "17:00"),
        adjustment_history=obj.get("adjustment_history", "nonzero_days"),
    )


@dataclass(frozen=True)
class DailySentiment:
    company_id: str
    trading_date: date
    raw_mean: float
    adjusted: float
    article_count: int
    unique_sources: int
    adjustment: float


def effective_trading_date(
    published_at: datetime, calendar: TradingCalendar
) -> tuple[date | None, str | None]:
    """Map a publication instant to its trading date.

    Returns (trading date, diagnostic). At or after the cutoff in market local
    time advances to the next calendar day; the result then rolls forward to
    the first trading date on or after it. Before-range timestamps land on the
    first trading date with a diagnostic; after-range ones return (None,
    diagnostic) and must be dropped by the caller.
    """
    local = published_at.astimezone(calendar.tzinfo)
    day = local.date()
    if local.time() >= calendar.cutoff:
        day += timedelta(days=1)
    if day < calendar.dates[0]:
        return calendar.dates[0], f"published {published_at.isoformat()} precedes the calendar"
    for trading_date in calendar.dates:
        if trading_date >= day:
            return trading_date, None
    return None, f"published {published_at.isoformat()} falls after the final trading date"


def source_adjustment(u_today: int, prior_counts: list[int]) -> float:
    """Shrink factor from today's unique-source count vs. the historical mean.

    With no history the factor is 1. Otherwise u/mean(prior) when below the
    mean, else 1; always in (0, 1] given u_today >= 1.
    """
    if u_today < 1:
        raise ValueError(f"u_today must be >= 1, got {u_today}")
    if not prior_counts:
        return 1.0
    m = sum(prior_counts) / len(prior_counts)
    if u_today < m:
        return u_today / m
    return 1.0


@dataclass
class AggregationResult:
    rows: list[DailySentiment]  # ordered by (trading date, company id)
    diagnostics: list[str] = field(default_factory=list)
    dropped_after_range: int = 0


def aggregate_daily(
    scored: list[ScoredArticle],
    universe: list[str],
    calendar: TradingCalendar,
    config: AggregationConfig | None = None,
) -> AggregationResult:
    """Build the complete (company, trading date) sentiment grid.

    Per company and date: raw mean of article scores in input order, unique
    source count, adjustment from the per-company history scan, adjusted =
    raw * adjustment. Companies and dates with no articles get all-zero rows,
    so the grid always has |universe| * |dates| entries.
    """
    config = config or AggregationConfig()
    result = AggregationResult(rows=[])
    groups: dict[tuple[str, date], dict] = {}
    for record in scored:
        trading_date, diagnostic = effective_trading_date(record.published_at, calendar)
        if diagnostic is not None:
            result.diagnostics.append(f"article {record.id}: {diagnostic}")
        if trading_date is None:
            result.dropped_after_range += 1
            continue
        group = groups.setdefault((record.company_id, trading_date), {"scores": [], "sources": set()})
        group["scores"].append(record.score)
        group["sources"].add(record.source)

    by_key: dict[tuple[str, date], DailySentiment] = {}
    for company in sorted(universe):
        history: list[int] = []
        for trading_date in calendar.dates:
            group = groups.get((company, trading_date))
            if group:
                scores = group["scores"]
                raw = sum(scores) / len(scores)
                u = len(group["sources"])
                adj = source_adjustment(u, history)
                row = DailySentiment(
                    company_id=company, trading_date=trading_date,
                    raw_mean=raw, adjusted=raw * adj,
                    article_count=len(scores), unique_sources=u, adjustment=adj,
                )
                history.append(u)
            else:
                row = DailySentiment(
                    company_id=company, trading_date=trading_date,
                    raw_mean=0.0, adjusted=0.0,
                    article_count=0, unique_sources=0, adjustment=1.0,
                )
                if config.adjustment_history == "all_days":
                    history.append(0)
            by_key[(company, trading_date)] = row
    result.rows = [
        by_key[(company, trading_date)]
        for trading_date in calendar.dates
        for company in sorted(universe)
    ]
    return result


def write_daily_sentiment_csv(path: str | Path, result: AggregationResult) -> None:
    # repr() keeps the shortest round-trippable float text, so re-reading the
    # file reproduces the values bit for bit
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,company,raw_mean,unique_sources,adjustment,adjusted\n")
        for row in result.rows:
            fh.write(
                f"{row.trading_date.isoformat()},{row.company_id},{row.raw_mean!r},"
                f"{row.unique_sources},{row.adjustment!r},{row.adjusted!r}\n")


def load_daily_sentiment_csv(path: str | Path) -> dict[tuple[str, date], float]:
    """Read the adjusted-sentiment column back as a (company, date) map."""
    out: dict[tuple[str, date], float] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for name in ("date", "company", "adjusted"):
            if name not in idx:
                raise ValueError(f"sentiment CSV lacks a {name!r} column")
        for line in fh:
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(",")
            out[(parts[idx["company"]], date.fromisoformat(parts[idx["date"]]))] = (
                float(parts[idx["adjusted"]]))
    return out
