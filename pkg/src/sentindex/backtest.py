"""Daily backtest loop: returns, weight drift, rebalance, costs, index levels.

Each date t applies the returns earned by the weights held into t, drifts
those weights with prices, then solves for the next day's target against the
drifted prior using the lagged sentiment signal. Costs are charged on the
full turnover |target - drifted| at tc_rate and subtracted from the day's
gross return before compounding the level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path

from .optimizer import (
    OptimizerConfig,
    extract_trades,
    optimize_weights,
    optimizer_config_from_dict,
)


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[date, ...]
    companies: tuple[str, ...]  # sorted
    closes: dict[tuple[str, date], float]

    def price(self, company: str, d: date) -> float:
        return self.closes[(company, d)]


def load_prices(path: str | Path) -> PriceSeries:
    """Read a date,company,close CSV into a gap-free grid.

    Every company must have a positive close for every date; a name with
    missing rows is rejected with its first gap named.
    """
    closes: dict[tuple[str, date], float] = {}
    dates: set[date] = set()
    companies: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for name in ("date", "company", "close"):
            if name not in idx:
                raise ValueError(f"price CSV lacks a {name!r} column")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(",")
            d = date.fromisoformat(parts[idx["date"]])
            company = parts[idx["company"]]
            close = float(parts[idx["close"]])
            if close <= 0:
                raise ValueError(f"line {lineno}: nonpositive close {close!r} for {company}")
            if (company, d) in closes:
                raise ValueError(f"line {lineno}: duplicate price row for ({company}, {d})")
            closes[(company, d)] = close
            dates.add(d)
            companies.add(company)
    if not closes:
        raise ValueError("price CSV contains no rows")
    ordered_dates = tuple(sorted(dates))
    ordered_companies = tuple(sorted(companies))
    for company in ordered_companies:
        for d in ordered_dates:
            if (company, d) not in closes:
                raise ValueError(f"price series has a gap: no close for ({company}, {d})")
    return PriceSeries(dates=ordered_dates, companies=ordered_companies, closes=closes)


def load_benchmark_levels(path: str | Path) -> dict[date, float]:
    out: dict[date, float] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for name in ("date", "level"):
            if name not in idx:
                raise ValueError(f"benchmark CSV lacks a {name!r} column")
        for line in fh:
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(",")
            out[date.fromisoformat(parts[idx["date"]])] = float(parts[idx["level"]])
    return out


@dataclass(frozen=True)
class BacktestConfig:
    tc_rate: float = 0.0005
    signal_lag_days: int = 1
    initial_level: float = 100.0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self) -> None:
        if not (0.0 <= self.tc_rate < 1.0):
            raise ValueError(f"tc_rate must be in [0, 1), got {self.tc_rate}")
        if self.signal_lag_days < 0:
            raise ValueError(f"signal_lag_days must be >= 0, got {self.signal_lag_days}")
        if self.initial_level <= 0:
            raise ValueError(f"initial_level must be positive, got {self.initial_level}")


def load_backtest_config(path: str | Path) -> BacktestConfig:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    defaults = BacktestConfig()
    return BacktestConfig(
        tc_rate=float(obj.get("tc_rate", defaults.tc_rate)),
        signal_lag_days=int(obj.get("signal_lag_days", defaults.signal_lag_days)),
        initial_level=float(obj.get("initial_level", defaults.initial_level)),
        optimizer=optimizer_config_from_dict(obj.get("optimizer", {})),
    )


def simple_return(p_t: float, p_prev: float) -> float:
    if p_t <= 0 or p_prev <= 0:
        raise ValueError(f"prices must be positive, got ({p_t!r}, {p_prev!r})")
    return (p_t - p_prev) / p_prev


def drift_weights(
    w: dict[str, float], returns: dict[str, float]
) -> tuple[dict[str, float], float]:
    """Re-express weights after a day's returns; also return the gross return.

    w_drifted_i = w_i (1 + r_i) / (1 + sum_j w_j r_j). The cash remainder
    implicitly earns zero and is diluted by the same denominator. Raises when
    the portfolio return hits -100%.
    """
    keys = sorted(w)
    if sorted(returns) != keys:
        raise ValueError("weight and return key sets differ")
    r_gross = sum(w[k] * returns[k] for k in keys)
    denom = 1.0 + r_gross
    if denom <= 0:
        raise ValueError(f"portfolio wiped out: gross return {r_gross!r}")
    return {k: w[k] * (1.0 + returns[k]) / denom for k in keys}, r_gross


def transaction_costs(
    w_new: dict[str, float], w_drifted: dict[str, float], tc_rate: float
) -> tuple[float, dict[str, float]]:
    """Total cost drag tc_rate * turnover, plus the per-name components."""
    keys = sorted(w_new)
    if sorted(w_drifted) != keys:
        raise ValueError("weight key sets differ")
    per_name = {k: tc_rate * abs(w_new[k] - w_drifted[k]) for k in keys}
    total = tc_rate * sum(abs(w_new[k] - w_drifted[k]) for k in keys)
    return total, per_name


def annualized_return(levels: list[float], dates: list[date] | list[datetime]) -> float:
    """(L_end / L_start) ** (365.25 / elapsed_days) - 1 over the span."""
    if len(levels) < 2 or len(levels) != len(dates):
        raise ValueError("need at least two levels with matching dates")
    if levels[0] <= 0 or levels[-1] <= 0:
        raise ValueError(f"levels must be positive, got {levels[0]!r}, {levels[-1]!r}")
    elapsed_days = (dates[-1] - dates[0]).total_seconds() / 86400.0
    if elapsed_days <= 0:
        raise ValueError("date span must be positive")
    return (levels[-1] / levels[0]) ** (365.25 / elapsed_days) - 1.0


@dataclass
class DayRecord:
    date: date
    returns: dict[str, float]
    r_gross: float
    drifted: dict[str, float]
    weights: dict[str, float]  # target held into the next date
    trades: list[tuple[str, float]]
    cost: float
    level: float
    benchmark_level: float


@dataclass
class BacktestResult:
    dates: list[date]
    days: list[DayRecord]
    summary: dict

    @property
    def levels(self) -> list[float]:
        return [day.level for day in self.days]

    @property
    def benchmark_levels(self) -> list[float]:
        return [day.benchmark_level for day in self.days]


def _zero_signal(companies: tuple[str, ...]) -> dict[str, float]:
    return {c: 0.0 for c in companies}


def run_backtest(
    prices: PriceSeries,
    sentiments: dict[tuple[str, date], float],
    cfg: BacktestConfig | None = None,
    benchmark: dict[date, float] | None = None,
) -> BacktestResult:
    """Run the full day loop and return per-day records plus the summary.

    The first date starts from all-zero weights; its rebalance into the band
    is charged costs but excluded from trade-count statistics. The signal for
    the weights held into date t+1 is the sentiment of date t+1-lag; dates
    before the sentiment history use a zero signal. The benchmark is a
    supplied level series renormalized to the initial level, or an
    equal-weight daily-rebalanced costless basket when absent.
    """
    cfg = cfg or BacktestConfig()
    dates = list(prices.dates)
    if not dates:
        raise ValueError("empty date range")
    companies = prices.companies
    for d in dates:
        for c in companies:
            if (c, d) not in sentiments:
                raise ValueError(f"missing sentiment for ({c!r}, {d})")
    if benchmark is not None:
        for d in dates:
            if d not in benchmark:
                raise ValueError(f"benchmark series lacks {d}")
        if benchmark[dates[0]] <= 0:
            raise ValueError("benchmark must start positive")

    weights = {c: 0.0 for c in companies}
    level = cfg.initial_level
    bench_level = cfg.initial_level
    days: list[DayRecord] = []

    for i, d in enumerate(dates):
        if i == 0:
            returns = {c: 0.0 for c in companies}
        else:
            prev = dates[i - 1]
            returns = {
                c: simple_return(prices.price(c, d), prices.price(c, prev))
                for c in companies
            }
        drifted, r_gross = drift_weights(weights, returns)

        # the target held into date i+1 uses the sentiment of date i+1-lag;
        # beyond the final date (lag 0 only) there is nothing to trade on
        signal_idx = i + 1 - cfg.signal_lag_days
        if signal_idx < 0:
            signal = _zero_signal(companies)
            target = optimize_weights(signal, drifted, cfg.optimizer)
        elif signal_idx >= len(dates):
            target = dict(drifted)
        else:
            signal = {c: sentiments[(c, dates[signal_idx])] for c in companies}
            target = optimize_weights(signal, drifted, cfg.optimizer)

        cost, _ = transaction_costs(target, drifted, cfg.tc_rate)
        trades = extract_trades(target, drifted, cfg.optimizer.trade_epsilon)
        level *= 1.0 + r_gross - cost

        if benchmark is not None:
            bench_level = cfg.initial_level * benchmark[d] / benchmark[dates[0]]
        elif i > 0:
            bench_level *= 1.0 + sum(returns[c] for c in companies) / len(companies)

        days.append(DayRecord(
            date=d, returns=returns, r_gross=r_gross, drifted=drifted,
            weights=target, trades=trades, cost=cost,
            level=level, benchmark_level=bench_level,
        ))
        weights = target

    summary = _summarize(days, dates, cfg)
    return BacktestResult(dates=dates, days=days, summary=summary)


def trade_statistics(days: list[DayRecord]) -> dict:
    """Trade counts excluding the initial investment date."""
    counts = [len(day.trades) for day in days[1:]]
    histogram: dict[str, int] = {}
    for k in counts:
        if k > 0:
            histogram[str(k)] = histogram.get(str(k), 0) + 1
    return {
        "total_trades": sum(counts),
        "single_trade_days": sum(1 for k in counts if k == 1),
        "max_trades_per_day": max(counts, default=0),
        "trades_per_day": dict(sorted(histogram.items())),
        "initial_trades": len(days[0].trades) if days else 0,
    }


def _summarize(days: list[DayRecord], dates: list[date], cfg: BacktestConfig) -> dict:
    levels = [day.level for day in days]
    bench = [day.benchmark_level for day in days]
    summary = {
        "start_date": dates[0].isoformat(),
        "end_date": dates[-1].isoformat(),
        "trading_days": len(dates),
        "initial_level": cfg.initial_level,
        "final_index_level": levels[-1],
        "final_benchmark_level": bench[-1],
        "total_transaction_cost": sum(day.cost for day in days),
        "trade_stats": trade_statistics(days),
    }
    if len(dates) >= 2:
        summary["annualized_return_index"] = annualized_return(levels, dates)
        summary["annualized_return_benchmark"] = annualized_return(bench, dates)
    else:
        summary["annualized_return_index"] = 0.0
        summary["annualized_return_benchmark"] = 0.0
    return summary


def write_levels_csv(path: str | Path, result: BacktestResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,index_level,benchmark_level\n")
        for day in result.days:
            fh.write(f"{day.date.isoformat()},{day.level!r},{day.benchmark_level!r}\n")


def write_trades_csv(path: str | Path, result: BacktestResult, tc_rate: float) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,company,delta_weight,cost\n")
        for day in result.days:
            for company, delta in day.trades:
                fh.write(f"{day.date.isoformat()},{company},{delta!r},{tc_rate * abs(delta)!r}\n")


def write_summary_json(path: str | Path, result: BacktestResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_backtest_outputs(out_dir: str | Path, result: BacktestResult, cfg: BacktestConfig) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_levels_csv(out / "levels.csv", result)
    write_trades_csv(out / "trades.csv", result, cfg.tc_rate)
    write_summary_json(out / "summary.json", result)
