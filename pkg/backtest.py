#!/usr/bin/env python3
"""
Backtest Module
Price CSV ingestion and emission, synthetic price paths, and the
universal-portfolio backtest that tracks regret against the best
rebalancing rule in hindsight.

Price CSV layout: header `date,<asset>...[,div_<asset>...]`, first data row
holds the initial prices S_0, every further row one session close.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from benchmarks import BestCrpResult, best_crp
from config import Config
from errors import InputError
from market import PriceTable, ReturnMatrix, returns_from_prices
from multilinear import (
    SymmetricReplicator, cover_superhedge_log_deposit,
    prior_cover_ordentlich, prior_cover_uniform,
)

logger = logging.getLogger(__name__)

PRIORS = ('co', 'uniform')
RECORD_COLUMNS = ['t', 'W_universal', 'D_hindsight', 'regret_nats', 'bound_nats',
                  'growth_universal', 'growth_hindsight']
CSV_DIGITS = 15

PathLike = Union[str, Path]


# =============================
# Price files
# =============================

def _parse_numbers(frame: pd.DataFrame, what: str) -> np.ndarray:
    values = frame.apply(pd.to_numeric, errors='coerce')
    bad = np.argwhere(values.isna().to_numpy())
    if bad.size:
        row, col = bad[0]
        raise InputError(f"line {row + 2}: {what} column {frame.columns[col]!r} "
                         f"holds {frame.iat[row, col]!r}, not a number")
    return values.to_numpy(dtype=float)


def read_price_csv(path: PathLike) -> PriceTable:
    """Load a price file; errors name the offending line (the header is line 1)"""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError:
        raise InputError(f"price file {path} not found")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InputError(f"malformed price file {path}: {e}")

    columns = [str(c).strip() for c in frame.columns]
    if not columns or columns[0].lower() != 'date':
        raise InputError(f"line 1: first column must be 'date', got {columns[:1]}")
    dividend_columns = [c for c in columns[1:] if c.startswith('div_')]
    asset_columns = [c for c in columns[1:] if not c.startswith('div_')]
    if not asset_columns:
        raise InputError("line 1: no asset columns")
    if dividend_columns and len(dividend_columns) != len(asset_columns):
        raise InputError(f"line 1: {len(asset_columns)} asset columns but {len(dividend_columns)} dividend columns")
    if columns[1:] != asset_columns + dividend_columns:
        raise InputError("line 1: dividend columns must follow every asset column")
    if len(frame) < 2:
        raise InputError(f"price file {path} needs initial prices plus at least one session")
    frame.columns = columns

    prices = _parse_numbers(frame[asset_columns], "price")
    bad = np.argwhere(~(prices > 0))
    if bad.size:
        row, col = bad[0]
        raise InputError(f"line {row + 2}: nonpositive price {prices[row, col]!r} for {asset_columns[col]}")
    dividends = None
    if dividend_columns:
        dividends = _parse_numbers(frame[dividend_columns], "dividend")[1:]
        if np.any(dividends < 0):
            row = int(np.argwhere(dividends < 0)[0][0])
            raise InputError(f"line {row + 3}: negative dividend")

    logger.info(f"✅ Loaded {len(frame) - 1} sessions of {len(asset_columns)} assets from {path}")
    return PriceTable(prices[0], prices[1:], dividends, tuple(asset_columns))


def write_price_csv(table: PriceTable, path: PathLike, dates: Optional[Sequence[str]] = None):
    """Emit prices (and dividends, when any are nonzero) with 15 significant digits"""
    dates = list(dates) if dates is not None else [str(t) for t in range(table.T + 1)]
    if len(dates) != table.T + 1:
        raise InputError(f"need {table.T + 1} dates, got {len(dates)}")
    frame = pd.DataFrame(np.vstack([table.initial_prices, table.prices]), columns=list(table.asset_names))
    if np.any(table.dividends != 0):
        divs = np.vstack([np.zeros(table.m), table.dividends])
        for j, name in enumerate(table.asset_names):
            frame[f"div_{name}"] = divs[:, j]
    frame.insert(0, 'date', dates)
    _write_frame(frame, path, CSV_DIGITS)


def _write_frame(frame: pd.DataFrame, path: PathLike, digits: int):
    try:
        frame.to_csv(path, index=False, float_format=f"%.{digits}g")
    except (OSError, ValueError) as e:
        raise InputError(f"cannot write {path}: {e}")


def demon_prices(T: int) -> PriceTable:
    """Asset 1 alternately doubles and halves, asset 2 is cash"""
    if T < 1:
        raise InputError(f"need at least one session, got {T}")
    factors = np.where(np.arange(1, T + 1) % 2 == 1, 2.0, 0.5)
    stock = np.cumprod(factors)
    return PriceTable([1.0, 1.0], np.column_stack([stock, np.ones(T)]), asset_names=('stock', 'cash'))


def random_prices(rng: np.random.Generator, T: int, m: int, volatility: float = 0.1) -> PriceTable:
    """Geometric random walk started at 1 with lognormal steps"""
    steps = np.exp(volatility * rng.standard_normal((T, m)) - 0.5 * volatility ** 2)
    return PriceTable(np.ones(m), np.cumprod(steps, axis=0))


# =============================
# Backtest
# =============================

@dataclass(frozen=True)
class BacktestReport:
    """Per-session records plus the final summary of one backtest"""
    records: pd.DataFrame
    prior: str
    assets: int
    horizon: int
    bound_nats: float
    best_crp: BestCrpResult
    best_stock_wealth: float

    @property
    def final_regret(self) -> float:
        return float(self.records['regret_nats'].iloc[-1])

    @property
    def final_wealth_universal(self) -> float:
        return float(self.records['W_universal'].iloc[-1])

    @property
    def final_wealth_hindsight(self) -> float:
        return float(self.records['D_hindsight'].iloc[-1])

    def summary(self) -> Dict:
        """Final figures; infinite margins and rates are reported as None so the JSON stays standard"""
        W, D = self.final_wealth_universal, self.final_wealth_hindsight
        log_W = math.log(W) if W > 0 else -math.inf
        summary = {
            'assets': self.assets,
            'horizon': self.horizon,
            'prior': self.prior,
            'final_wealth_universal': W,
            'final_wealth_hindsight': D,
            'final_regret_nats': self.final_regret,
            'bound_nats': self.bound_nats,
            'best_crp': [float(c) for c in self.best_crp.maximizer.weights],
            'best_stock_wealth': self.best_stock_wealth,
            'market_beating_margin': (math.log(D) - math.log(self.best_stock_wealth)) / self.horizon
            if self.best_stock_wealth > 0 else math.inf,
            'growth_rate_universal': log_W / self.horizon,
            'growth_rate_hindsight': math.log(D) / self.horizon,
        }
        return {key: None if isinstance(value, float) and not math.isfinite(value) else value
                for key, value in summary.items()}


def run_backtest(X: ReturnMatrix, prior: str = 'co', tol: Optional[float] = None) -> BacktestReport:
    """
    Trade the symmetric-prior universal portfolio over X, one sigma stage per
    session, and compare with the best rebalancing rule on every prefix.
    """
    if prior == 'co':
        alpha = prior_cover_ordentlich(X.T, X.m)
    elif prior == 'uniform':
        alpha = prior_cover_uniform(X.T, X.m)
    else:
        raise InputError(f"unknown prior {prior!r}; choose from {', '.join(PRIORS)}")
    bound = cover_superhedge_log_deposit(alpha)
    replicator = SymmetricReplicator(alpha)

    records = []
    log_hindsight = 0.0
    hindsight = None
    for t in range(1, X.T + 1):
        growth = replicator.observe(X.rows[t - 1])
        hindsight = best_crp(ReturnMatrix(X.prefix(t)), tol)
        previous, log_hindsight = log_hindsight, math.log(hindsight.value)
        log_W = replicator.log_wealth
        records.append({
            't': t,
            'W_universal': math.exp(log_W),
            'D_hindsight': hindsight.value,
            'regret_nats': log_hindsight - log_W,
            'bound_nats': bound,
            'growth_universal': math.log(growth) if growth > 0 else -math.inf,
            'growth_hindsight': log_hindsight - previous,
        })
        logger.debug(f"📊 t={t}: W={math.exp(log_W):.6g} D={hindsight.value:.6g}")

    frame = pd.DataFrame.from_records(records, columns=RECORD_COLUMNS)
    worst = float(frame['regret_nats'].max())
    if worst > bound + 1e-9:
        logger.warning(f"⚠️  regret {worst:.12g} exceeds the bound {bound:.12g}")
    logger.info(f"✅ Backtest done: T={X.T}, m={X.m}, prior={prior}, final regret {frame['regret_nats'].iloc[-1]:.6g} nats")
    with np.errstate(divide='ignore'):
        best_stock = float(np.exp(np.max(np.log(X.rows).sum(axis=0))))
    return BacktestReport(frame, prior, X.m, X.T, bound, hindsight, best_stock)


def backtest_prices(table: PriceTable, prior: str = 'co', tol: Optional[float] = None) -> BacktestReport:
    return run_backtest(returns_from_prices(table), prior, tol)


def write_report(report: BacktestReport, path: PathLike):
    _write_frame(report.records, path, Config.OUTPUT_DIGITS)


def save_summary(report: BacktestReport, path: PathLike):
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(report.summary(), f, indent=4, ensure_ascii=False, allow_nan=False)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}")


def load_summary(path: PathLike) -> Dict:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read summary {path}: {e}")
