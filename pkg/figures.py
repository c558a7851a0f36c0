#!/usr/bin/env python3
"""
Figure Data Module
Static tables for external plotting: worst-case regret rates over (T, m),
the accuracy of Shtarkov's bound for two stocks, and the calendar time
needed against the rebalancing frequency.
"""

import asyncio
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import Config
from errors import InputError
from pricing import (
    exact_scan_limit, horizon_for_tolerance, log_price_two_stocks, log_shtarkov_bound, recurrence_columns,
)

logger = logging.getLogger(__name__)

FIGURES = ('regret', 'shtarkov', 'years')
REGRET_ASSETS = (2, 3, 4, 5)
FREQUENCIES = (1, 2, 4, 12, 52, 252)


def regret_horizons(max_T: int = 1000) -> List[int]:
    """Every T up to 100, then 40 log-spaced horizons up to max_T"""
    dense = list(range(1, min(100, max_T) + 1))
    if max_T <= 100:
        return dense
    sparse = np.unique(np.round(np.logspace(2, math.log10(max_T), 40)).astype(int))
    return sorted(set(dense) | set(int(T) for T in sparse))


def regret_cells(m: int, horizons: Sequence[int]) -> pd.DataFrame:
    """log p(T,m)/T for one m over the given horizons"""
    horizons = list(horizons)
    if m == 2:
        logs = [log_price_two_stocks(T) for T in horizons]
    else:
        column = recurrence_columns(max(horizons), m)[m - 1]
        logs = [float(column[T]) for T in horizons]
    rates = np.asarray(logs) / np.asarray(horizons)
    return pd.DataFrame({'T': horizons, 'm': m, 'regret_rate': rates, 'regret_pct': 100.0 * rates})


def shtarkov_table(max_T: int = 1000) -> pd.DataFrame:
    horizons = np.arange(1, max_T + 1)
    exact = np.exp([log_price_two_stocks(int(T)) for T in horizons])
    bound = np.exp([log_shtarkov_bound(int(T), 2) for T in horizons])
    return pd.DataFrame({'T': horizons, 'exact': exact, 'bound': bound,
                         'relative_slack': bound / exact - 1.0})


def years_table(eps: float = 0.01, m: int = 2, frequencies: Sequence[int] = FREQUENCIES) -> pd.DataFrame:
    """
    Shtarkov-bounded periods and years for every frequency; the exact-scan horizon
    sits in its own columns and is NaN where it would exceed the scan budget.
    """
    rows = []
    for f in frequencies:
        bounded = horizon_for_tolerance(eps / f, m, 'shtarkov_fixed_point')
        exact = math.nan
        if bounded.horizon <= exact_scan_limit(m):
            exact = horizon_for_tolerance(eps / f, m, 'exact_scan').horizon
        rows.append({'f': f, 'periods': bounded.horizon, 'years': bounded.horizon / f, 'method': bounded.method,
                     'exact_periods': exact, 'exact_years': exact / f})
    return pd.DataFrame(rows)


async def _regret_table(max_T: int, semaphore: asyncio.Semaphore) -> pd.DataFrame:
    horizons = regret_horizons(max_T)

    async def cell(m):
        async with semaphore:
            return await asyncio.to_thread(regret_cells, m, horizons)

    parts = await asyncio.gather(*(cell(m) for m in REGRET_ASSETS))
    return pd.concat(parts, ignore_index=True)


async def _in_thread(semaphore: asyncio.Semaphore, fn, *args) -> pd.DataFrame:
    async with semaphore:
        return await asyncio.to_thread(fn, *args)


async def build_figures(which: str = 'all', out_dir: Optional[str] = None,
                        max_T: int = 1000) -> Dict[str, Path]:
    """Compute the requested tables concurrently and write one CSV per table"""
    names = list(FIGURES) if which == 'all' else [which]
    unknown = [n for n in names if n not in FIGURES]
    if unknown:
        raise InputError(f"unknown figure {unknown[0]!r}; choose from {', '.join(FIGURES)} or all")
    out = Path(out_dir or Config.FIGURES_OUTPUT_DIR)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"cannot create output directory {out}: {e}")

    semaphore = asyncio.Semaphore(Config.FIGURE_WORKERS)
    jobs = {
        'regret': lambda: _regret_table(max_T, semaphore),
        'shtarkov': lambda: _in_thread(semaphore, shtarkov_table, max_T),
        'years': lambda: _in_thread(semaphore, years_table),
    }
    results = await asyncio.gather(*(jobs[n]() for n in names), return_exceptions=True)

    written = {}
    for name, result in zip(names, results):
        if isinstance(result, Exception):
            logger.error(f"❌ Figure {name} failed: {result}")
            raise result
        path = out / f"{name}.csv"
        try:
            result.to_csv(path, index=False, float_format=f"%.{Config.OUTPUT_DIGITS}g")
        except OSError as e:
            raise InputError(f"cannot write {path}: {e}")
        logger.info(f"✅ Wrote {len(result)} rows to {path}")
        written[name] = path
    return written
