#!/usr/bin/env python3
"""
Price files, synthetic paths and the universal-portfolio backtest
"""
import math
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from backtest import (
    RECORD_COLUMNS, backtest_prices, demon_prices, load_summary, random_prices,
    read_price_csv, run_backtest, save_summary, write_price_csv, write_report,
)
from errors import InputError
from market import PriceTable, ReturnMatrix, returns_from_prices
from pricing import log_price
from suite_runner import run_suite


def write_text(directory, name, text):
    path = Path(directory) / name
    path.write_text(text, encoding='utf-8')
    return path


def test_price_csv_round_trip():
    rng = np.random.default_rng(2)
    walk = random_prices(rng, 12, 3, volatility=0.2)
    # prices as a 15-digit file holds them
    table = PriceTable(walk.initial_prices, np.vectorize(lambda p: float("%.15g" % p))(walk.prices))
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "prices.csv"
        write_price_csv(table, path)
        loaded = read_price_csv(path)
    original = ["%.15g" % x for x in returns_from_prices(table).rows.ravel()]
    assert ["%.15g" % x for x in returns_from_prices(loaded).rows.ravel()] == original
    assert loaded.T == 12 and loaded.m == 3


def test_price_csv_with_dividends():
    text = "date,AAA,BBB,div_AAA,div_BBB\n2020-01-01,100,50,0,0\n2020-01-02,110,50,0,5\n"
    with tempfile.TemporaryDirectory() as tmp:
        table = read_price_csv(write_text(tmp, "divs.csv", text))
    assert table.asset_names == ('AAA', 'BBB')
    assert np.allclose(table.dividends, [[0.0, 5.0]])
    report = backtest_prices(table)
    assert report.horizon == 1
    assert report.final_wealth_hindsight == pytest.approx(1.1, rel=1e-12)


def test_price_csv_errors_name_the_line():
    cases = {
        "word.csv": ("date,A,B\n0,1,1\n1,1,abc\n", "line 3"),
        "zero.csv": ("date,A,B\n0,1,1\n1,1,1\n2,0,1\n", "line 4"),
        "header.csv": ("day,A,B\n0,1,1\n1,1,1\n", "line 1"),
        "short.csv": ("date,A\n0,1\n", "at least one session"),
    }
    with tempfile.TemporaryDirectory() as tmp:
        for name, (text, message) in cases.items():
            with pytest.raises(InputError, match=message):
                read_price_csv(write_text(tmp, name, text))
        with pytest.raises(InputError):
            read_price_csv(Path(tmp) / "missing.csv")


def test_demon_prices():
    table = demon_prices(4)
    assert np.allclose(table.prices[:, 0], [2.0, 1.0, 2.0, 1.0])
    assert np.allclose(table.prices[:, 1], 1.0)
    with pytest.raises(InputError):
        demon_prices(0)


def test_demon_backtest_growth():
    report = backtest_prices(demon_prices(30))
    summary = report.summary()
    assert abs(summary['growth_rate_hindsight'] - 0.0589) < 0.0005
    assert summary['best_stock_wealth'] == pytest.approx(1.0, rel=1e-12)
    assert summary['bound_nats'] == pytest.approx(log_price(30, 2), rel=1e-12)
    assert summary['final_regret_nats'] <= summary['bound_nats'] + 1e-9
    assert summary['final_wealth_universal'] > 1.0


def test_constant_prices_have_no_regret():
    table = PriceTable([5.0, 2.0, 7.0], np.tile([5.0, 2.0, 7.0], (6, 1)))
    report = backtest_prices(table, 'uniform')
    assert np.allclose(report.records['W_universal'], 1.0, rtol=1e-12)
    assert np.allclose(report.records['regret_nats'], 0.0, atol=1e-12)
    assert list(report.records.columns) == RECORD_COLUMNS


def test_regret_within_bound():
    rng = np.random.default_rng(31)
    for m in (2, 3):
        for prior in ('co', 'uniform'):
            for _ in range(5):
                T = int(rng.integers(2, 41))
                report = backtest_prices(random_prices(rng, T, m, volatility=0.3), prior)
                assert np.all(report.records['regret_nats'] <= report.bound_nats + 1e-9)
                assert report.bound_nats >= log_price(T, m) - 1e-12
                assert list(report.records['t']) == list(range(1, T + 1))


def test_zero_return_is_survived():
    X = ReturnMatrix([[1.0, 0.0], [1.2, 0.9], [0.8, 1.1]])
    report = run_backtest(X)
    assert report.final_wealth_universal > 0
    assert report.records['growth_universal'].iloc[0] == pytest.approx(math.log(0.5), rel=1e-12)
    with pytest.raises(InputError):
        run_backtest(X, 'beta')


def test_report_and_summary_files():
    report = backtest_prices(demon_prices(6))
    with tempfile.TemporaryDirectory() as tmp:
        summary_path = Path(tmp) / "summary.json"
        report_path = Path(tmp) / "report.csv"
        save_summary(report, summary_path)
        write_report(report, report_path)
        loaded = load_summary(summary_path)
        header = report_path.read_text(encoding='utf-8').splitlines()[0]
    assert header == ",".join(RECORD_COLUMNS)
    assert loaded['horizon'] == 6 and loaded['assets'] == 2 and loaded['prior'] == 'co'
    for key in ('final_wealth_universal', 'final_wealth_hindsight', 'final_regret_nats', 'bound_nats',
                'best_crp', 'market_beating_margin', 'growth_rate_universal', 'growth_rate_hindsight'):
        assert key in loaded
    assert len(loaded['best_crp']) == 2


def test_summary_without_a_surviving_stock():
    report = run_backtest(ReturnMatrix([[1.0, 0.0], [0.0, 1.0]]))
    summary = report.summary()
    assert summary['best_stock_wealth'] == 0.0
    assert summary['market_beating_margin'] is None
    assert summary['growth_rate_hindsight'] == pytest.approx(math.log(0.25) / 2, rel=1e-9)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "summary.json"
        save_summary(report, path)
        text = path.read_text(encoding='utf-8')
        loaded = load_summary(path)
    assert "Infinity" not in text and "NaN" not in text
    assert loaded['market_beating_margin'] is None


def main():
    return run_suite("Backtest Test Suite", globals())


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
