#!/usr/bin/env python3
"""
Superhedging Toolkit - Main Entry Point

Subcommands:
  price     p(T,m) by a chosen formula, or Shtarkov's bound
  horizon   smallest horizon guaranteeing a regret rate, optionally per frequency
  backtest  run the universal portfolio over a price file and report regret
  figures   emit the figure data tables as CSV
"""

import argparse
import asyncio
import logging
import math
import sys
from typing import Optional, Sequence

from config import Config
from errors import EXIT_INPUT, EXIT_OK, SuperhedgeError
from backtest import (
    PRIORS, backtest_prices, demon_prices, read_price_csv, save_summary, write_report,
)
from figures import FIGURES, build_figures
from pricing import HORIZON_METHODS, METHODS, horizon_for_frequency, horizon_for_tolerance, log_price

logger = logging.getLogger(__name__)


def fmt(value: float) -> str:
    return f"{value:.{Config.OUTPUT_DIGITS}g}"


def cmd_price(args) -> int:
    log_p = log_price(args.T, args.m, args.method)
    rate = log_p / args.T
    label = "Shtarkov bound" if args.method == 'shtarkov' else "p"
    print(f"{label}({args.T},{args.m}) = {fmt(math.exp(log_p))}")
    print(f"log/T = {fmt(rate)} nats/period ({fmt(100.0 * rate)}% as nats x 100)")
    return EXIT_OK


def cmd_horizon(args) -> int:
    if args.freq is not None:
        result = horizon_for_frequency(args.eps, args.m, args.freq)
    else:
        result = horizon_for_tolerance(args.eps, args.m, args.method)
    print(f"T_eps = {result.horizon} ({result.method})")
    print(f"achieved rate = {fmt(result.achieved_rate)} nats/period")
    if args.freq is not None:
        print(f"years = {fmt(result.horizon / args.freq)} at {args.freq} rebalancings per year")
    return EXIT_OK


def cmd_backtest(args) -> int:
    if args.synthetic == 'demon':
        table = demon_prices(args.periods)
    elif args.prices:
        table = read_price_csv(args.prices)
    else:
        print("❌ backtest needs a price file or --synthetic demon", file=sys.stderr)
        return EXIT_INPUT

    report = backtest_prices(table, args.prior)
    if args.out:
        write_report(report, args.out)
        print(f"✅ Report written to {args.out}")
    if args.summary:
        save_summary(report, args.summary)
        print(f"✅ Summary written to {args.summary}")

    summary = report.summary()
    print(f"final wealth (universal) = {fmt(summary['final_wealth_universal'])}")
    print(f"final wealth (best CRP)  = {fmt(summary['final_wealth_hindsight'])}")
    print(f"final regret = {fmt(summary['final_regret_nats'])} nats (bound {fmt(summary['bound_nats'])})")
    print(f"best CRP growth = {fmt(summary['growth_rate_hindsight'])} nats/period")
    return EXIT_OK


def cmd_figures(args) -> int:
    written = asyncio.run(build_figures(args.which, args.out, args.max_T))
    for name, path in written.items():
        print(f"✅ {name}: {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Superhedging prices and universal portfolios")
    sub = parser.add_subparsers(dest='command', required=True)

    price = sub.add_parser('price', help="superhedging price of Cover's Derivative")
    price.add_argument('T', type=int, help="horizon (sessions)")
    price.add_argument('m', type=int, help="number of assets")
    price.add_argument('--method', choices=('auto',) + METHODS, default='auto')
    price.set_defaults(handler=cmd_price)

    horizon = sub.add_parser('horizon', help="smallest horizon with log p(T,m)/T <= eps")
    horizon.add_argument('eps', type=float, help="regret rate in nats per period (per year with --freq)")
    horizon.add_argument('m', type=int, help="number of assets")
    horizon.add_argument('--method', choices=HORIZON_METHODS, default='exact_scan')
    horizon.add_argument('--freq', type=int, default=None, help="rebalancings per year")
    horizon.set_defaults(handler=cmd_horizon)

    backtest = sub.add_parser('backtest', help="universal portfolio backtest on a price file")
    backtest.add_argument('prices', nargs='?', help="CSV with header date,<assets>[,div_<assets>]")
    backtest.add_argument('--prior', choices=PRIORS, default='co')
    backtest.add_argument('--out', help="per-session report CSV")
    backtest.add_argument('--summary', help="JSON summary file")
    backtest.add_argument('--synthetic', choices=('demon',), help="generate prices instead of reading a file")
    backtest.add_argument('--periods', type=int, default=30, help="sessions of the synthetic series")
    backtest.set_defaults(handler=cmd_backtest)

    figures = sub.add_parser('figures', help="figure data tables")
    figures.add_argument('--which', choices=FIGURES + ('all',), default='all')
    figures.add_argument('--out', default=None, help=f"output directory (default {Config.FIGURES_OUTPUT_DIR})")
    figures.add_argument('--max-T', dest='max_T', type=int, default=1000)
    figures.set_defaults(handler=cmd_figures)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function"""
    args = build_parser().parse_args(argv)
    try:
        Config.validate()
        logging.basicConfig(
            level=getattr(logging, Config.LOG_LEVEL),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            stream=sys.stderr,
        )
        return args.handler(args)
    except SuperhedgeError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
