#!/usr/bin/env python3
"""
Market Primitives Module
Gross-return histories, portfolio vectors, trading strategies and
final-wealth evaluation for a frictionless, long-only market.

Asset indices are 0-based throughout the code (asset 1 of the docs is index 0).
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from config import Config
from errors import BudgetError, InputError

logger = logging.getLogger(__name__)

ArrayLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True)
class ReturnMatrix:
    """T x m grid of nonnegative gross returns; no row may be all zero"""
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise InputError(f"return matrix must be T x m with T, m >= 1, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InputError("return matrix contains non-finite entries")
        if np.any(rows < 0):
            t, j = np.argwhere(rows < 0)[0]
            raise InputError(f"negative gross return {rows[t, j]} at period {t + 1}, asset {j}")
        zero_rows = np.flatnonzero(~np.any(rows > 0, axis=1))
        if zero_rows.size:
            raise InputError(f"gross-return row {zero_rows[0] + 1} is the zero vector")
        rows.setflags(write=False)
        object.__setattr__(self, 'rows', rows)

    @property
    def T(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]

    def prefix(self, t: int) -> np.ndarray:
        """History x^t as a (t, m) array; t=0 is the empty history"""
        return self.rows[:t]

    def scale_row(self, t: int, s: float) -> 'ReturnMatrix':
        rows = self.rows.copy()
        rows[t] *= s
        return ReturnMatrix(rows)

    def permuted(self, order: Sequence[int]) -> 'ReturnMatrix':
        return ReturnMatrix(self.rows[list(order)])

    def appended(self, row: ArrayLike) -> 'ReturnMatrix':
        return ReturnMatrix(np.vstack([self.rows, np.asarray(row, dtype=float)]))

    @classmethod
    def ones(cls, T: int, m: int) -> 'ReturnMatrix':
        return cls(np.ones((T, m)))


@dataclass(frozen=True)
class PortfolioVector:
    """Point of the simplex: nonnegative wealth fractions summing to 1"""
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        tol = Config.PORTFOLIO_TOLERANCE
        if w.size < 1 or not np.all(np.isfinite(w)):
            raise InputError(f"portfolio weights must be finite and nonempty, got {w}")
        if np.any(w < -tol):
            raise InputError(f"negative portfolio weight {w.min()}")
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if abs(total - 1.0) > tol:
            raise InputError(f"portfolio weights sum to {total!r}, not 1")
        w = w / total
        w.setflags(write=False)
        object.__setattr__(self, 'weights', w)

    @property
    def m(self) -> int:
        return self.weights.size

    @classmethod
    def uniform(cls, m: int) -> 'PortfolioVector':
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def vertex(cls, k: int, m: int) -> 'PortfolioVector':
        w = np.zeros(m)
        w[k] = 1.0
        return cls(w)

    @classmethod
    def from_unnormalized(cls, values: ArrayLike) -> 'PortfolioVector':
        """Normalize nonnegative masses; callers handle the all-zero case"""
        values = np.asarray(values, dtype=float)
        return cls(values / values.sum())


PortfolioRule = Callable[[np.ndarray], Union[PortfolioVector, ArrayLike]]


@dataclass(frozen=True)
class TradingStrategy:
    """Deterministic map from a history prefix (t x m array) to a PortfolioVector"""
    portfolio_at: PortfolioRule
    m: int
    horizon: int
    name: str = "strategy"

    def portfolio(self, prefix: np.ndarray) -> PortfolioVector:
        prefix = np.asarray(prefix, dtype=float).reshape(-1, self.m)
        if prefix.shape[0] >= self.horizon:
            raise InputError(
                f"{self.name}: history of length {prefix.shape[0]} reaches horizon {self.horizon}"
            )
        theta = self.portfolio_at(prefix)
        if not isinstance(theta, PortfolioVector):
            theta = PortfolioVector(theta)
        if theta.m != self.m:
            raise InputError(f"{self.name}: portfolio has {theta.m} weights, expected {self.m}")
        return theta


@dataclass(frozen=True)
class PriceTable:
    """Initial prices S_0, closing prices S_t and optional dividends per session"""
    initial_prices: np.ndarray
    prices: np.ndarray
    dividends: Optional[np.ndarray] = None
    asset_names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        s0 = np.array(self.initial_prices, dtype=float).ravel()
        s = np.array(self.prices, dtype=float)
        if s.ndim == 1:
            s = s.reshape(-1, s0.size)
        if s.ndim != 2 or s.shape[1] != s0.size:
            raise InputError(f"price rows have shape {s.shape}, expected (T, {s0.size})")
        d = np.zeros_like(s) if self.dividends is None else np.array(self.dividends, dtype=float)
        if d.shape != s.shape:
            raise InputError(f"dividend rows have shape {d.shape}, expected {s.shape}")
        names = tuple(self.asset_names) or tuple(f"asset_{j + 1}" for j in range(s0.size))
        object.__setattr__(self, 'initial_prices', s0)
        object.__setattr__(self, 'prices', s)
        object.__setattr__(self, 'dividends', d)
        object.__setattr__(self, 'asset_names', names)

    @property
    def m(self) -> int:
        return self.initial_prices.size

    @property
    def T(self) -> int:
        return self.prices.shape[0]

    def column(self, j: int) -> np.ndarray:
        """Closing prices S_1j..S_Tj of one asset (S_0 excluded)"""
        return self.prices[:, j].copy()


def _check_dimensions(m: int, X: ReturnMatrix, what: str):
    if m != X.m:
        raise InputError(f"{what} trades {m} assets but the return matrix has {X.m}")


def compound(factors: Iterable[float], T: int) -> float:
    """Product of per-period growth factors, in log space for long horizons"""
    if T > Config.LOG_SPACE_HORIZON:
        total = 0.0
        for f in factors:
            if f <= 0.0:
                return 0.0
            total += math.log(f)
        return math.exp(total)
    wealth = 1.0
    for f in factors:
        wealth *= f
    return wealth


def _growth_factors(strategy: TradingStrategy, X: ReturnMatrix):
    for t in range(X.T):
        theta = strategy.portfolio(X.prefix(t))
        yield float(np.dot(theta.weights, X.rows[t]))


def wealth_of_strategy(strategy: TradingStrategy, X: ReturnMatrix) -> float:
    """Final wealth of a $1 deposit: prod_t <theta(x^{t-1}), x_t>"""
    _check_dimensions(strategy.m, X, strategy.name)
    if strategy.horizon < X.T:
        raise InputError(f"{strategy.name}: horizon {strategy.horizon} shorter than T={X.T}")
    return compound(_growth_factors(strategy, X), X.T)


def log_wealth_of_strategy(strategy: TradingStrategy, X: ReturnMatrix) -> float:
    """log W_theta(X); -inf when some period wipes the wealth out"""
    _check_dimensions(strategy.m, X, strategy.name)
    if strategy.horizon < X.T:
        raise InputError(f"{strategy.name}: horizon {strategy.horizon} shorter than T={X.T}")
    total = 0.0
    for f in _growth_factors(strategy, X):
        if f <= 0.0:
            return -math.inf
        total += math.log(f)
    return total


def crp_wealth(c: PortfolioVector, X: ReturnMatrix) -> float:
    """Final wealth of the constant-rebalanced portfolio c"""
    _check_dimensions(c.m, X, "rebalancing rule")
    return compound((float(np.dot(c.weights, row)) for row in X.rows), X.T)


def constant_strategy(c: PortfolioVector, horizon: int) -> TradingStrategy:
    return TradingStrategy(lambda prefix: c, c.m, horizon, name=f"CRP{tuple(np.round(c.weights, 4))}")


def extremal_strategy(j_tuple: Sequence[int], m: int) -> TradingStrategy:
    """Memoryless extreme strategy: all wealth in asset j_t during session t"""
    j_tuple = tuple(int(j) for j in j_tuple)
    if any(j < 0 or j >= m for j in j_tuple):
        raise InputError(f"extremal tuple {j_tuple} has indices outside 0..{m - 1}")
    vertices = [PortfolioVector.vertex(j, m) for j in j_tuple]
    return TradingStrategy(lambda prefix: vertices[prefix.shape[0]], m, len(j_tuple),
                           name=f"extremal{j_tuple}")


def buy_and_hold_strategy(c: PortfolioVector, horizon: int) -> TradingStrategy:
    """Put fraction c_j into asset j once and let it ride"""
    log_c = np.log(np.where(c.weights > 0, c.weights, 1.0))
    alive = c.weights > 0

    def rule(prefix: np.ndarray) -> PortfolioVector:
        with np.errstate(divide='ignore'):
            log_mass = np.where(alive, log_c + np.log(prefix).sum(axis=0), -np.inf)
        if not np.any(np.isfinite(log_mass)):
            return c
        mass = np.exp(log_mass - np.max(log_mass))
        return PortfolioVector.from_unnormalized(mass)

    return TradingStrategy(rule, c.m, horizon, name="buy-and-hold")


def strategy_from_function(fn: PortfolioRule, m: int, horizon: int, name: str = "custom") -> TradingStrategy:
    return TradingStrategy(fn, m, horizon, name=name)


def _prefix_log_wealth(strategy: TradingStrategy, prefix: np.ndarray) -> float:
    total = 0.0
    for t in range(prefix.shape[0]):
        f = float(np.dot(strategy.portfolio(prefix[:t]).weights, prefix[t]))
        if f <= 0.0:
            return -math.inf
        total += math.log(f)
    return total


def blend_strategies(lam: float, theta: TradingStrategy, psi: TradingStrategy,
                     deposits: Tuple[float, float] = (1.0, 1.0)) -> TradingStrategy:
    """
    Deposit lam*p1 into theta and (1-lam)*p2 into psi and let both ride.
    The blend's wealth per unit of total deposit is the deposit-weighted
    mixture of the two wealths; with unit deposits W = lam*W_theta + (1-lam)*W_psi.
    """
    if not 0.0 <= lam <= 1.0 or not math.isfinite(lam):
        raise InputError(f"blend weight {lam} outside [0, 1]")
    if theta.m != psi.m or theta.horizon != psi.horizon:
        raise InputError("blended strategies must share m and horizon")
    p1, p2 = deposits
    if p1 <= 0 or p2 <= 0:
        raise InputError(f"deposits must be positive, got {deposits}")
    w1, w2 = lam * p1, (1.0 - lam) * p2
    log_w1 = math.log(w1) if w1 > 0 else -math.inf
    log_w2 = math.log(w2) if w2 > 0 else -math.inf

    def rule(prefix: np.ndarray) -> PortfolioVector:
        a = log_w1 + _prefix_log_wealth(theta, prefix) if w1 > 0 else -math.inf
        b = log_w2 + _prefix_log_wealth(psi, prefix) if w2 > 0 else -math.inf
        top = max(a, b)
        if top == -math.inf:
            # 0/0 state: wealth is already gone either way
            return theta.portfolio(prefix)
        ea, eb = math.exp(a - top), math.exp(b - top)
        mix = ea * theta.portfolio(prefix).weights + eb * psi.portfolio(prefix).weights
        return PortfolioVector(mix / (ea + eb))

    # a $1 deposit grows into (w1*W_theta + w2*W_psi) / (w1 + w2)
    return TradingStrategy(rule, theta.m, theta.horizon, name=f"blend({lam:g})")


def index_strategy(kind: str, m: int, horizon: int,
                   shares: Optional[ArrayLike] = None,
                   initial_prices: Optional[ArrayLike] = None) -> TradingStrategy:
    """
    price_weighted: hold an equal number of shares of every stock
    cap_weighted:   hold n_j shares of stock j (shares required)
    equal_weight:   rebalance to (1/m, ..., 1/m) every session
    """
    s0 = np.ones(m) if initial_prices is None else np.asarray(initial_prices, dtype=float)
    if s0.shape != (m,) or np.any(s0 <= 0):
        raise InputError(f"initial prices must be {m} positive numbers")
    if kind == 'equal_weight':
        return constant_strategy(PortfolioVector.uniform(m), horizon)
    if kind == 'price_weighted':
        mass = s0
    elif kind == 'cap_weighted':
        if shares is None:
            raise InputError("cap_weighted index needs share counts n_j")
        n = np.asarray(shares, dtype=float)
        if n.shape != (m,) or np.any(n <= 0):
            raise InputError(f"share counts must be {m} positive numbers")
        mass = n * s0
    else:
        raise InputError(f"unknown index kind {kind!r}")
    strategy = buy_and_hold_strategy(PortfolioVector.from_unnormalized(mass), horizon)
    return TradingStrategy(strategy.portfolio_at, m, horizon, name=kind)


def returns_from_prices(table: PriceTable) -> ReturnMatrix:
    """x_tj = (S_tj + delta_tj) / S_{t-1,j}"""
    full = np.vstack([table.initial_prices, table.prices])
    bad = np.argwhere(~(full > 0))
    if bad.size:
        t, j = bad[0]
        raise InputError(f"nonpositive price {full[t, j]} at session {t}, asset {table.asset_names[j]}")
    gross = (table.prices + table.dividends) / full[:-1]
    if np.any(gross < 0):
        t, j = np.argwhere(gross < 0)[0]
        raise InputError(f"negative dividend-adjusted return at session {t + 1}, asset {table.asset_names[j]}")
    return ReturnMatrix(gross)


def kelly_sequence(j_tuple: Sequence[int], m: int) -> ReturnMatrix:
    """Return matrix (e_{j_1}, ..., e_{j_T})"""
    return ReturnMatrix(np.eye(m)[list(j_tuple)])


def check_tuple_budget(T: int, m: int) -> int:
    count = m ** T
    if count > Config.DENSE_TUPLE_BUDGET:
        raise BudgetError(
            f"{m}^{T} = {count} index tuples exceed the budget {Config.DENSE_TUPLE_BUDGET}; "
            f"use the symmetric (type-class) engine"
        )
    return count


def index_tuples(T: int, m: int):
    check_tuple_budget(T, m)
    return itertools.product(range(m), repeat=T)


def vertex_sum(strategy: TradingStrategy, T: Optional[int] = None) -> float:
    """Sum of the strategy's wealth over all m^T Kelly sequences (always 1)"""
    T = strategy.horizon if T is None else T
    return math.fsum(
        wealth_of_strategy(strategy, kelly_sequence(j, strategy.m)) for j in index_tuples(T, strategy.m)
    )


def passive_index_gap_bound(c: PortfolioVector, T: int) -> float:
    """Uniform bound -log(min_j c_j)/T on the best stock's excess growth over a buy-and-hold index"""
    if np.min(c.weights) <= 0:
        return math.inf
    return -math.log(float(np.min(c.weights))) / T
