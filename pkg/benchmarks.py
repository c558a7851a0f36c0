#!/usr/bin/env python3
"""
Benchmark Derivatives Module
Lookback payoffs (perfect trader, perfect buy-and-hold, shrewdest single
trade, Cover's Derivative) and the best constant-rebalanced portfolio in
hindsight, solved with a certified optimality gap.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

from combinatorics import type_array
from config import Config
from errors import InputError
from market import (
    PortfolioVector, ReturnMatrix, TradingStrategy,
    compound, crp_wealth, wealth_of_strategy,
)

logger = logging.getLogger(__name__)

GRID_ORACLE_MAX_ASSETS = 3
_ARMIJO = 1e-4
_GRID_CHUNK = 65536


@dataclass(frozen=True)
class PayoffEvaluator:
    """A derivative D(x_1, ..., x_T) >= 0 on a fixed (T, m) market"""
    evaluate: Callable[[ReturnMatrix], float]
    horizon: int
    assets: int
    is_multiconvex_homogeneous: bool = False
    # optional closed form of D(e_{j_1}, ..., e_{j_T}) for payoffs that only see the type of j^T
    vertex_value_of_type: Optional[Callable[[Tuple[int, ...]], float]] = None
    name: str = "payoff"

    def __call__(self, X: ReturnMatrix) -> float:
        if X.T != self.horizon or X.m != self.assets:
            raise InputError(
                f"{self.name} is defined on T={self.horizon}, m={self.assets}; got T={X.T}, m={X.m}"
            )
        value = float(self.evaluate(X))
        if not value >= 0.0:
            raise InputError(f"{self.name} returned {value} < 0")
        return value


@dataclass(frozen=True)
class BestCrpResult:
    """Best rebalancing rule in hindsight c* with its final wealth D(X)"""
    maximizer: PortfolioVector
    value: float
    iterations: int
    gap_bound: float  # certified relative gap: D(X) <= value * (1 + gap_bound)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)"""
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.count_nonzero(u - cssv / ind > 0)
    theta = cssv[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def _log_objective(c: np.ndarray, A: np.ndarray):
    s = A @ c
    if np.any(s <= 0.0):
        return -math.inf, s
    return float(np.sum(np.log(s))), s


def _newton_step(c, A, s, g, f):
    """Damped Newton step restricted to the current support face"""
    face = np.flatnonzero(c > 0.0)
    if face.size < 2:
        return None
    B = A[:, face] / s[:, None]
    k = face.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = -(B.T @ B)
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.concatenate([-g[face], [0.0]])
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    d = np.zeros_like(c)
    d[face] = sol[:k]
    slope = float(g @ d)
    if not slope > 0.0:
        return None

    shrinking = d < 0.0
    alpha_max = float(np.min(-c[shrinking] / d[shrinking])) if np.any(shrinking) else math.inf
    alpha = min(1.0, alpha_max)
    while alpha > 1e-12:
        trial = c + alpha * d
        if alpha == alpha_max:
            trial[shrinking & (np.abs(c + alpha_max * d) <= 1e-15)] = 0.0
        trial = np.clip(trial, 0.0, None)
        trial /= trial.sum()
        f_trial, _ = _log_objective(trial, A)
        if f_trial >= f + _ARMIJO * alpha * slope and f_trial > f:
            return trial, f_trial
        alpha *= 0.5
    return None


def _projected_gradient_step(c, A, g, f, T, eta):
    """Projected ascent with backtracking; can re-activate zero weights"""
    while eta > 1e-16:
        trial = project_simplex(c + eta * g / T)
        f_trial, _ = _log_objective(trial, A)
        if f_trial > f and f_trial >= f + _ARMIJO * float(g @ (trial - c)):
            return trial, f_trial, eta
        eta *= 0.5
    return None


def best_crp(X: ReturnMatrix, tol: Optional[float] = None, max_iter: Optional[int] = None) -> BestCrpResult:
    """
    Maximize prod_t <c, x_t> over the simplex.

    The log objective is concave, finite at the uniform point (rows are
    never zero) and its Frank-Wolfe gap max_j g_j - T bounds
    log D(X) - log W_c(X), which gives the certificate in gap_bound.
    Columns that are identically zero get weight 0.
    """
    tol = Config.BEST_CRP_TOLERANCE if tol is None else tol
    max_iter = Config.BEST_CRP_MAX_ITER if max_iter is None else max_iter
    if not tol > 0:
        raise InputError(f"best_crp tolerance must be positive, got {tol}")

    active = np.flatnonzero(np.any(X.rows > 0, axis=0))
    A = X.rows[:, active]
    T = X.T
    c = np.full(active.size, 1.0 / active.size)
    f, s = _log_objective(c, A)
    log_tol = math.log1p(tol)
    eta = 1.0
    gap = 0.0
    iterations = 0

    for iterations in range(max_iter + 1):
        g = A.T @ (1.0 / s)
        gap = max(float(np.max(g)) - T, 0.0)
        if gap <= log_tol or iterations == max_iter:
            break
        progressed = False
        step = _newton_step(c, A, s, g, f)
        if step is not None:
            c, f = step
            progressed = True
            f, s = _log_objective(c, A)
            g = A.T @ (1.0 / s)
        entering = (c <= 0.0) & (g > T * (1.0 + 1e-12))
        if not progressed or np.any(entering):
            pg = _projected_gradient_step(c, A, g, f, T, min(2.0 * eta, 1e6))
            if pg is not None:
                c, f, eta = pg
                progressed = True
        if not progressed:
            logger.debug(f"best_crp stalled after {iterations} iterations, gap {gap:.3e}")
            break
        f, s = _log_objective(c, A)

    if iterations >= max_iter:
        logger.warning(f"⚠️  best_crp hit the iteration cap {max_iter}; certified gap {math.expm1(gap):.3e}")

    weights = np.zeros(X.m)
    weights[active] = c
    maximizer = PortfolioVector(weights / weights.sum())
    return BestCrpResult(
        maximizer=maximizer,
        value=crp_wealth(maximizer, X),
        iterations=iterations,
        gap_bound=math.expm1(gap),
    )


def kelly_rule(X: ReturnMatrix, tol: Optional[float] = None) -> PortfolioVector:
    """Empirical Kelly rule: the best rebalancing rule on the sample path"""
    return best_crp(X, tol).maximizer


def best_crp_grid_oracle(X: ReturnMatrix, resolution: int) -> float:
    """Max of the CRP wealth over the barycentric grid with `resolution` points per edge"""
    if resolution < 2:
        raise InputError(f"grid resolution must be at least 2, got {resolution}")
    if X.m > GRID_ORACLE_MAX_ASSETS:
        raise InputError(f"grid oracle enumerates at most {GRID_ORACLE_MAX_ASSETS} assets, got m={X.m}")
    points = type_array(X.m, resolution - 1) / float(resolution - 1)
    best = -math.inf
    for start in range(0, points.shape[0], _GRID_CHUNK):
        growth = points[start:start + _GRID_CHUNK] @ X.rows.T
        with np.errstate(divide='ignore'):
            log_wealth = np.log(growth).sum(axis=1)
        best = max(best, float(np.max(log_wealth)))
    return math.exp(best)


def cover_vertex_value(n: Sequence[int], T: int) -> float:
    """D(e_{j_1}, ..., e_{j_T}) = prod_k (n_k/T)^{n_k} with 0^0 = 1"""
    n = np.asarray(n, dtype=int)
    if np.any(n < 0) or int(n.sum()) != T:
        raise InputError(f"type vector {tuple(n)} does not sum to T={T}")
    return math.exp(float(np.sum(xlogy(n, n / T))))


def perfect_trader(X: ReturnMatrix) -> float:
    """prod_t ||x_t||_inf"""
    return compound(X.rows.max(axis=1), X.T)


def perfect_buy_and_hold(X: ReturnMatrix) -> float:
    """max_j prod_t x_tj"""
    return max(compound(X.rows[:, j], X.T) for j in range(X.m))


def best_single_trade(prices: Sequence[float]) -> float:
    """max over s <= t of S_t - S_s (0 when the series never rises)"""
    prices = np.asarray(prices, dtype=float).ravel()
    if prices.size == 0:
        raise InputError("best_single_trade needs at least one price")
    running_min = np.minimum.accumulate(prices)
    return float(np.max(prices - running_min))


def cover_derivative(X: ReturnMatrix, tol: Optional[float] = None) -> float:
    """Final wealth of the best rebalancing rule in hindsight"""
    return best_crp(X, tol).value


def market_beating_margin(X: ReturnMatrix, tol: Optional[float] = None) -> float:
    """Per-period excess log growth of the best CRP over the best single stock"""
    with np.errstate(divide='ignore'):
        best_stock = float(np.max(np.log(X.rows).sum(axis=0)))
    return (math.log(cover_derivative(X, tol)) - best_stock) / X.T


# =============================
# Payoff factories
# =============================

def cover_payoff(T: int, m: int, tol: Optional[float] = None) -> PayoffEvaluator:
    return PayoffEvaluator(
        evaluate=lambda X: cover_derivative(X, tol),
        horizon=T, assets=m,
        is_multiconvex_homogeneous=True,
        vertex_value_of_type=lambda n: cover_vertex_value(n, T),
        name="cover-derivative",
    )


def perfect_trader_payoff(T: int, m: int) -> PayoffEvaluator:
    return PayoffEvaluator(perfect_trader, T, m, True, lambda n: 1.0, name="perfect-trader")


def perfect_buy_and_hold_payoff(T: int, m: int) -> PayoffEvaluator:
    return PayoffEvaluator(perfect_buy_and_hold, T, m, True,
                           lambda n: 1.0 if max(n) == T else 0.0, name="perfect-buy-and-hold")


def crp_payoff(c: PortfolioVector, T: int) -> PayoffEvaluator:
    log_c = np.log(np.where(c.weights > 0, c.weights, 1.0))

    def vertex(n):
        n = np.asarray(n)
        if np.any((n > 0) & (c.weights <= 0)):
            return 0.0
        return math.exp(float(np.dot(n, log_c)))

    return PayoffEvaluator(lambda X: crp_wealth(c, X), T, c.m, True, vertex, name="crp-wealth")


def equal_weight_payoff(T: int, m: int, scale: float = 1.0) -> PayoffEvaluator:
    """scale * prod_t mean(x_t)"""
    return PayoffEvaluator(
        evaluate=lambda X: scale * compound(X.rows.mean(axis=1), X.T),
        horizon=T, assets=m,
        is_multiconvex_homogeneous=True,
        vertex_value_of_type=lambda n: scale * float(m) ** (-T),
        name="equal-weight-index",
    )


def strategy_payoff(strategy: TradingStrategy, multiconvex: bool = False) -> PayoffEvaluator:
    """W_theta as a derivative; flag it only when the wealth function is known to be multiconvex"""
    return PayoffEvaluator(
        evaluate=lambda X: wealth_of_strategy(strategy, X),
        horizon=strategy.horizon, assets=strategy.m,
        is_multiconvex_homogeneous=multiconvex,
        name=f"wealth[{strategy.name}]",
    )
