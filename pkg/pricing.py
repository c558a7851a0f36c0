#!/usr/bin/env python3
"""
Superhedging Price Module
p(T,m), the price of Cover's Derivative, by three independent formulas,
Shtarkov's closed-form upper bound, and the horizon / rebalancing
frequency solvers built on them. Everything is evaluated in log space.
"""

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from combinatorics import check_type_budget, log_factorials, type_array
from config import Config
from errors import BudgetError, InputError

logger = logging.getLogger(__name__)

METHODS = ('direct', 'recurrence', 'two-stock', 'shtarkov')
HORIZON_METHODS = ('exact_scan', 'shtarkov_fixed_point')


@dataclass(frozen=True)
class HorizonResult:
    """Smallest T with log p(T,m)/T <= eps under the given method"""
    horizon: int
    achieved_rate: float  # nats per period
    method: str
    eps: float
    assets: int


def _check_dimensions(T: int, m: int):
    if int(T) != T or int(m) != m or T < 1 or m < 1:
        raise InputError(f"need integers T, m >= 1, got T={T}, m={m}")


# =============================
# Exact prices
# =============================

def log_price_direct(T: int, m: int) -> float:
    _check_dimensions(T, m)
    check_type_budget(T, m)
    types = type_array(m, T)
    return float(logsumexp(log_factorials.log_multinomial(types) + xlogy(types, types / T).sum(axis=1)))


def price_direct(T: int, m: int) -> float:
    """Sum over type classes of multinomial(T; n) prod_k (n_k/T)^{n_k}"""
    return math.exp(log_price_direct(T, m))


def _binomial_vertex_terms(t: int) -> np.ndarray:
    """log of C(t,n) (n/t)^n ((t-n)/t)^{t-n} for n = 0..t"""
    n = np.arange(t + 1)
    return log_factorials.log_binomial(t, n) + xlogy(n, n / t) + xlogy(t - n, (t - n) / t)


def check_recurrence_budget(T: int, m: int):
    if m >= 2 and T > Config.RECURRENCE_MAX_HORIZON:
        alternatives = "two-stock or shtarkov" if m == 2 else "shtarkov"
        raise BudgetError(f"the recurrence for T={T}, m={m} exceeds RECURRENCE_MAX_HORIZON="
                          f"{Config.RECURRENCE_MAX_HORIZON}; use --method {alternatives}")


@functools.lru_cache(maxsize=64)
def recurrence_columns(T: int, m: int) -> np.ndarray:
    """
    log p(t, k) for 1 <= t <= T, 1 <= k <= m as an (m, T+1) array
    (column 0 unused), from p(t,k) = 1 + sum_{n<t} C(t,n) (n/t)^n ((t-n)/t)^{t-n} p(t-n, k-1)
    with p(t,1) = 1.
    """
    _check_dimensions(T, m)
    check_recurrence_budget(T, m)
    log_factorials.ensure(T)
    table = np.full((m, T + 1), -np.inf)
    table[0, 1:] = 0.0
    for k in range(1, m):
        for t in range(1, T + 1):
            # n = 0..t-1 pairs with p(t-n, k-1)
            terms = _binomial_vertex_terms(t)[:t] + table[k - 1, t:0:-1]
            table[k, t] = np.logaddexp(0.0, logsumexp(terms))
    return table


def log_price_recurrence(T: int, m: int) -> float:
    _check_dimensions(T, m)
    if m == 1:
        return 0.0
    if T == 1:
        return math.log(m)
    check_recurrence_budget(T, m)
    # the table for t <= T does not depend on its upper limit, so share power-of-two sizes
    size = max(T, min(1 << max(6, (T - 1).bit_length()), Config.RECURRENCE_MAX_HORIZON))
    return float(recurrence_columns(size, m)[m - 1, T])


def price_recurrence(T: int, m: int) -> float:
    return math.exp(log_price_recurrence(T, m))


def log_price_two_stocks(T: int) -> float:
    """Folded binomial sum for m=2, with the central term counted once for even T"""
    _check_dimensions(T, 2)
    log_factorials.ensure(T)
    terms = _binomial_vertex_terms(T)
    half = math.ceil(T / 2)
    folded = math.log(2.0) + logsumexp(terms[:half])
    if T % 2 == 0:
        return float(np.logaddexp(folded, terms[T // 2]))
    return float(folded)


def price_two_stocks(T: int) -> float:
    return math.exp(log_price_two_stocks(T))


# =============================
# Bounds
# =============================

def shtarkov_coefficients(m: int) -> np.ndarray:
    """a_j = sqrt(pi) C(m,j) / (Gamma(j/2) 2^{(j-1)/2}) for j = 1..m"""
    _check_dimensions(1, m)
    j = np.arange(1, m + 1)
    log_a = (0.5 * math.log(math.pi) + log_factorials.log_binomial(m, j)
             - gammaln(j / 2.0) - 0.5 * (j - 1) * math.log(2.0))
    return np.exp(log_a)


def log_shtarkov_bound(T: float, m: int) -> float:
    j = np.arange(1, m + 1)
    log_a = np.log(shtarkov_coefficients(m))
    return float(logsumexp(log_a + 0.5 * (j - 1) * math.log(T)))


def shtarkov_bound(T: int, m: int) -> float:
    """sum_j a_j T^{(j-1)/2} >= p(T,m)"""
    _check_dimensions(T, m)
    return math.exp(log_shtarkov_bound(T, m))


def simple_price_bound(T: int, m: int) -> int:
    """Number of type classes C(T+m-1, m-1), a crude upper bound on p(T,m)"""
    _check_dimensions(T, m)
    return math.comb(T + m - 1, m - 1)


# =============================
# Dispatch
# =============================

def log_price(T: int, m: int, method: str = 'auto') -> float:
    """log p(T,m); 'shtarkov' returns the log of the bound instead"""
    _check_dimensions(T, m)
    if method == 'auto':
        method = 'two-stock' if m == 2 else 'recurrence'
    if method == 'direct':
        return log_price_direct(T, m)
    if method == 'recurrence':
        return log_price_recurrence(T, m)
    if method == 'two-stock':
        if m != 2:
            raise InputError(f"the two-stock formula needs m=2, got m={m}; use recurrence or direct")
        return log_price_two_stocks(T)
    if method == 'shtarkov':
        return log_shtarkov_bound(T, m)
    raise InputError(f"unknown price method {method!r}; choose from {', '.join(METHODS)}")


def regret_rate(T: int, m: int, method: str = 'auto') -> float:
    """Worst-case excess growth of the best CRP over the universal portfolio, nats/period"""
    return log_price(T, m, method) / T


# =============================
# Horizon solvers
# =============================

def exact_scan_limit(m: int) -> int:
    """Largest horizon the exact scan visits for m assets"""
    if m <= 2:
        return Config.EXACT_SCAN_MAX_HORIZON
    return min(Config.EXACT_SCAN_MAX_HORIZON, Config.RECURRENCE_MAX_HORIZON)


def _exact_scan(eps: float, m: int) -> HorizonResult:
    cap = exact_scan_limit(m)
    if m == 1:
        return HorizonResult(1, 0.0, 'exact_scan', eps, m)
    if m == 2:
        for T in range(1, cap + 1):
            rate = log_price_two_stocks(T) / T
            if rate <= eps:
                return HorizonResult(T, rate, 'exact_scan', eps, m)
    else:
        limit = 64
        while True:
            limit = min(limit, cap)
            rates = recurrence_columns(limit, m)[m - 1, 1:] / np.arange(1, limit + 1)
            hits = np.flatnonzero(rates <= eps)
            if hits.size:
                T = int(hits[0]) + 1
                return HorizonResult(T, float(rates[T - 1]), 'exact_scan', eps, m)
            if limit == cap:
                break
            limit *= 4
    raise BudgetError(f"no horizon up to {cap} reaches {eps:g} nats/period by exact scan; "
                      f"use the shtarkov_fixed_point method")


def _shtarkov_fixed_point(eps: float, m: int) -> HorizonResult:
    T = 1.0
    for _ in range(100000):
        following = log_shtarkov_bound(T, m) / eps
        if following > Config.FIXED_POINT_CAP:
            raise BudgetError(f"fixed-point iteration for eps={eps:g} exceeded the cap {Config.FIXED_POINT_CAP:g}")
        converged = abs(following - T) < 0.5
        T = max(following, 1.0)
        if converged:
            break
    else:
        raise BudgetError(f"fixed-point iteration for eps={eps:g} did not settle")

    horizon = max(1, math.ceil(T))
    while horizon > 1 and log_shtarkov_bound(horizon - 1, m) / (horizon - 1) <= eps:
        horizon -= 1
    while log_shtarkov_bound(horizon, m) / horizon > eps:
        horizon += 1
    return HorizonResult(horizon, log_shtarkov_bound(horizon, m) / horizon, 'shtarkov_fixed_point', eps, m)


def horizon_for_tolerance(eps: float, m: int, method: str = 'exact_scan') -> HorizonResult:
    """Smallest T whose worst-case regret rate (exact or Shtarkov-bounded) is at most eps"""
    if not eps > 0 or not math.isfinite(eps):
        raise InputError(f"tolerance must be a positive number of nats, got {eps}")
    _check_dimensions(1, m)
    if method == 'exact_scan':
        result = _exact_scan(eps, m)
    elif method == 'shtarkov_fixed_point':
        result = _shtarkov_fixed_point(eps, m)
    else:
        raise InputError(f"unknown horizon method {method!r}; choose from {', '.join(HORIZON_METHODS)}")
    logger.debug(f"📊 T_eps({eps:g}, m={m}) = {result.horizon} via {result.method}")
    return result


def horizon_for_frequency(eps: float, m: int, f: int) -> HorizonResult:
    """T_{eps/f}: exact scan while the Shtarkov horizon fits the scan budget"""
    if int(f) != f or f < 1:
        raise InputError(f"rebalancing frequency must be a positive integer, got {f}")
    bounded = horizon_for_tolerance(eps / f, m, 'shtarkov_fixed_point')
    if bounded.horizon > Config.EXACT_SCAN_MAX_HORIZON:
        return bounded
    return horizon_for_tolerance(eps / f, m, 'exact_scan')


def years_needed(eps: float, m: int, f: int) -> float:
    """(1/f) T_{eps/f}: calendar time to guarantee eps nats/year when rebalancing f times a year"""
    return horizon_for_frequency(eps, m, f).horizon / f
