#!/usr/bin/env python3
"""
Multilinear Replication Engine
Dense and symmetric (type-class) multilinear payoffs, exact replication,
minimum-cost multilinear superhedges and the bottom-up sigma tabulation
that makes symmetric strategies tractable.

Dense coefficients are a tensor of shape (m,)*T indexed by (j_1, ..., j_T).
Symmetric coefficients are stored as log alpha(n) aligned with
combinatorics.type_array(m, T).
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp, xlogy

from benchmarks import PayoffEvaluator
from combinatorics import compositions, log_factorials, type_array, type_index
from config import Config
from errors import BudgetError, DegenerateError, HedgeabilityError, InputError
from market import (
    PortfolioVector, ReturnMatrix, TradingStrategy,
    check_tuple_budget, index_tuples, kelly_sequence,
)

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-10


@dataclass(frozen=True)
class TypeVector:
    """Occurrence counts (n_1, ..., n_m) of the asset indices in a tuple"""
    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts or any(c < 0 for c in counts):
            raise InputError(f"type vector {self.counts} must be nonempty and nonnegative")
        object.__setattr__(self, 'counts', counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def m(self) -> int:
        return len(self.counts)

    def plus(self, k: int) -> 'TypeVector':
        counts = list(self.counts)
        counts[k] += 1
        return TypeVector(tuple(counts))

    @classmethod
    def of_tuple(cls, j_tuple: Sequence[int], m: int) -> 'TypeVector':
        return cls(tuple(np.bincount(np.asarray(j_tuple, dtype=int), minlength=m)))

    @classmethod
    def zero(cls, m: int) -> 'TypeVector':
        return cls((0,) * m)


@dataclass(frozen=True)
class MultilinearCoefficients:
    """Weights alpha over extremal strategies plus the deposit scale p*[D]"""
    mode: str
    horizon: int
    assets: int
    scale: float = 1.0
    dense: Optional[np.ndarray] = None
    log_symmetric: Optional[np.ndarray] = None
    name: str = "multilinear"
    _marginals: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.scale <= 0 or not math.isfinite(self.scale):
            raise InputError(f"scale p*[D] must be positive, got {self.scale}")
        if self.mode == 'dense':
            alpha = np.asarray(self.dense, dtype=float)
            if alpha.shape != (self.assets,) * self.horizon:
                raise InputError(f"dense coefficients have shape {alpha.shape}, "
                                 f"expected {(self.assets,) * self.horizon}")
            if np.any(alpha < 0):
                raise InputError("multilinear coefficients must be nonnegative")
            total = math.fsum(alpha.ravel())
            if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
                raise InputError(f"dense coefficients sum to {total!r}, not 1")
            alpha = alpha.copy()
            alpha.setflags(write=False)
            object.__setattr__(self, 'dense', alpha)
        elif self.mode == 'symmetric':
            check_symmetric_assets(self.assets)
            log_alpha = np.asarray(self.log_symmetric, dtype=float)
            types = type_array(self.assets, self.horizon)
            if log_alpha.shape != (types.shape[0],):
                raise InputError(f"symmetric coefficients need {types.shape[0]} type weights, "
                                 f"got {log_alpha.shape}")
            mass = logsumexp(log_factorials.log_multinomial(types) + log_alpha)
            if abs(math.expm1(mass)) > NORMALIZATION_TOLERANCE:
                raise InputError(f"type-class masses sum to {math.exp(mass)!r}, not 1")
            log_alpha = log_alpha.copy()
            log_alpha.setflags(write=False)
            object.__setattr__(self, 'log_symmetric', log_alpha)
        else:
            raise InputError(f"unknown coefficient mode {self.mode!r}")

    def weight(self, j_tuple: Sequence[int]) -> float:
        """alpha(j_1, ..., j_T)"""
        if self.mode == 'dense':
            return float(self.dense[tuple(j_tuple)])
        return self.type_weight(TypeVector.of_tuple(j_tuple, self.assets))

    def type_weight(self, n: TypeVector) -> float:
        """alpha(n_1, ..., n_m) of a symmetric prior"""
        if self.mode != 'symmetric':
            raise InputError("type weights exist only for symmetric coefficients")
        return math.exp(self.log_symmetric[type_index(self.assets, self.horizon)[n.counts]])

    def as_dense(self) -> 'MultilinearCoefficients':
        if self.mode == 'dense':
            return self
        unique, inverse = tuple_types(self.horizon, self.assets)
        lookup = type_index(self.assets, self.horizon)
        rows = np.array([lookup[tuple(int(v) for v in n)] for n in unique])
        alpha = np.exp(self.log_symmetric[rows])[inverse]
        alpha = alpha / math.fsum(alpha)
        return MultilinearCoefficients('dense', self.horizon, self.assets, self.scale,
                                       dense=alpha.reshape((self.assets,) * self.horizon),
                                       name=self.name)


@dataclass(frozen=True)
class SigmaTable:
    """
    sigma(N; x^t) = sum of x_{1 j_1} ... x_{t j_t} over tuples of type N,
    for every N with |N| = t, stored as logs aligned with type_array(m, t)
    """
    stage: int
    assets: int
    log_values: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def value(self, n: TypeVector) -> float:
        return math.exp(self.log_values[type_index(self.assets, self.stage)[n.counts]])


@dataclass(frozen=True)
class PortfolioDecision:
    """Replicating portfolio plus a flag for 0/0 states (all extremal wealth gone)"""
    portfolio: PortfolioVector
    degenerate: bool = False


@dataclass(frozen=True)
class HedgeCheck:
    hedgeable: bool
    max_residual: float


def check_symmetric_assets(m: int):
    if m > Config.SYMMETRIC_MAX_ASSETS:
        raise BudgetError(f"the symmetric engine supports at most {Config.SYMMETRIC_MAX_ASSETS} assets, got {m}")


@functools.lru_cache(maxsize=64)
def tuple_types(T: int, m: int):
    """Distinct types of all m^T tuples (C order) and the tuple -> type map"""
    check_tuple_budget(T, m)
    idx = np.indices((m,) * T).reshape(T, -1).T
    counts = np.stack([(idx == k).sum(axis=1) for k in range(m)], axis=1)
    unique, inverse = np.unique(counts, axis=0, return_inverse=True)
    return unique, inverse.ravel()


@functools.lru_cache(maxsize=1024)
def _parent_indices(m: int, t: int) -> np.ndarray:
    """Row of N - e_k in type_array(m, t-1) for every N of stage t, -1 where N_k = 0"""
    previous = type_index(m, t - 1)
    types = type_array(m, t)
    parents = np.full(types.shape, -1, dtype=int)
    for i, n in enumerate(types):
        for k in range(m):
            if n[k] > 0:
                key = list(int(v) for v in n)
                key[k] -= 1
                parents[i, k] = previous[tuple(key)]
    return parents


@functools.lru_cache(maxsize=1024)
def _child_indices(m: int, s: int) -> np.ndarray:
    """Row of M + e_k in type_array(m, s+1) for every M of stage s"""
    following = type_index(m, s + 1)
    types = type_array(m, s)
    children = np.empty(types.shape, dtype=int)
    for i, n in enumerate(types):
        for k in range(m):
            key = list(int(v) for v in n)
            key[k] += 1
            children[i, k] = following[tuple(key)]
    return children


# =============================
# Dense majorants and hedging cost
# =============================

def vertex_values(D: PayoffEvaluator) -> np.ndarray:
    """Tensor of D(e_{j_1}, ..., e_{j_T}) over all index tuples"""
    T, m = D.horizon, D.assets
    if D.vertex_value_of_type is not None:
        unique, inverse = tuple_types(T, m)
        per_type = np.array([D.vertex_value_of_type(tuple(int(v) for v in n)) for n in unique])
        return per_type[inverse].reshape((m,) * T)
    values = np.array([D(kelly_sequence(j, m)) for j in index_tuples(T, m)])
    return values.reshape((m,) * T)


def hedging_cost(D: PayoffEvaluator) -> float:
    """p*[D] = sum of D over all Kelly sequences (a lower bound on any superhedge)"""
    T, m = D.horizon, D.assets
    if D.vertex_value_of_type is not None:
        types = type_array(m, T)
        values = np.array([D.vertex_value_of_type(tuple(int(v) for v in n)) for n in types])
        positive = values > 0
        if not np.any(positive):
            raise DegenerateError(f"{D.name} vanishes on every Kelly sequence")
        log_mult = log_factorials.log_multinomial(types[positive])
        return float(np.exp(logsumexp(log_mult + np.log(values[positive]))))
    if m ** T > Config.DENSE_TUPLE_BUDGET:
        raise BudgetError(f"{m}^{T} vertex evaluations exceed the budget and {D.name} "
                          f"has no closed-form vertex values")
    cost = math.fsum(D(kelly_sequence(j, m)) for j in index_tuples(T, m))
    if cost <= 0:
        raise DegenerateError(f"{D.name} vanishes on every Kelly sequence")
    return cost


def majorant_coefficients(D: PayoffEvaluator) -> MultilinearCoefficients:
    """The unique minimum-cost multilinear superhedge: alpha(j^T) = D(e_{j_1}, ...)/p*[D]"""
    if not D.is_multiconvex_homogeneous:
        raise HedgeabilityError(f"{D.name} is not flagged multiconvex and homogeneous; "
                                f"the multilinear majorant need not dominate it")
    values = vertex_values(D)
    cost = math.fsum(values.ravel())
    if cost <= 0:
        raise DegenerateError(f"{D.name} vanishes on every Kelly sequence")
    logger.debug(f"📊 Majorant of {D.name}: p*={cost:.12g}")
    return MultilinearCoefficients('dense', D.horizon, D.assets, scale=cost,
                                   dense=values / cost, name=f"majorant[{D.name}]")


def crp_coefficients(c: PortfolioVector, T: int) -> MultilinearCoefficients:
    """alpha(j^T) = prod_t c_{j_t}"""
    check_tuple_budget(T, c.m)
    alpha = np.ones(())
    for _ in range(T):
        alpha = np.multiply.outer(alpha, c.weights)
    return MultilinearCoefficients('dense', T, c.m, dense=alpha / math.fsum(alpha.ravel()), name="crp")


def equal_weight_coefficients(T: int, m: int) -> MultilinearCoefficients:
    check_tuple_budget(T, m)
    return MultilinearCoefficients('dense', T, m, dense=np.full((m,) * T, float(m) ** (-T)),
                                   name="equal-weight")


def blend_replications(lam: float, first: MultilinearCoefficients,
                       second: MultilinearCoefficients) -> MultilinearCoefficients:
    """Coefficients of lam*D1 + (1-lam)*D2 where D_i = scale_i * W_alpha_i"""
    if not 0.0 <= lam <= 1.0:
        raise InputError(f"blend weight {lam} outside [0, 1]")
    if (first.horizon, first.assets) != (second.horizon, second.assets):
        raise InputError("blended coefficients must share T and m")
    a, b = first.as_dense(), second.as_dense()
    w1, w2 = lam * a.scale, (1.0 - lam) * b.scale
    total = w1 + w2
    return MultilinearCoefficients('dense', a.horizon, a.assets, scale=total,
                                   dense=(w1 * a.dense + w2 * b.dense) / total,
                                   name=f"blend({lam:g})")


# =============================
# Replication
# =============================

def _prefix_products(prefix: np.ndarray) -> np.ndarray:
    """Flat array of x_{1 j_1} ... x_{t j_t} over all j^t (C order); [1.0] for t=0"""
    products = np.ones(1)
    for row in prefix:
        products = np.multiply.outer(products, row).ravel()
    return products


def _check_prefix(alpha: MultilinearCoefficients, prefix) -> np.ndarray:
    prefix = np.asarray(prefix, dtype=float).reshape(-1, alpha.assets)
    if prefix.shape[0] >= alpha.horizon:
        raise InputError(f"prefix length {prefix.shape[0]} must be below the horizon {alpha.horizon}")
    if np.any(prefix < 0):
        raise InputError("gross returns must be nonnegative")
    return prefix


def _normalize_masses(log_masses: np.ndarray, m: int) -> PortfolioDecision:
    top = float(np.max(log_masses))
    if top == -math.inf or not math.isfinite(top):
        return PortfolioDecision(PortfolioVector.uniform(m), degenerate=True)
    masses = np.exp(log_masses - top)
    return PortfolioDecision(PortfolioVector(masses / masses.sum()))


def replicating_portfolio(alpha: MultilinearCoefficients, prefix) -> PortfolioDecision:
    """theta_k(x^t): share of the extremal wealth sitting on experts that pick k in session t+1"""
    prefix = _check_prefix(alpha, prefix)
    if alpha.mode == 'symmetric':
        return symmetric_portfolio(alpha, prefix, sigma_from_prefix(prefix))
    t, m = prefix.shape[0], alpha.assets
    products = _prefix_products(prefix)
    numerators = np.einsum('p,pkr->k', products, alpha.dense.reshape(m ** t, m, -1))
    total = numerators.sum()
    if not total > 0:
        return PortfolioDecision(PortfolioVector.uniform(m), degenerate=True)
    return PortfolioDecision(PortfolioVector(numerators / total))


def replicating_strategy(alpha: MultilinearCoefficients) -> TradingStrategy:
    return TradingStrategy(lambda prefix: replicating_portfolio(alpha, prefix).portfolio,
                           alpha.assets, alpha.horizon, name=f"replicate[{alpha.name}]")


def wealth_of_coefficients(alpha: MultilinearCoefficients, X: ReturnMatrix) -> float:
    """sum over j^T of alpha(j^T) x_{1 j_1} ... x_{T j_T} (per unit deposit)"""
    if (X.T, X.m) != (alpha.horizon, alpha.assets):
        raise InputError(f"coefficients live on T={alpha.horizon}, m={alpha.assets}; got T={X.T}, m={X.m}")
    if alpha.mode == 'symmetric':
        return symmetric_wealth(alpha, X)
    contracted = alpha.dense
    for row in X.rows:
        contracted = np.tensordot(row, contracted, axes=(0, 0))
    return float(contracted)


def replicate_from_payoff(D: PayoffEvaluator, prefix) -> PortfolioVector:
    """
    Candidate replicating portfolio read off the payoff at partial Kelly paths.
    The result may be extraneous when D is not hedgeable; see verify_hedgeable.
    """
    numerators = _completion_sums(D, np.asarray(prefix, dtype=float).reshape(-1, D.assets))
    total = math.fsum(numerators)
    if not total > 0:
        raise DegenerateError(f"{D.name} vanishes on every completion of the prefix")
    return PortfolioVector(np.asarray(numerators) / total)


def _completion_sums(D: PayoffEvaluator, prefix: np.ndarray) -> List[float]:
    """For each k: sum over j_{t+2..T} of D(x^t, e_k, e_{j_{t+2}}, ..., e_{j_T})"""
    t, T, m = prefix.shape[0], D.horizon, D.assets
    if t >= T:
        raise InputError(f"prefix length {t} must be below the horizon {T}")
    check_tuple_budget(T - t, m)
    eye = np.eye(m)
    sums = []
    for k in range(m):
        rows = [D(ReturnMatrix(np.vstack([prefix, eye[[k, *rest]]])))
                for rest in index_tuples(T - t - 1, m)]
        sums.append(math.fsum(rows))
    return sums


def verify_hedgeable(D: PayoffEvaluator, samples: Sequence[ReturnMatrix], tol: float) -> HedgeCheck:
    """
    Evaluate both sides of the telescoping replication identity
    prod_t <theta(x^{t-1}), x_t> = D(X) / p*[D] on each sample path.
    """
    cost = hedging_cost(D)
    worst = 0.0
    for X in samples:
        lhs = 1.0
        for t in range(X.T):
            sums = np.asarray(_completion_sums(D, X.prefix(t)))
            total = sums.sum()
            if not total > 0:
                lhs = math.nan
                break
            lhs *= float(np.dot(sums, X.rows[t])) / total
        rhs = D(X) / cost
        if math.isnan(lhs):
            residual = 0.0 if rhs == 0 else math.inf
        else:
            residual = abs(lhs - rhs) / max(abs(rhs), 1e-300)
        worst = max(worst, residual)
    return HedgeCheck(hedgeable=worst <= tol, max_residual=worst)


# =============================
# Symmetric priors and the sigma engine
# =============================

def _cover_log_vertex(types: np.ndarray, T: int) -> np.ndarray:
    return xlogy(types, types / T).sum(axis=1)


def prior_cover_ordentlich(T: int, m: int) -> MultilinearCoefficients:
    """alpha(n) proportional to prod_k n_k^{n_k}: Cover's Derivative's vertex values over p(T,m)"""
    if T < 1 or m < 1:
        raise InputError(f"prior needs T, m >= 1, got T={T}, m={m}")
    check_symmetric_assets(m)
    types = type_array(m, T)
    log_vertex = _cover_log_vertex(types, T)
    log_price = float(logsumexp(log_factorials.log_multinomial(types) + log_vertex))
    return MultilinearCoefficients('symmetric', T, m, scale=math.exp(log_price),
                                   log_symmetric=log_vertex - log_price, name="cover-ordentlich")


def prior_cover_uniform(T: int, m: int) -> MultilinearCoefficients:
    """Equal money in every type class: alpha(n) = 1 / (C(m+T-1, m-1) * multinomial(T; n))"""
    if T < 1 or m < 1:
        raise InputError(f"prior needs T, m >= 1, got T={T}, m={m}")
    check_symmetric_assets(m)
    types = type_array(m, T)
    log_classes = float(log_factorials.log_binomial(m + T - 1, m - 1))
    return MultilinearCoefficients('symmetric', T, m,
                                   log_symmetric=-log_classes - log_factorials.log_multinomial(types),
                                   name="uniform-per-type")


def cover_superhedge_log_deposit(alpha: MultilinearCoefficients) -> float:
    """
    Smallest log p with p * W_alpha >= Cover's Derivative on every path:
    max over types of log D(e_{j^T}) - log alpha(j^T). Equals log p(T,m)
    for the Cover-Ordentlich prior.
    """
    T, m = alpha.horizon, alpha.assets
    if alpha.mode == 'symmetric':
        types = type_array(m, T)
        with np.errstate(invalid='ignore'):
            return float(np.max(_cover_log_vertex(types, T) - alpha.log_symmetric))
    unique, inverse = tuple_types(T, m)
    log_vertex = _cover_log_vertex(unique, T)[inverse]
    with np.errstate(divide='ignore'):
        return float(np.max(log_vertex - np.log(alpha.dense.ravel())))


def sigma_initial(m: int) -> SigmaTable:
    """Stage 0: sigma of the empty type over the empty history is 1"""
    return SigmaTable(stage=0, assets=m, log_values=np.zeros(1))


def sigma_advance(table: SigmaTable, row, t: Optional[int] = None) -> SigmaTable:
    """sigma(N; x^t) = sum_k sigma(N - e_k; x^{t-1}) x_{tk}, tabulated bottom-up"""
    if t is not None and table.stage != t - 1:
        raise InputError(f"sigma table is at stage {table.stage}, cannot advance to stage {t}")
    row = np.asarray(row, dtype=float).ravel()
    if row.size != table.assets or np.any(row < 0):
        raise InputError(f"return row {row} does not fit a table over {table.assets} assets")
    check_symmetric_assets(table.assets)
    stage = table.stage + 1
    parents = _parent_indices(table.assets, stage)
    with np.errstate(divide='ignore'):
        log_row = np.log(row)
    terms = np.full(parents.shape, -np.inf)
    valid = parents >= 0
    terms[valid] = table.log_values[parents[valid]] + np.broadcast_to(log_row, parents.shape)[valid]
    with np.errstate(divide='ignore', invalid='ignore'):
        log_values = logsumexp(terms, axis=1)
    return SigmaTable(stage=stage, assets=table.assets, log_values=log_values)


def sigma_from_prefix(prefix) -> SigmaTable:
    prefix = np.atleast_2d(np.asarray(prefix, dtype=float))
    m = prefix.shape[1]
    table = sigma_initial(m)
    for t, row in enumerate(prefix, start=1):
        table = sigma_advance(table, row, t)
    return table


def marginal_alpha(alpha: MultilinearCoefficients, t: int, k: int, N: TypeVector) -> float:
    """alpha_tk(N) = sum over |n| = T-t-1 of multinomial(T-t-1; n) alpha(N + n + e_k)"""
    if alpha.mode != 'symmetric':
        raise InputError("marginal_alpha needs symmetric coefficients")
    T, m = alpha.horizon, alpha.assets
    if not 0 <= t <= T - 1 or N.total != t or N.m != m or not 0 <= k < m:
        raise InputError(f"marginal alpha_(t={t}, k={k}) undefined for N={N.counts} on T={T}, m={m}")
    lookup = type_index(m, T)
    base = np.asarray(N.plus(k).counts)
    terms = []
    for n in compositions(m, T - t - 1):
        n = np.asarray(n)
        terms.append(float(log_factorials.log_multinomial(n)) + alpha.log_symmetric[lookup[tuple(base + n)]])
    return float(np.exp(logsumexp(terms)))


def marginal_table(alpha: MultilinearCoefficients) -> List[np.ndarray]:
    """
    log alpha_tk(N) for every stage t < T as (types(t), m) arrays, using
    beta_s(M) = sum_k beta_{s+1}(M + e_k) from beta_T = alpha, which holds
    for any coefficients; alpha_tk(N) = beta_{t+1}(N + e_k).
    """
    if alpha.mode != 'symmetric':
        raise InputError("marginal tables exist only for symmetric coefficients")
    if alpha._marginals:
        return alpha._marginals
    T, m = alpha.horizon, alpha.assets
    beta = alpha.log_symmetric
    tables = [None] * T
    for s in range(T - 1, -1, -1):
        children = _child_indices(m, s)
        tables[s] = beta[children]
        with np.errstate(divide='ignore', invalid='ignore'):
            beta = logsumexp(tables[s], axis=1)
    alpha._marginals.extend(tables)
    logger.debug(f"📊 Marginal tables built for {alpha.name} (T={T}, m={m})")
    return alpha._marginals


def symmetric_portfolio(alpha: MultilinearCoefficients, prefix, sigma: SigmaTable) -> PortfolioDecision:
    """theta_k proportional to sum over |N| = t of alpha_tk(N) sigma(N; x^t)"""
    prefix = _check_prefix(alpha, prefix)
    t = prefix.shape[0]
    if sigma.stage != t or sigma.assets != alpha.assets:
        raise InputError(f"sigma table at stage {sigma.stage} does not match a prefix of length {t}")
    marginals = marginal_table(alpha)[t]
    with np.errstate(divide='ignore', invalid='ignore'):
        log_masses = logsumexp(marginals + sigma.log_values[:, None], axis=0)
    return _normalize_masses(np.atleast_1d(log_masses), alpha.assets)


def symmetric_wealth(alpha: MultilinearCoefficients, X: ReturnMatrix) -> float:
    """sum over types of alpha(n) sigma(n; x^T)"""
    if alpha.mode != 'symmetric':
        raise InputError("symmetric_wealth needs symmetric coefficients")
    sigma = sigma_from_prefix(X.rows)
    with np.errstate(divide='ignore', invalid='ignore'):
        return float(np.exp(logsumexp(alpha.log_symmetric + sigma.log_values)))


class SymmetricReplicator:
    """
    Streaming replication of a symmetric prior: one sigma stage per
    observed session, previous stages discarded.
    """

    def __init__(self, alpha: MultilinearCoefficients):
        if alpha.mode != 'symmetric':
            raise InputError("SymmetricReplicator needs symmetric coefficients")
        self.alpha = alpha
        self.sigma = sigma_initial(alpha.assets)
        self.history: List[np.ndarray] = []
        self.log_wealth = 0.0
        marginal_table(alpha)

    @property
    def stage(self) -> int:
        return self.sigma.stage

    def decision(self) -> PortfolioDecision:
        return symmetric_portfolio(self.alpha, np.array(self.history).reshape(-1, self.alpha.assets),
                                   self.sigma)

    def observe(self, row) -> float:
        """Trade the current portfolio through one session; returns the growth factor"""
        row = np.asarray(row, dtype=float)
        growth = float(np.dot(self.decision().portfolio.weights, row))
        self.log_wealth += math.log(growth) if growth > 0 else -math.inf
        self.history.append(row)
        self.sigma = sigma_advance(self.sigma, row, self.stage + 1)
        return growth
