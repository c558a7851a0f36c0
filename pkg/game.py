#!/usr/bin/env python3
"""
Trader-vs-Nature Game Module
The zero-sum game with payoff W_theta(X) / D(X): the trader's exact lower
value 1/p*[D], nature's equilibrium randomization over Kelly sequences,
and the worst-case utility U[W] = min over a path set of W / D.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from benchmarks import PayoffEvaluator, perfect_trader
from errors import DegenerateError, HedgeabilityError, InputError
from market import (
    PortfolioVector, ReturnMatrix, TradingStrategy,
    index_tuples, kelly_sequence, wealth_of_strategy,
)
from multilinear import hedging_cost, vertex_values

logger = logging.getLogger(__name__)

WealthFunction = Callable[[ReturnMatrix], float]


@dataclass(frozen=True)
class NatureDistribution:
    """Nature's mixed strategy: P{X = (e_{j_1}, ..., e_{j_T})} = D(e_{j_1}, ...) / p*[D]"""
    horizon: int
    assets: int
    probabilities: np.ndarray  # tensor of shape (m,)*T indexed by the tuple
    cost: float  # p*[D]

    def __post_init__(self):
        total = math.fsum(self.probabilities.ravel())
        if np.any(self.probabilities < 0) or abs(total - 1.0) > 1e-12:
            raise InputError(f"nature's probabilities must be nonnegative and sum to 1, got {total!r}")
        self.probabilities.setflags(write=False)

    def probability(self, j_tuple) -> float:
        return float(self.probabilities[tuple(j_tuple)])

    def support(self):
        """Tuples that carry positive probability, with their probabilities"""
        for j_tuple in index_tuples(self.horizon, self.assets):
            p = float(self.probabilities[j_tuple])
            if p > 0:
                yield j_tuple, p


@dataclass(frozen=True)
class PathSet:
    """A finite, nonempty set of return paths sharing (T, m)"""
    paths: Tuple[ReturnMatrix, ...]

    def __post_init__(self):
        paths = tuple(self.paths)
        if not paths:
            raise InputError("a path set needs at least one path")
        shapes = {(X.T, X.m) for X in paths}
        if len(shapes) != 1:
            raise InputError(f"paths in a set must share (T, m), got {sorted(shapes)}")
        object.__setattr__(self, 'paths', paths)

    def __iter__(self):
        return iter(self.paths)

    def __len__(self):
        return len(self.paths)


def kelly_path_set(T: int, m: int) -> PathSet:
    """Every Kelly sequence of length T over m assets"""
    return PathSet(tuple(kelly_sequence(j, m) for j in index_tuples(T, m)))


def lower_value(D: PayoffEvaluator) -> float:
    """Best guaranteed payoff of the trader, attained exactly: 1/p*[D]"""
    return 1.0 / hedging_cost(D)


def payoff_ratio(theta: TradingStrategy, X: ReturnMatrix, D: PayoffEvaluator) -> float:
    """W_theta(X) / D(X)"""
    benchmark = D(X)
    if not benchmark > 0:
        raise DegenerateError(f"{D.name} pays 0 on this path; the payoff ratio is undefined")
    return wealth_of_strategy(theta, X) / benchmark


def upper_value_ratio(X: ReturnMatrix, D: PayoffEvaluator) -> float:
    """perfect_trader(X) / D(X); its infimum over X is the game's upper value"""
    benchmark = D(X)
    if not benchmark > 0:
        raise DegenerateError(f"{D.name} pays 0 on this path; the upper-value ratio is undefined")
    return perfect_trader(X) / benchmark


def nature_distribution(D: PayoffEvaluator) -> NatureDistribution:
    if not D.is_multiconvex_homogeneous:
        raise HedgeabilityError(f"{D.name} is not flagged multiconvex and homogeneous; "
                                f"nature's Kelly-sequence randomization is not an equilibrium for it")
    values = vertex_values(D)
    cost = math.fsum(values.ravel())
    if not cost > 0:
        raise DegenerateError(f"{D.name} vanishes on every Kelly sequence")
    logger.debug(f"📊 Nature randomizes over {np.count_nonzero(values)} Kelly sequences, p*={cost:.12g}")
    return NatureDistribution(D.horizon, D.assets, values / cost, cost)


def expected_payoff(theta: TradingStrategy, dist: NatureDistribution, D: PayoffEvaluator) -> float:
    """
    Exact enumeration of E[W_theta(X) / D(X)] under nature's distribution.
    D is evaluated on every support point, so dist may come from another benchmark.
    """
    if (dist.horizon, dist.assets) != (D.horizon, D.assets):
        raise InputError("distribution and payoff live on different (T, m)")
    benchmarks = vertex_values(D)
    terms = []
    for j_tuple, p in dist.support():
        benchmark = float(benchmarks[j_tuple])
        if not benchmark > 0:
            raise DegenerateError(f"{D.name} pays 0 on Kelly sequence {j_tuple}, which nature plays "
                                  f"with probability {p:.6g}")
        terms.append(p * wealth_of_strategy(theta, kelly_sequence(j_tuple, dist.assets)) / benchmark)
    return math.fsum(terms)


def co_utility(W: Union[TradingStrategy, WealthFunction], D: PayoffEvaluator, paths: PathSet) -> float:
    """U[W] = min over the path set of W(X) / D(X)"""
    wealth = W if not isinstance(W, TradingStrategy) else (lambda X: wealth_of_strategy(W, X))
    ratios = []
    for X in paths:
        benchmark = D(X)
        if not benchmark > 0:
            raise DegenerateError(f"{D.name} pays 0 on a path of the set; the utility is undefined")
        ratios.append(wealth(X) / benchmark)
    return min(ratios)


def maximin_guarantee(theta: TradingStrategy, D: PayoffEvaluator, paths: Optional[PathSet] = None) -> float:
    """Worst payoff ratio of theta over the paths (all Kelly sequences by default)"""
    paths = kelly_path_set(D.horizon, D.assets) if paths is None else paths
    return co_utility(theta, D, paths)


def random_strategy(rng: np.random.Generator, m: int, T: int,
                    history_dependent: bool = False) -> TradingStrategy:
    """
    Memoryless draws uniform on the simplex, one per session; optionally
    tilted by the last observed returns so the rule depends on history.
    """
    base = rng.dirichlet(np.ones(m), size=T)
    tilt = rng.normal(size=m)

    def rule(prefix: np.ndarray) -> PortfolioVector:
        weights = base[prefix.shape[0]]
        if history_dependent and prefix.shape[0] > 0:
            weights = weights * np.exp(np.tanh(tilt * prefix[-1]))
        return PortfolioVector.from_unnormalized(weights)

    return TradingStrategy(rule, m, T, name="random-history" if history_dependent else "random")
