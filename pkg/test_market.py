#!/usr/bin/env python3
"""
Market primitives: wealth evaluation, rebalancing rules, blends, indexes
"""
import math
import sys

import numpy as np
import pytest

from errors import BudgetError, InputError
from game import random_strategy
from market import (
    PortfolioVector, PriceTable, ReturnMatrix,
    blend_strategies, buy_and_hold_strategy, check_tuple_budget, compound,
    constant_strategy, crp_wealth, extremal_strategy, index_strategy,
    kelly_sequence, log_wealth_of_strategy, passive_index_gap_bound,
    returns_from_prices, strategy_from_function, vertex_sum, wealth_of_strategy,
)
from suite_runner import run_suite

DEMON = ReturnMatrix([[2.0, 1.0], [0.5, 1.0]])


def test_return_matrix_validation():
    with pytest.raises(InputError):
        ReturnMatrix([[1.0, -0.1]])
    with pytest.raises(InputError):
        ReturnMatrix([[1.0, 1.0], [0.0, 0.0]])
    X = ReturnMatrix([1.0, 2.0])
    assert (X.T, X.m) == (1, 2)


def test_portfolio_vector_normalization():
    c = PortfolioVector([0.5, 0.5 + 1e-10])
    assert abs(c.weights.sum() - 1.0) < 1e-15
    with pytest.raises(InputError):
        PortfolioVector([0.6, 0.6])
    with pytest.raises(InputError):
        PortfolioVector([1.1, -0.1])


def test_wealth_examples():
    half = PortfolioVector([0.5, 0.5])
    assert abs(wealth_of_strategy(constant_strategy(half, 2), DEMON) - 1.125) < 1e-15
    assert wealth_of_strategy(constant_strategy(half, 3), ReturnMatrix.ones(3, 2)) == 1.0
    extremal = extremal_strategy((0, 1), 2)
    assert wealth_of_strategy(extremal, ReturnMatrix([[2.0, 1.0], [0.5, 3.0]])) == 6.0


def test_crp_wealth_examples():
    assert crp_wealth(PortfolioVector([1.0, 0.0]), DEMON) == 1.0
    assert abs(crp_wealth(PortfolioVector([0.5, 0.5]), DEMON) - 1.125) < 1e-15
    assert abs(crp_wealth(PortfolioVector([1 / 3, 2 / 3]), ReturnMatrix([[3.0, 0.0]])) - 1.0) < 1e-15


def test_crp_matches_constant_strategy():
    rng = np.random.default_rng(7)
    for _ in range(20):
        c = PortfolioVector(rng.dirichlet(np.ones(3)))
        X = ReturnMatrix(rng.uniform(0.5, 1.5, size=(8, 3)))
        assert crp_wealth(c, X) == wealth_of_strategy(constant_strategy(c, 8), X)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        wealth_of_strategy(constant_strategy(PortfolioVector.uniform(3), 2), DEMON)
    with pytest.raises(InputError):
        wealth_of_strategy(constant_strategy(PortfolioVector.uniform(2), 1), DEMON)


def test_zero_wealth_is_legal():
    X = ReturnMatrix([[0.0, 1.0], [2.0, 1.0]])
    assert wealth_of_strategy(extremal_strategy((0, 0), 2), X) == 0.0
    assert log_wealth_of_strategy(extremal_strategy((0, 0), 2), X) == -math.inf


def test_vertex_sum_identity():
    rng = np.random.default_rng(11)
    for T, m in [(6, 2), (4, 3)]:
        for i in range(25):
            strategy = random_strategy(rng, m, T, history_dependent=bool(i % 2))
            assert abs(vertex_sum(strategy) - 1.0) < 1e-10


def test_blend_examples():
    theta = constant_strategy(PortfolioVector([1.0, 0.0]), 2)
    psi = constant_strategy(PortfolioVector([0.0, 1.0]), 2)
    X = ReturnMatrix([[2.0, 1.0], [2.0, 1.0]])
    assert abs(wealth_of_strategy(blend_strategies(0.5, theta, psi), X) - 2.5) < 1e-12
    assert np.allclose(blend_strategies(0.5, theta, psi).portfolio(np.empty((0, 2))).weights, [0.5, 0.5])
    assert wealth_of_strategy(blend_strategies(1.0, theta, psi), X) == wealth_of_strategy(theta, X)
    with pytest.raises(InputError):
        blend_strategies(1.5, theta, psi)


def test_blend_linearity():
    rng = np.random.default_rng(3)
    for _ in range(100):
        lam = float(rng.uniform())
        theta = random_strategy(rng, 2, 4)
        psi = random_strategy(rng, 2, 4, history_dependent=True)
        X = ReturnMatrix(rng.uniform(0.2, 2.0, size=(4, 2)))
        expected = lam * wealth_of_strategy(theta, X) + (1 - lam) * wealth_of_strategy(psi, X)
        got = wealth_of_strategy(blend_strategies(lam, theta, psi), X)
        assert abs(got - expected) <= 1e-12 * expected


def test_blend_with_deposits():
    theta = constant_strategy(PortfolioVector([1.0, 0.0]), 1)
    psi = constant_strategy(PortfolioVector([0.0, 1.0]), 1)
    X = ReturnMatrix([[3.0, 1.0]])
    blend = blend_strategies(0.5, theta, psi, deposits=(2.0, 1.0))
    assert abs(wealth_of_strategy(blend, X) - (1.0 * 3.0 + 0.5 * 1.0) / 1.5) < 1e-12


def test_row_homogeneity():
    rng = np.random.default_rng(5)
    X = ReturnMatrix(rng.uniform(0.5, 1.5, size=(5, 3)))
    c = PortfolioVector([0.2, 0.3, 0.5])
    for strategy in (constant_strategy(c, 5), buy_and_hold_strategy(c, 5)):
        base = wealth_of_strategy(strategy, X)
        scaled = wealth_of_strategy(strategy, X.scale_row(2, 3.5))
        assert abs(scaled - 3.5 * base) <= 1e-12 * scaled


def test_buy_and_hold_wealth():
    rng = np.random.default_rng(9)
    X = ReturnMatrix(rng.uniform(0.5, 1.5, size=(6, 3)))
    c = PortfolioVector([0.2, 0.3, 0.5])
    expected = float(np.dot(c.weights, X.rows.prod(axis=0)))
    assert abs(wealth_of_strategy(buy_and_hold_strategy(c, 6), X) - expected) < 1e-12


def test_index_strategies():
    X = ReturnMatrix([[2.0, 1.0]])
    assert wealth_of_strategy(index_strategy('equal_weight', 2, 1), X) == 1.5
    price_weighted = index_strategy('price_weighted', 2, 2, initial_prices=[1.0, 1.0])
    assert np.allclose(price_weighted.portfolio(X.rows).weights, [2 / 3, 1 / 3])
    cap_weighted = index_strategy('cap_weighted', 2, 3, shares=[1.0, 1.0], initial_prices=[5.0, 2.0])
    same_prices = index_strategy('price_weighted', 2, 3, initial_prices=[5.0, 2.0])
    Y = ReturnMatrix([[1.1, 0.9], [0.8, 1.3], [1.2, 1.0]])
    assert abs(wealth_of_strategy(cap_weighted, Y) - wealth_of_strategy(same_prices, Y)) < 1e-14
    with pytest.raises(InputError):
        index_strategy('cap_weighted', 2, 3)


def test_returns_from_prices():
    assert returns_from_prices(PriceTable([100.0], [[110.0]])).rows[0, 0] == pytest.approx(1.1, abs=1e-15)
    assert returns_from_prices(PriceTable([100.0], [[100.0]], [[5.0]])).rows[0, 0] == pytest.approx(1.05, abs=1e-15)
    flat = returns_from_prices(PriceTable([3.0, 7.0], [[3.0, 7.0], [3.0, 7.0]]))
    assert np.array_equal(flat.rows, np.ones((2, 2)))
    with pytest.raises(InputError):
        returns_from_prices(PriceTable([100.0], [[0.0]]))


def test_strategy_from_function_and_horizon():
    strategy = strategy_from_function(lambda prefix: [1.0, 0.0] if prefix.shape[0] == 0 else [0.0, 1.0], 2, 2)
    assert wealth_of_strategy(strategy, DEMON) == 2.0
    with pytest.raises(InputError):
        strategy.portfolio(DEMON.rows)


def test_kelly_sequence_and_budgets():
    X = kelly_sequence((1, 0, 1), 2)
    assert np.array_equal(X.rows, [[0, 1], [1, 0], [0, 1]])
    with pytest.raises(BudgetError):
        check_tuple_budget(40, 2)


def test_compound_in_log_space():
    assert compound(np.full(40, 2.0), 40) == pytest.approx(2.0 ** 40, rel=1e-12)
    assert compound([2.0, 0.0] * 20, 40) == 0.0


def test_passive_index_gap_bound():
    assert passive_index_gap_bound(PortfolioVector.uniform(4), 10) == pytest.approx(math.log(4) / 10)
    assert passive_index_gap_bound(PortfolioVector([1.0, 0.0]), 10) == math.inf


def main():
    return run_suite("Market Test Suite", globals())


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
