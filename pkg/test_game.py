#!/usr/bin/env python3
"""
Trader-vs-nature game: values, nature's randomization, the utility functional
"""
import sys

import numpy as np
import pytest

from benchmarks import (
    PayoffEvaluator, cover_derivative, cover_payoff, perfect_buy_and_hold_payoff, perfect_trader_payoff, strategy_payoff,
)
from errors import DegenerateError, HedgeabilityError, InputError
from game import (
    PathSet, co_utility, expected_payoff, kelly_path_set, lower_value, maximin_guarantee,
    nature_distribution, payoff_ratio, random_strategy, upper_value_ratio,
)
from market import PortfolioVector, ReturnMatrix, constant_strategy, kelly_sequence, wealth_of_strategy
from multilinear import majorant_coefficients, replicating_strategy
from pricing import price_direct
from suite_runner import run_suite


def superhedge(T, m):
    return replicating_strategy(majorant_coefficients(cover_payoff(T, m)))


def test_lower_value_examples():
    assert lower_value(cover_payoff(2, 2)) == pytest.approx(0.4, rel=1e-12)
    assert lower_value(perfect_trader_payoff(3, 2)) == pytest.approx(1 / 8, rel=1e-12)
    strategy = random_strategy(np.random.default_rng(3), 3, 3)
    assert lower_value(strategy_payoff(strategy)) == pytest.approx(1.0, rel=1e-10)


def test_payoff_ratio_examples():
    D = cover_payoff(2, 2)
    rng = np.random.default_rng(5)
    theta = superhedge(2, 2)
    for _ in range(50):
        X = ReturnMatrix(rng.uniform(0.1, 2.0, size=(2, 2)))
        assert payoff_ratio(theta, X, D) >= 0.4 - 1e-9
    any_theta = random_strategy(rng, 2, 2, history_dependent=True)
    assert payoff_ratio(any_theta, ReturnMatrix.ones(2, 2), D) == pytest.approx(1.0, rel=1e-12)
    first_only = constant_strategy(PortfolioVector([1.0, 0.0]), 2)
    assert payoff_ratio(first_only, kelly_sequence((1, 1), 2), D) == 0.0


def test_zero_benchmark_is_degenerate():
    zero = PayoffEvaluator(lambda X: 0.0, 1, 2, name="zero")
    theta = constant_strategy(PortfolioVector.uniform(2), 1)
    X = ReturnMatrix([[1.0, 1.0]])
    with pytest.raises(DegenerateError):
        payoff_ratio(theta, X, zero)
    with pytest.raises(DegenerateError):
        upper_value_ratio(X, zero)
    with pytest.raises(DegenerateError):
        co_utility(theta, zero, PathSet((X,)))


def test_upper_value_ratio():
    D = cover_payoff(2, 2)
    assert upper_value_ratio(ReturnMatrix.ones(2, 2), D) == pytest.approx(1.0, rel=1e-12)
    assert upper_value_ratio(kelly_sequence((0, 1), 2), D) == pytest.approx(4.0, rel=1e-8)
    rng = np.random.default_rng(7)
    for _ in range(500):
        T = int(rng.integers(1, 6))
        X = ReturnMatrix(rng.uniform(0.1, 2.0, size=(T, 2)))
        ratio = upper_value_ratio(X, cover_payoff(T, 2))
        assert ratio >= 1 - 1e-9
        if T > 1:
            assert 1 / price_direct(T, 2) < ratio


def test_nature_distribution_examples():
    dist = nature_distribution(cover_payoff(2, 2))
    assert np.allclose(dist.probabilities.ravel(), [0.4, 0.1, 0.1, 0.4], atol=1e-12)
    assert dist.cost == pytest.approx(2.5, rel=1e-12)
    assert dist.probability((0, 1)) == pytest.approx(0.1, rel=1e-12)
    assert len(list(dist.support())) == 4
    single = nature_distribution(cover_payoff(1, 4))
    assert np.allclose(single.probabilities, 0.25)
    assert abs(single.probabilities.sum() - 1.0) <= 1e-12

    strategy = random_strategy(np.random.default_rng(0), 2, 2)
    with pytest.raises(HedgeabilityError):
        nature_distribution(strategy_payoff(strategy))


def test_expected_payoff_examples():
    D = cover_payoff(2, 2)
    dist = nature_distribution(D)
    rng = np.random.default_rng(11)
    strategies = [random_strategy(rng, 2, 2), superhedge(2, 2),
                  constant_strategy(PortfolioVector([1.0, 0.0]), 2)]
    for theta in strategies:
        assert expected_payoff(theta, dist, D) == pytest.approx(0.4, abs=1e-12)
    with pytest.raises(InputError):
        expected_payoff(strategies[0], dist, cover_payoff(3, 2))


def test_expected_payoff_evaluates_the_benchmark():
    dist = nature_distribution(cover_payoff(2, 2))
    half = constant_strategy(PortfolioVector([0.5, 0.5]), 2)
    assert expected_payoff(half, dist, perfect_trader_payoff(2, 2)) == pytest.approx(0.25, rel=1e-12)
    assert expected_payoff(half, dist, cover_payoff(2, 2)) == pytest.approx(0.4, rel=1e-12)
    with pytest.raises(DegenerateError):
        expected_payoff(half, dist, perfect_buy_and_hold_payoff(2, 2))


def test_nature_guarantee_universality():
    rng = np.random.default_rng(13)
    for T, m in [(5, 2), (3, 3)]:
        D = cover_payoff(T, m)
        dist = nature_distribution(D)
        target = 1 / price_direct(T, m)
        for i in range(100):
            theta = random_strategy(rng, m, T, history_dependent=bool(i % 3 == 0))
            assert expected_payoff(theta, dist, D) == pytest.approx(target, abs=1e-12)


def test_co_utility_examples():
    D = cover_payoff(2, 2)
    assert co_utility(superhedge(2, 2), D, kelly_path_set(2, 2)) == pytest.approx(0.4, rel=1e-8)
    theta = random_strategy(np.random.default_rng(17), 2, 2)
    assert co_utility(theta, D, PathSet((ReturnMatrix.ones(2, 2),))) == pytest.approx(1.0, rel=1e-12)
    assert co_utility(lambda X: cover_derivative(X), D, kelly_path_set(2, 2)) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(InputError):
        PathSet(())
    with pytest.raises(InputError):
        PathSet((ReturnMatrix.ones(2, 2), ReturnMatrix.ones(3, 2)))


def test_co_utility_concave_and_monotone():
    rng = np.random.default_rng(19)
    D = cover_payoff(3, 2)
    paths = PathSet(tuple(ReturnMatrix(rng.uniform(0.2, 2.0, size=(3, 2))) for _ in range(30)))
    for _ in range(20):
        first = random_strategy(rng, 2, 3)
        second = random_strategy(rng, 2, 3, history_dependent=True)
        lam = float(rng.uniform())

        def mixed(X):
            return lam * wealth_of_strategy(first, X) + (1 - lam) * wealth_of_strategy(second, X)

        u_mixed = co_utility(mixed, D, paths)
        assert u_mixed >= lam * co_utility(first, D, paths) + (1 - lam) * co_utility(second, D, paths) - 1e-12
        assert co_utility(lambda X: 0.5 * wealth_of_strategy(first, X), D, paths) <= co_utility(first, D, paths)


def test_maximin_attainment():
    rng = np.random.default_rng(23)
    for T, m in [(3, 2), (5, 2), (2, 3), (3, 3)]:
        D = cover_payoff(T, m)
        guarantee = maximin_guarantee(superhedge(T, m), D)
        assert guarantee == pytest.approx(1 / price_direct(T, m), rel=1e-8)
        paths = kelly_path_set(T, m)
        for _ in range(100):
            theta = random_strategy(rng, m, T, history_dependent=True)
            assert maximin_guarantee(theta, D, paths) <= guarantee + 1e-9


def main():
    return run_suite("Game Test Suite", globals())


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
