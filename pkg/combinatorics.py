#!/usr/bin/env python3
"""
Combinatorics Support Module
Log-factorial tables, type-class enumeration and log multinomial coefficients
shared by the pricing and multilinear engines.
"""

import functools
import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Dict, Iterator, Tuple

import numpy as np

from config import Config
from errors import BudgetError, InputError

logger = logging.getLogger(__name__)


@dataclass
class LogFactorialTable:
    """
    Precomputed L_n = log n and LF_n = log n! for 0 <= n <= max_n.
    LF_n is accumulated as L_n + LF_{n-1}, so differences are exact.
    """
    max_n: int = 0
    log_n: np.ndarray = field(default_factory=lambda: np.array([-np.inf]))
    values: np.ndarray = field(default_factory=lambda: np.array([0.0]))
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def ensure(self, n: int) -> 'LogFactorialTable':
        """Grow the table so that it covers n (never shrinks)"""
        if n <= self.max_n:
            return self
        with self._lock:
            if n <= self.max_n:
                return self
            new_n = max(n, 2 * self.max_n, 64)
            logs = np.empty(new_n + 1)
            logs[0] = -np.inf
            logs[1:] = np.log(np.arange(1, new_n + 1, dtype=float))
            values = np.empty(new_n + 1)
            values[0] = 0.0
            values[1:] = np.cumsum(logs[1:])
            self.log_n, self.values, self.max_n = logs, values, new_n
            logger.debug(f"📊 Log-factorial table grown to n={new_n}")
        return self

    def log_factorial(self, n):
        self.ensure(int(np.max(n)))
        return self.values[n]

    def log_binomial(self, n, k):
        """log C(n, k) = LF_n - LF_k - LF_{n-k}"""
        self.ensure(int(np.max(n)))
        return self.values[n] - self.values[k] - self.values[np.subtract(n, k)]

    def log_multinomial(self, counts) -> np.ndarray:
        """log of T!/(n_1!...n_m!) row-wise for an (..., m) array of counts"""
        counts = np.asarray(counts, dtype=int)
        totals = counts.sum(axis=-1)
        self.ensure(int(np.max(totals)) if totals.size else 0)
        return self.values[totals] - self.values[counts].sum(axis=-1)


# Global table instance
log_factorials = LogFactorialTable()


def type_class_count(total: int, m: int) -> int:
    """Number of type classes C(total+m-1, m-1)"""
    if m < 1 or total < 0:
        raise InputError(f"type classes need m >= 1 and total >= 0, got m={m}, total={total}")
    return math.comb(total + m - 1, m - 1)


def compositions(m: int, total: int) -> Iterator[Tuple[int, ...]]:
    """Yield every m-tuple of nonnegative integers summing to total, lexicographically"""
    if m == 1:
        yield (total,)
        return
    for value in range(total + 1):
        for rest in compositions(m - 1, total - value):
            yield (value,) + rest


def check_type_budget(total: int, m: int) -> int:
    count = type_class_count(total, m)
    if count > Config.TYPE_CLASS_BUDGET:
        raise BudgetError(
            f"{count} type classes for T={total}, m={m} exceed the budget "
            f"{Config.TYPE_CLASS_BUDGET}; use the recurrence or the Shtarkov bound"
        )
    return count


@functools.lru_cache(maxsize=256)
def type_array(m: int, total: int) -> np.ndarray:
    """All type vectors with the given total as a read-only (count, m) int array"""
    check_type_budget(total, m)
    types = np.array(list(compositions(m, total)), dtype=int).reshape(-1, m)
    types.setflags(write=False)
    return types


@functools.lru_cache(maxsize=256)
def type_index(m: int, total: int) -> Dict[Tuple[int, ...], int]:
    """Map type vector -> row of type_array(m, total)"""
    return {tuple(int(v) for v in row): i for i, row in enumerate(type_array(m, total))}
