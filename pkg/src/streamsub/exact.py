"""Brute-force ground truth for desk-scale instances."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Cardinality, DKnapsack
from .errors import InputError, SizeError

MAX_EXACT_N = 22


@dataclass(frozen=True)
class ExactResult:
    opt_set: tuple
    opt_value: float
    feasible_count: int


def _feasible_masks(constraint, n):
    if isinstance(constraint, Cardinality):
        k = constraint.k
        for mask in range(1 << n):
            if mask.bit_count() <= k:
                yield mask
        return
    if isinstance(constraint, DKnapsack):
        if constraint.n != n:
            raise InputError(f"cost matrix covers {constraint.n} elements, oracle has {n}")
        costs, caps = constraint.scaled_integers()
        d = len(costs)
        # load[mask] built from load[mask without its lowest bit]
        loads = [(0,) * d] * (1 << n)
        for mask in range(1, 1 << n):
            low = (mask & -mask).bit_length() - 1
            prev = loads[mask & (mask - 1)]
            loads[mask] = tuple(prev[i] + costs[i][low] for i in range(d))
        for mask in range(1 << n):
            if all(x <= cap for x, cap in zip(loads[mask], caps)):
                yield mask
        return
    raise InputError(f"unknown constraint type {type(constraint).__name__}")


def exact_opt(oracle, constraint, n: int) -> ExactResult:
    """Enumerate all ``2^n`` subsets; ties go to the smallest bitmask."""
    if n > MAX_EXACT_N:
        raise SizeError(f"exact optimum limited to n <= {MAX_EXACT_N}, got {n}")
    best_mask, best_value, count = 0, None, 0
    for mask in _feasible_masks(constraint, n):
        count += 1
        value = oracle.evaluate(i for i in range(n) if mask >> i & 1)
        if best_value is None or value > best_value:
            best_mask, best_value = mask, value
    opt_set = tuple(i for i in range(n) if best_mask >> i & 1)
    return ExactResult(opt_set, best_value, count)


@dataclass(frozen=True)
class RatioCheck:
    passed: bool
    margin: float | None  # run_value / opt_value, None when OPT = 0

    def __bool__(self):
        return self.passed


def verify_ratio(run_value: float, exact: ExactResult, bound: float) -> RatioCheck:
    """Pass iff ``run_value >= bound * OPT - 1e-9 max(1, OPT)``; OPT = 0 always passes."""
    opt = exact.opt_value
    if opt <= 0:
        return RatioCheck(True, None)
    ok = run_value >= bound * opt - 1e-9 * max(1.0, opt)
    return RatioCheck(ok, run_value / opt)
