"""Geometric guess grids and the threshold constants the sieves run with.

Threshold constants
-------------------
Every sieve instance runs with ``tau = c * v`` for a guess ``v`` of OPT.  With
a post-pass unconstrained solver of ratio ``gamma`` the analysis has two
outcomes once neither candidate set is full:

* cardinality: ``f(out) >= 1/2 OPT - 1/2 f(S1 & O) - tau`` and
  ``f(out) >= gamma * f(S1 & O)``;
* d-knapsack:  the same with ``- 2 d tau`` in place of ``- tau``.

Writing ``X = f(S1 & O)`` and using ``OPT >= v``, the worst ``X`` equalizes
the two bounds:

    gamma X = v/2 - X/2 - tau        ->  X = (v - 2 tau) / (2 gamma + 1)
    gamma X = v/2 - X/2 - 2 d tau    ->  X = (v - 4 d tau) / (2 gamma + 1)

so the guaranteed fraction of ``v`` is ``min(c, gamma (1 - 2c) / (2 gamma + 1))``
(cardinality) or ``min(c, gamma (1 - 4 d c) / (2 gamma + 1))`` (d-knapsack).
The full-set and big-element cases give ``tau`` directly, hence the ``c``
term.  Both minima are maximized where the terms meet:

    c = gamma / (4 gamma + 1)                (1/6 at gamma = 1/2)
    c = gamma / (2 gamma + 1 + 4 d gamma)    (1/(4(d+1)) at gamma = 1/2)
"""

from __future__ import annotations

import math

from .errors import ParameterError

# Relative slack on grid membership; must exceed core.THRESHOLD_GUARD so an
# instance is never created after an element it would have accepted.
GRID_GUARD = 2e-12


def card_tau_ratio(gamma: float | None = None) -> float:
    if gamma is None:
        return 1.0 / 6.0
    _check_gamma(gamma)
    return gamma / (4.0 * gamma + 1.0)


def knapsack_tau_ratio(d: int, gamma: float | None = None) -> float:
    if gamma is None:
        return 1.0 / (4.0 * (d + 1))
    _check_gamma(gamma)
    return gamma / (2.0 * gamma + 1.0 + 4.0 * d * gamma)


def card_guarantee(tau_ratio: float, gamma: float) -> float:
    """Fraction of ``v`` guaranteed by one cardinality instance."""
    return max(0.0, min(tau_ratio, gamma * (1.0 - 2.0 * tau_ratio) / (2.0 * gamma + 1.0)))


def knapsack_guarantee(tau_ratio: float, gamma: float, d: int) -> float:
    """Fraction of ``v`` guaranteed by one d-knapsack instance."""
    return max(0.0, min(tau_ratio, gamma * (1.0 - 4.0 * d * tau_ratio) / (2.0 * gamma + 1.0)))


def _check_gamma(gamma):
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")


def check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon <= 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1], got {epsilon}")


def grid_size_bound(epsilon: float, spread: float) -> int:
    """``ceil(log_{1+eps} spread) + 2``: most exponents a grid of that spread holds."""
    return math.ceil(math.log(spread) / math.log1p(epsilon)) + 2


class GuessGrid:
    """Live exponents ``i`` with ``lower <= (1+eps)^i <= upper``.

    Guesses are stored as integer exponents and ``(1+eps)^i`` is recomputed
    on demand.  Bounds may only move upward; an exponent that falls below the
    lower bound is retired for good.
    """

    def __init__(self, epsilon: float):
        if epsilon <= 0:
            raise ParameterError(f"epsilon must be positive, got {epsilon}")
        self.epsilon = epsilon
        self.base = 1.0 + epsilon
        self._log_base = math.log1p(epsilon)
        self.live: list[int] = []
        self._retired_below: int | None = None

    def value(self, i: int) -> float:
        return self.base ** i

    def span(self, lower: float, upper: float) -> list[int]:
        if lower <= 0 or upper <= 0:
            return []
        lo_cut = lower * (1.0 - GRID_GUARD)
        hi_cut = upper * (1.0 + GRID_GUARD)
        lo = math.ceil(math.log(lower) / self._log_base)
        while self.value(lo - 1) >= lo_cut:
            lo -= 1
        while self.value(lo) < lo_cut:
            lo += 1
        hi = math.floor(math.log(upper) / self._log_base)
        while self.value(hi + 1) <= hi_cut:
            hi += 1
        while self.value(hi) > hi_cut:
            hi -= 1
        return list(range(lo, hi + 1))

    def retarget(self, lower: float, upper: float) -> tuple[list[int], list[int]]:
        """Move the grid to ``[lower, upper]``; return ``(added, removed)``."""
        new = self.span(lower, upper)
        old = set(self.live)
        added = [i for i in new if i not in old]
        keep = set(new)
        removed = [i for i in self.live if i not in keep]
        if self._retired_below is not None and any(i < self._retired_below for i in added):
            raise RuntimeError("guess grid would resurrect a deleted instance")
        if removed:
            top = max(removed) + 1
            self._retired_below = top if self._retired_below is None else max(self._retired_below, top)
        self.live = new
        return added, removed
