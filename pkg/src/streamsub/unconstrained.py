"""Unconstrained submodular maximization used as the post-pass subroutine.

Three solvers share one call signature ``solver(oracle, ground) -> (ids, value)``:

* ``exact``  full subset enumeration, ratio 1, ``|ground| <= 22``
* ``dg``     deterministic double greedy, ratio 1/3
* ``rdg``    randomized double greedy, ratio 1/2 in expectation only
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ParameterError, SizeError

EXACT_LIMIT = 22


def exact_unconstrained(oracle, ground) -> tuple[tuple, float]:
    """Maximizer of ``f`` over all subsets of ``ground``.

    Subsets are enumerated by bitmask over ``sorted(ground)``; among equal
    values the smallest bitmask wins.
    """
    items = sorted(ground)
    if len(items) > EXACT_LIMIT:
        raise SizeError(f"exact unconstrained solve limited to {EXACT_LIMIT} elements, got {len(items)}")
    best_mask, best_value = 0, None
    for mask in range(1 << len(items)):
        value = oracle.evaluate(items[i] for i in range(len(items)) if mask >> i & 1)
        if best_value is None or value > best_value:
            best_mask, best_value = mask, value
    chosen = tuple(items[i] for i in range(len(items)) if best_mask >> i & 1)
    return chosen, best_value


def _double_greedy(oracle, ground, rng=None):
    items = sorted(ground)
    X = []
    Y = set(items)
    fX = oracle.evaluate(())
    fY = oracle.evaluate(Y)
    for u in items:
        fXu = oracle.evaluate([*X, u])
        fYu = oracle.evaluate(Y - {u})
        gain_add = fXu - fX
        gain_drop = fYu - fY
        if rng is None:
            take = gain_add >= gain_drop
        else:
            a, r = max(gain_add, 0.0), max(gain_drop, 0.0)
            take = True if a + r == 0 else rng.random() < a / (a + r)
        if take:
            X.append(u)
            fX = fXu
        else:
            Y.discard(u)
            fY = fYu
    return tuple(X), fX


def double_greedy_det(oracle, ground) -> tuple:
    return _double_greedy(oracle, ground)[0]


def double_greedy_rand(oracle, ground, seed) -> tuple:
    return _double_greedy(oracle, ground, random.Random(seed))[0]


_GAMMA = {"exact": 1.0, "dg": 1.0 / 3.0, "rdg": 0.5}


@dataclass(frozen=True)
class UnconstrainedSolver:
    kind: str = "exact"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _GAMMA:
            raise ParameterError(f"unknown solver kind {self.kind!r}; choose exact, dg or rdg")

    @property
    def gamma(self) -> float:
        """Declared ratio (for ``rdg`` only in expectation)."""
        return _GAMMA[self.kind]

    @property
    def worst_case_gamma(self) -> float:
        return 0.0 if self.kind == "rdg" else _GAMMA[self.kind]

    def __call__(self, oracle, ground) -> tuple[tuple, float]:
        if self.kind == "exact":
            return exact_unconstrained(oracle, ground)
        if self.kind == "dg":
            return _double_greedy(oracle, ground)
        return _double_greedy(oracle, ground, random.Random(self.seed))


def make_solver(kind: str = "exact", seed: int = 0) -> UnconstrainedSolver:
    return UnconstrainedSolver(kind, seed)
