"""Threshold sieves for ``max f(S)`` subject to ``|S| <= k``.

Three entry points share one per-guess instance:

* :func:`sieve_card_known_opt`  a single instance for a trusted guess ``v``
* :func:`sieve_card_known_max`  a fixed grid of guesses built from the
  trusted maximum singleton value ``m``
* :func:`sieve_card_onepass`    the grid follows the running maximum and is
  trimmed as it moves, so no trusted input is needed
"""

from __future__ import annotations

from .core import (
    CandidateSet,
    Outcome,
    SieveResult,
    at_least,
    pick_best,
    probe,
    stream_drive,
)
from .errors import ParameterError
from .grid import GuessGrid, card_tau_ratio, check_epsilon, grid_size_bound
from .unconstrained import UnconstrainedSolver

GRID_MODES = ("safe", "paper")


class CardInstance:
    """Sieve state for one guess ``v``: two threshold sets and the post-pass set."""

    __slots__ = ("exponent", "v", "tau", "k", "S1", "S2", "S3", "S3_value", "born")

    def __init__(self, v, tau_ratio, k, f_empty, exponent=None, born=0):
        self.exponent = exponent
        self.v = v
        self.tau = tau_ratio * v
        self.k = k
        self.S1 = CandidateSet(f_empty)
        self.S2 = CandidateSet(f_empty)
        self.S3 = None
        self.S3_value = None
        self.born = born

    @property
    def threshold(self) -> float:
        return self.tau / self.k

    def offer(self, oracle, elem) -> int:
        """Try ``elem`` against S1 then S2; return 1, 2 or 0 (rejected)."""
        thr = self.threshold
        if len(self.S1) < self.k:
            gain, value = probe(oracle, elem.id, self.S1)
            if at_least(gain, thr):
                self.S1.add(elem, value)
                return 1
        if len(self.S2) < self.k:
            gain, value = probe(oracle, elem.id, self.S2)
            if at_least(gain, thr):
                self.S2.add(elem, value)
                return 2
        return 0

    def solve(self, oracle, solver) -> None:
        self.S3, self.S3_value = solver(oracle, self.S1.ids)

    def candidates(self):
        tag = "v" if self.exponent is None else f"i={self.exponent}"
        yield f"{tag}:S1", tuple(self.S1.ids), self.S1.value
        yield f"{tag}:S2", tuple(self.S2.ids), self.S2.value
        if self.S3 is not None:
            yield f"{tag}:S3", tuple(self.S3), self.S3_value

    def resident(self) -> int:
        return len(self.S1) + len(self.S2) + (len(self.S3) if self.S3 is not None else 0)


class _CardSieve:
    def __init__(self, oracle, k, solver, tau_ratio):
        self.oracle = oracle
        self.k = k
        self.solver = solver
        self.tau_ratio = tau_ratio
        self.instances: dict = {}
        self.f_empty = None
        self.position = 0

    @property
    def live_instances(self) -> int:
        return len(self.instances)

    def resident(self) -> int:
        return sum(inst.resident() for inst in self.instances.values())

    def start(self):
        self.f_empty = self.oracle.evaluate(())
        self._setup()

    def _setup(self):
        pass

    def _before(self, elem):
        pass

    def step(self, elem):
        self._before(elem)
        for key in sorted(self.instances):
            self.instances[key].offer(self.oracle, elem)
        self.position += 1
        return True

    def finish(self) -> Outcome:
        ordered = [self.instances[key] for key in sorted(self.instances)]
        for inst in ordered:
            inst.solve(self.oracle, self.solver)
        best = pick_best(c for inst in ordered for c in inst.candidates())
        if best is None:
            return Outcome((), self.f_empty, winner="empty")
        label, ids, value = best
        return Outcome(tuple(sorted(ids)), value, winner=label)


class CardKnownOpt(_CardSieve):
    def __init__(self, oracle, k, v, solver, tau_ratio):
        super().__init__(oracle, k, solver, tau_ratio)
        self.v = v

    def _setup(self):
        self.instances[0] = CardInstance(self.v, self.tau_ratio, self.k, self.f_empty)


class CardGridSieve(_CardSieve):
    """Grid of instances; fixed from ``m`` up front or driven by the running max."""

    def __init__(self, oracle, k, epsilon, solver, tau_ratio, lower_factor, upper_factor, m=None):
        super().__init__(oracle, k, solver, tau_ratio)
        self.grid = GuessGrid(epsilon)
        self.lower_factor = lower_factor
        self.upper_factor = upper_factor
        self.online = m is None
        self.m = 0.0 if m is None else m

    def _spawn(self, exponents):
        for i in exponents:
            self.instances[i] = CardInstance(
                self.grid.value(i), self.tau_ratio, self.k, self.f_empty, exponent=i, born=self.position
            )

    def _setup(self):
        if not self.online:
            added, _ = self.grid.retarget(self.lower_factor * self.m, self.upper_factor * self.m)
            self._spawn(added)

    def _before(self, elem):
        if not self.online:
            return
        self.m = max(self.m, self.oracle.evaluate([elem.id]))
        if self.m <= 0:
            return
        added, removed = self.grid.retarget(self.lower_factor * self.m, self.upper_factor * self.m)
        for i in removed:
            del self.instances[i]
        self._spawn(added)


def _prepare(k, solver, gamma):
    if not isinstance(k, int) or k < 1:
        raise ParameterError(f"k must be a positive integer, got {k!r}")
    if solver is None:
        solver = UnconstrainedSolver("exact")
    return solver, card_tau_ratio(gamma)


def _result(outcome, instr, alg) -> SieveResult:
    instances = [alg.instances[key] for key in sorted(alg.instances)]
    return SieveResult(outcome.solution, outcome.value, instr, instances, outcome.early_terminated, outcome.winner)


def sieve_card_known_opt(stream, oracle, k, v, solver=None, *, gamma=None) -> SieveResult:
    """One threshold instance for a trusted guess ``alpha OPT <= v <= OPT``."""
    solver, c = _prepare(k, solver, gamma)
    if not v > 0:
        raise ParameterError(f"guess v must be positive, got {v}")
    alg = CardKnownOpt(oracle.metered(), k, v, solver, c)
    outcome, instr = stream_drive(stream, alg)
    return _result(outcome, instr, alg)


def _lower_factor(grid, epsilon):
    if grid not in GRID_MODES:
        raise ParameterError(f"grid mode must be one of {GRID_MODES}, got {grid!r}")
    return 1.0 if grid == "paper" else 1.0 / (1.0 + epsilon)


def sieve_card_known_max(stream, oracle, k, m, epsilon, solver=None, *, grid="safe", gamma=None) -> SieveResult:
    """Grid of guesses over ``[m/(1+eps), k m]`` (``[m, k m]`` with the literal ``grid="paper"`` mode)."""
    solver, c = _prepare(k, solver, gamma)
    check_epsilon(epsilon)
    if not m > 0:
        raise ParameterError(f"maximum singleton value m must be positive, got {m}")
    alg = CardGridSieve(oracle.metered(), k, epsilon, solver, c, _lower_factor(grid, epsilon), float(k), m=m)
    outcome, instr = stream_drive(stream, alg)
    return _result(outcome, instr, alg)


def sieve_card_onepass(stream, oracle, k, epsilon, solver=None, *, grid="safe", gamma=None) -> SieveResult:
    """Fully online sieve: the grid tracks ``[m/(1+eps), k m / c]`` for the running max ``m``."""
    solver, c = _prepare(k, solver, gamma)
    check_epsilon(epsilon)
    alg = CardGridSieve(oracle.metered(), k, epsilon, solver, c, _lower_factor(grid, epsilon), k / c)
    outcome, instr = stream_drive(stream, alg)
    return _result(outcome, instr, alg)


def card_grid_bound(k, epsilon, gamma=None) -> int:
    """Most live instances the one-pass grid can hold."""
    return grid_size_bound(epsilon, k / card_tau_ratio(gamma))


def card_memory_cap(k, epsilon=None, gamma=None) -> int:
    """Closed-form cap on resident ids: ``3k (|Q_max| + 1)``; ``3k`` for a single guess."""
    if epsilon is None:
        return 3 * k
    return 3 * k * (card_grid_bound(k, epsilon, gamma) + 1)
